"""Record API response fixtures for the review console tests.

Drives the real HTTP service over an in-process client against the demo
data set, then writes each response body verbatim into tests/fixtures/.
Run from the repository root:

    python3 frontend/scripts/record_fixtures.py
"""

import json
from pathlib import Path

from fastapi.testclient import TestClient

from distressgraph import AnnotationRecord, Provenance
from distressgraph.alignment import ProposerEntry
from distressgraph.config import build_engine, load_config
from distressgraph.service import create_app

ROOT = Path(__file__).resolve().parents[2]
DEMO = ROOT / "demo"
OUT = ROOT / "frontend" / "tests" / "fixtures"

EXTRA_ENTRIES = [
    # Second readings so some expressions carry real alternatives.
    {
        "cue": "khushi mehsoos nahi",
        "language": "hi",
        "concept_code": "MIND-BURDEN",
        "framework": "CULTURAL",
        "base_confidence": 0.51,
        "rationale_template": 'Absent joy in "{text}" can also read as a burden idiom ({label}).',
    },
    {
        "cue": "halka nahi hota",
        "language": "hi",
        "concept_code": "ANHEDONIA",
        "framework": "DSM5",
        "base_confidence": 0.52,
        "rationale_template": 'The unrelieved weight in "{text}" can read as absent relief or pleasure ({label}).',
    },
]


def save(name: str, payload) -> None:
    path = OUT / name
    path.write_text(
        json.dumps(payload, ensure_ascii=False, indent=2, sort_keys=True) + "\n",
        encoding="utf-8",
    )
    print(f"wrote {path.relative_to(ROOT)}")


def edge_for(engine, surface_text: str, concept_code: str) -> str:
    for edge in engine.graph.edges():
        src = engine.graph.node(edge.src)
        dst = engine.graph.node(edge.dst)
        if getattr(src, "surface_text", None) == surface_text and dst.code == concept_code:
            return edge.id
    raise LookupError(f"no edge {surface_text!r} -> {concept_code}")


def decide(client, edge_id, role, verdict, comment=""):
    body = {
        "edge_id": edge_id,
        "validator_id": f"{role}-1",
        "role": role,
        "verdict": verdict,
        "comment": comment,
    }
    response = client.post(
        "/decisions", json=body, headers={"Idempotency-Key": f"rec-{edge_id}-{role}"}
    )
    response.raise_for_status()
    return response.json()


def main() -> None:
    OUT.mkdir(parents=True, exist_ok=True)
    app_config = load_config(DEMO / "config.json")
    engine = build_engine(app_config)
    engine.proposer.entries.extend(
        ProposerEntry.from_dict(item) for item in EXTRA_ENTRIES
    )
    client = TestClient(create_app(engine))

    save("queue_empty.json", client.get("/queue", params={"role": "linguistic"}).json())

    doc = json.loads((DEMO / "concepts.json").read_text(encoding="utf-8"))
    client.post("/graph/import", json=doc).raise_for_status()
    ingest = client.post(
        "/corpus/ingest", content=(DEMO / "corpus.jsonl").read_bytes()
    )
    ingest.raise_for_status()
    client.post("/candidates/propose", json={"mode": "concept"}).raise_for_status()

    save(
        "queue_linguistic.json",
        client.get("/queue", params={"role": "linguistic", "batch_size": 10}).json(),
    )
    save("health.json", client.get("/health").json())
    save("graph_export.json", client.get("/graph/export").json())

    # Accepted edge with a contrastive alternative (two candidate readings).
    anhedonia = edge_for(
        engine, "sab kuch samne hai, par khushi mehsoos nahi hoti", "ANHEDONIA"
    )
    decide(client, anhedonia, "linguistic", "accept", "clear anhedonia phrasing")
    decide(client, anhedonia, "clinical", "accept")
    last = decide(client, anhedonia, "cultural", "accept")
    save("decision_response.json", last)
    save("explanation_accepted.json", client.get(f"/edges/{anhedonia}/explanation").json())
    khushi_burden = edge_for(
        engine, "sab kuch samne hai, par khushi mehsoos nahi hoti", "MIND-BURDEN"
    )
    for role in ("linguistic", "clinical", "cultural"):
        decide(client, khushi_burden, role, "reject")

    # Devanagari expression settled by a unanimous panel.
    devanagari = edge_for(engine, "मन का बोझ उतरता ही नहीं", "MIND-BURDEN")
    decide(client, devanagari, "linguistic", "accept", "बोझ idiom is unambiguous")
    decide(client, devanagari, "clinical", "accept")
    decide(client, devanagari, "cultural", "accept")
    save("explanation_devanagari.json", client.get(f"/edges/{devanagari}/explanation").json())
    save("edge_detail_accepted.json", client.get(f"/edges/{devanagari}").json())

    # Split panel held for adjudication.
    ghabraahat = edge_for(engine, "mujhe bahut ghabraahat ho rahi hai", "MB24.3")
    decide(client, ghabraahat, "linguistic", "accept", "anxiety loanword")
    decide(client, ghabraahat, "clinical", "reject", "too little context")
    decide(client, ghabraahat, "cultural", "accept")
    save("edge_detail_adjudication.json", client.get(f"/edges/{ghabraahat}").json())
    resolution = client.post(
        f"/adjudications/{ghabraahat}",
        json={"outcome": "consensus_accept", "note": "panel reviewed the full call"},
        headers={"Idempotency-Key": "rec-adjudication-1"},
    )
    resolution.raise_for_status()
    save("adjudication_response.json", resolution.json())

    # Two readings of one expression retained in parallel.
    burden = edge_for(engine, "man ka bhoj halka nahi hota", "MIND-BURDEN")
    relief = edge_for(engine, "man ka bhoj halka nahi hota", "ANHEDONIA")
    for edge_id in (burden, relief):
        decide(client, edge_id, "linguistic", "accept")
        decide(client, edge_id, "clinical", "reject")
        decide(client, edge_id, "cultural", "accept")
    parallel = client.post(
        f"/adjudications/{burden}",
        json={
            "outcome": "retain_parallel",
            "parallel_edges": [burden, relief],
            "reasons": ["burden idiom reading", "absent relief reading"],
        },
        headers={"Idempotency-Key": "rec-adjudication-2"},
    )
    parallel.raise_for_status()
    save("edge_detail_parallel.json", client.get(f"/edges/{burden}").json())
    save("edge_detail_parallel_sibling.json", client.get(f"/edges/{relief}").json())

    # Expression ingested without annotations: bundle flags itself incomplete.
    bare, _ = engine.add_expression("tabiyat theek nahi rehti", "hi")
    concept = next(c for c in engine.graph.concepts() if c.code == "MB24.3")
    bare_edge, _ = engine.add_edge(
        bare.id, concept.id, "ExpressionConcept", 0.58, "general malaise wording"
    )
    engine.enqueue(bare_edge.id)
    save("explanation_incomplete.json", client.get(f"/edges/{bare_edge.id}/explanation").json())

    # Near-duplicate pair so one bundle carries nonzero token weights.
    annotation = AnnotationRecord.from_dict(
        {
            "semantic_category": "somatic_complaint",
            "cultural_markers": ["metaphorical"],
            "severity": "mild",
            "temporal": "chronic",
            "annotator_confidence": 0.8,
            "annotator_id": "ann-6",
        }
    )
    provenance = Provenance.from_dict(
        {
            "source_kind": "helpline",
            "source_id": "call-0008",
            "collected_at": "2025-11-03T09:00:00Z",
            "anonymized": True,
        }
    )
    for text in ("dil bhari bhari rehta hai", "dil bhari rehta hai"):
        engine.add_expression(text, "hi", annotation, provenance)
    client.post(
        "/candidates/propose", json={"mode": "intra", "params": {"language": "hi"}}
    ).raise_for_status()
    intra = next(
        e.id for e in engine.graph.edges() if e.edge_type.value == "IntraLingual"
    )
    save("explanation_intra.json", client.get(f"/edges/{intra}/explanation").json())

    save("graph_export_final.json", client.get("/graph/export").json())
    save("metrics.json", client.get("/metrics").json())
    missing = client.get("/edges/edge-999999")
    save("error_not_found.json", {"status": missing.status_code, "body": missing.json()})


if __name__ == "__main__":
    main()
