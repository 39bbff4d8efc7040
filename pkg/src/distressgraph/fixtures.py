"""Bundled deterministic fixtures for efficiency simulation and coherence
checks.

The simulation fixture plants 40 true mappings among 200 candidates with
confidence bands chosen so that true edges are the uncertain ones: true
scores sit near 0.5 while false scores sit near the extremes.  Uncertainty
ordering then cleanly separates the two groups, which is the situation the
active review policy is built for.
"""

from __future__ import annotations

import numpy as np

from .alignment import DEFAULT_CONCEPTS, CandidateEdge
from .annotation import AnnotationRecord
from .embedding import EmbeddingStore, HashedBagEmbedder
from .graph import (
    EdgeStatus,
    EdgeType,
    Framework,
    OntologyGraph,
    Provenance,
    SourceKind,
)
from .metrics import candidate_key

FIXTURE_SEED = 7
# Exact seeds for the active-vs-random comparison; shipped so the
# statistical property is reproducible run to run.
SIMULATION_SEEDS = tuple(range(1, 21))

FIXTURE_CONCEPTS = list(DEFAULT_CONCEPTS) + [
    {
        "code": "HEAVY-HEART",
        "framework": "CULTURAL",
        "label": "Heaviness of the heart (distress idiom)",
    }
]

_FIXTURE_LANGUAGES = ("hi", "kn", "mr")


def _fixture_provenance() -> Provenance:
    return Provenance(
        source_kind=SourceKind.SYNTHETIC,
        source_id="sim-fixture",
        collected_at="",
        anonymized=True,
    )


def simulation_fixture() -> tuple[dict, list[CandidateEdge], frozenset]:
    """Graph document, 200 candidates, and the 40-key planted truth set."""
    graph = OntologyGraph()
    concepts = []
    for item in FIXTURE_CONCEPTS:
        node, _ = graph.add_concept(
            code=item["code"],
            framework=Framework(item["framework"]),
            label=item["label"],
        )
        concepts.append(node)
    expressions = []
    for i in range(40):
        node, _ = graph.add_expression(
            surface_text=f"simulated distress phrase {i:02d}",
            language=_FIXTURE_LANGUAGES[i % len(_FIXTURE_LANGUAGES)],
            annotation=AnnotationRecord.empty(),
            provenance=_fixture_provenance(),
        )
        expressions.append(node)

    rng = np.random.default_rng(FIXTURE_SEED)
    candidates: list[CandidateEdge] = []
    true_keys: set = set()
    for i, expr in enumerate(expressions):
        for j, concept in enumerate(concepts):
            is_true = j == i % len(concepts)
            if is_true:
                score = float(rng.uniform(0.40, 0.60))
            elif (i + j) % 2 == 0:
                score = float(rng.uniform(0.82, 0.97))
            else:
                score = float(rng.uniform(0.03, 0.18))
            candidates.append(
                CandidateEdge(
                    src=expr.id,
                    dst=concept.id,
                    edge_type=EdgeType.EXPRESSION_CONCEPT,
                    score=score,
                    rationale="Synthetic candidate for review-efficiency measurement.",
                    proposer_id="sim-fixture-v1",
                )
            )
            if is_true:
                true_keys.add(candidate_key(expr.id, concept.id, EdgeType.EXPRESSION_CONCEPT))
    return graph.export_document(), candidates, frozenset(true_keys)


# Two token-disjoint phrase clusters; disjointness makes every cross-cluster
# cosine exactly zero under the per-token embedding.
_CLUSTER_A = (
    "man ka bhoj bhari",
    "man ka bhoj bhari hai",
    "aaj man ka bhoj bhari",
    "man ka bhoj bhari bahut",
    "man ka bhoj bhari lagta",
)
_CLUSTER_B = (
    "neend nahi aati raat",
    "neend nahi aati raat bhar",
    "neend nahi aati raat ko",
    "kal neend nahi aati raat",
    "neend nahi aati raat se",
)


def coherence_fixture() -> tuple[OntologyGraph, EmbeddingStore, str]:
    """Two planted expression clusters, each Accepted onto its own concept."""
    graph = OntologyGraph()
    store = EmbeddingStore()
    embedder = HashedBagEmbedder()
    concept_a, _ = graph.add_concept(
        code="MIND-BURDEN",
        framework=Framework.CULTURAL,
        label="Burden on the mind (distress idiom)",
    )
    concept_b, _ = graph.add_concept(
        code="SLEEP-DISTURBANCE",
        framework=Framework.DSM5,
        label="Insomnia or hypersomnia",
    )
    for texts, concept in ((_CLUSTER_A, concept_a), (_CLUSTER_B, concept_b)):
        for text in texts:
            node, _ = graph.add_expression(
                surface_text=text,
                language="hi",
                annotation=AnnotationRecord.empty(),
                provenance=_fixture_provenance(),
            )
            store.register(node.id, embedder.embed(text), embedder.provider_id)
            edge, _ = graph.add_edge(
                src=node.id,
                dst=concept.id,
                edge_type=EdgeType.EXPRESSION_CONCEPT,
                model_confidence=0.9,
                rationale="Planted cluster membership.",
                provenance=_fixture_provenance(),
            )
            graph.set_edge_status(edge.id, EdgeStatus.UNDER_VALIDATION)
            graph.set_edge_status(edge.id, EdgeStatus.ACCEPTED)
    return graph, store, embedder.provider_id


__all__ = [
    "FIXTURE_CONCEPTS",
    "FIXTURE_SEED",
    "SIMULATION_SEEDS",
    "coherence_fixture",
    "simulation_fixture",
]
