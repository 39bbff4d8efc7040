"""Command-line surface.

State lives in a JSON-lines event log: every invocation replays the log
named by --state, applies the requested operation, and appends the new
events before exiting.  Without --state the run is in-memory only, which
is enough for metrics on fresh data, simulations, and one-shot pipelines.

Exit codes: 0 success, 1 validation or domain error, 2 I/O error.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path
from typing import Optional

from .config import AppConfig, build_engine, load_config
from .engine import Engine
from .errors import DistressGraphError, IngestIOError
from .figures import write_metrics_report, write_simulation_report
from .fixtures import simulation_fixture
from .metrics import (
    RETAINED_STATUSES,
    connectivity_metrics,
    edge_key,
    efficiency_report,
    semantic_coherence,
)
from .events import EventKind
from .simulate import POLICIES, SimulationConfig, run_simulation
from .workflow import ValidatorRole


class _Parser(argparse.ArgumentParser):
    # Bad usage exits 1 like any other validation failure, not argparse's 2.
    def error(self, message):
        self.print_usage(sys.stderr)
        sys.stderr.write(f"{self.prog}: error: {message}\n")
        raise SystemExit(1)


def _engine_for(args) -> Engine:
    app = load_config(args.config) if args.config else AppConfig()
    return build_engine(app, log_path=args.state)


def _emit(args, payload: dict, text: Optional[str] = None) -> None:
    if getattr(args, "json", False) or text is None:
        sys.stdout.write(
            json.dumps(payload, ensure_ascii=False, indent=2, sort_keys=True) + "\n"
        )
    else:
        sys.stdout.write(text + "\n")


# ----------------------------------------------------------------------
# Subcommand handlers
# ----------------------------------------------------------------------


def _cmd_ingest(args) -> int:
    engine = _engine_for(args)
    try:
        if args.corpus == "-":
            report = engine.ingest_corpus(sys.stdin)
        else:
            with open(args.corpus, encoding="utf-8") as fh:
                report = engine.ingest_corpus(fh)
    finally:
        engine.close()
    _emit(
        args,
        report.to_dict(),
        f"ingested {report.accepted} records ({report.rejected} rejected, "
        f"{len(report.created_node_ids)} new nodes)",
    )
    return 0


def _cmd_propose(args) -> int:
    engine = _engine_for(args)
    try:
        result = engine.propose(
            args.mode,
            language=args.language,
            lang_a=args.lang_a,
            lang_b=args.lang_b,
            node_id=args.node_id,
            k=args.k,
            tau=args.tau,
            commit=not args.no_commit,
            enqueue=not args.no_enqueue,
        )
    finally:
        engine.close()
    _emit(
        args,
        result,
        f"{len(result['candidates'])} candidates, {result['created']} new edges queued",
    )
    return 0


def _cmd_queue(args) -> int:
    engine = _engine_for(args)
    try:
        items = engine.next_batch(ValidatorRole(args.role), args.batch_size)
        lines = []
        payload = []
        for item in items:
            edge = engine.graph.edge(item.edge_id)
            payload.append(
                {
                    "edge_id": item.edge_id,
                    "priority": item.priority,
                    "batch_key": item.batch_key,
                    "edge": edge.to_dict(),
                }
            )
            lines.append(
                f"{item.edge_id}  priority={item.priority:.3f}  "
                f"batch={item.batch_key}  {edge.src} -> {edge.dst}"
            )
    finally:
        engine.close()
    _emit(args, {"items": payload}, "\n".join(lines) if lines else "queue empty")
    return 0


def _cmd_decide(args) -> int:
    engine = _engine_for(args)
    try:
        decision = {
            "edge_id": args.edge,
            "validator_id": args.validator,
            "role": args.role,
            "verdict": args.verdict,
            "comment": args.comment,
        }
        if args.new_dst or args.new_edge_type:
            decision["modification"] = {
                "new_dst": args.new_dst,
                "new_edge_type": args.new_edge_type,
            }
        outcome = engine.submit_decision(decision)
        tau = engine.config.tau
        if args.update_thresholds and outcome.aggregated:
            tau = engine.update_thresholds()
        payload = {
            "edge": outcome.edge.to_dict(),
            "aggregated": outcome.aggregated,
            "revised_edge": outcome.revised_edge.to_dict()
            if outcome.revised_edge
            else None,
            "tau": tau,
        }
    finally:
        engine.close()
    _emit(
        args,
        payload,
        f"{args.edge}: status {payload['edge']['status']} (tau {tau:.3f})",
    )
    return 0


def _cmd_adjudicate(args) -> int:
    engine = _engine_for(args)
    try:
        settled = engine.resolve_adjudication(
            args.edge,
            args.outcome,
            parallel_edges=args.parallel_edges,
            reasons=args.reasons,
            note=args.note,
        )
        payload = {"edges": [e.to_dict() for e in settled]}
    finally:
        engine.close()
    _emit(
        args,
        payload,
        "; ".join(f"{e.id}: {e.status.value}" for e in settled),
    )
    return 0


def _cmd_explain(args) -> int:
    engine = _engine_for(args)
    try:
        rendered = engine.report(args.edge, html=args.html)
    finally:
        engine.close()
    if args.out:
        Path(args.out).write_text(rendered, encoding="utf-8")
        _emit(args, {"out": args.out}, f"wrote {args.out}")
    else:
        sys.stdout.write(rendered)
        if not rendered.endswith("\n"):
            sys.stdout.write("\n")
    return 0


def _cmd_metrics(args) -> int:
    engine = _engine_for(args)
    try:
        graph_metrics = connectivity_metrics(engine.graph)
        coherence = semantic_coherence(
            engine.graph, engine.store, engine.alignment.provider_id
        )
        decisions_used = sum(
            1
            for r in engine.log.records
            if r.kind
            in (EventKind.DECISION_SUBMITTED, EventKind.ADJUDICATION_RESOLVED)
        )
        accepted = [
            edge_key(e)
            for e in engine.graph.edges()
            if e.status in RETAINED_STATUSES
        ]
        payload = {
            "graph": graph_metrics.to_dict(),
            "semantic_coherence": coherence,
            "efficiency": efficiency_report(decisions_used, accepted).to_dict(),
        }
        if args.out_dir:
            payload["files"] = write_metrics_report(
                graph_metrics, args.out_dir, coherence=coherence
            )
    finally:
        engine.close()
    _emit(args, payload)
    return 0


def _cmd_simulate(args) -> int:
    doc, candidates, true_keys = simulation_fixture()
    policies = list(POLICIES) if args.policy == "both" else [args.policy]
    reports = {}
    curves = {}
    for policy in policies:
        config = SimulationConfig(
            seed=args.seed,
            true_edge_keys=true_keys,
            validator_accuracy=args.accuracy,
            policy=policy,
            target_f1=args.target_f1,
        )
        run = run_simulation(config, candidates, doc)
        reports[policy] = run.report
        curves[policy] = run.curve
    payload = {policy: reports[policy].to_dict() for policy in sorted(reports)}
    if args.out_dir:
        payload["files"] = write_simulation_report(reports, curves, args.out_dir)
    text = "; ".join(
        f"{policy}: {reports[policy].decisions_used} decisions, "
        f"f1 {reports[policy].f1:.3f}"
        for policy in sorted(reports)
    )
    _emit(args, payload, text)
    return 0


def _cmd_export(args) -> int:
    engine = _engine_for(args)
    try:
        data = engine.export_bytes()
    finally:
        engine.close()
    if args.out:
        Path(args.out).write_bytes(data)
        _emit(args, {"out": args.out}, f"wrote {args.out}")
    else:
        sys.stdout.buffer.write(data)
    return 0


def _cmd_import(args) -> int:
    engine = _engine_for(args)
    try:
        with open(args.document, encoding="utf-8") as fh:
            doc = json.load(fh)
        counts = engine.import_document(doc)
    finally:
        engine.close()
    _emit(
        args,
        counts,
        f"imported {counts['expressions']} expressions, "
        f"{counts['concepts']} concepts, {counts['edges']} edges",
    )
    return 0


def _cmd_serve(args) -> int:
    import uvicorn

    from .service import create_app

    app_config = load_config(args.config) if args.config else AppConfig()
    host = args.host or app_config.host
    port = args.port or app_config.port
    engine = build_engine(app_config, log_path=args.state)
    app = create_app(engine, auth_tokens=app_config.auth_tokens)
    server = uvicorn.Server(
        uvicorn.Config(app, host=host, port=port, log_level="warning")
    )
    server.run()
    return 0 if server.started else 1


# ----------------------------------------------------------------------
# Parser
# ----------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(
        prog="distressgraph",
        description="Multilingual distress-expression graph toolkit",
    )
    parser.add_argument("--state", help="event log file backing persistent state")
    parser.add_argument("--config", help="JSON configuration file")
    parser.add_argument(
        "--json", action="store_true", help="machine-readable JSON on stdout"
    )
    # The same flags are accepted after the subcommand; SUPPRESS keeps an
    # absent late flag from clobbering an early one.
    shared = argparse.ArgumentParser(add_help=False)
    shared.add_argument("--state", default=argparse.SUPPRESS)
    shared.add_argument("--config", default=argparse.SUPPRESS)
    shared.add_argument("--json", action="store_true", default=argparse.SUPPRESS)
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)

    p = sub.add_parser("ingest", help="ingest a JSON-lines corpus file", parents=[shared])
    p.add_argument("corpus", help="corpus file path, or - for stdin")
    p.set_defaults(func=_cmd_ingest)

    p = sub.add_parser("propose", help="generate and queue candidate edges", parents=[shared])
    p.add_argument(
        "--mode", required=True, choices=["intra", "cross", "concept"]
    )
    p.add_argument("--language")
    p.add_argument("--lang-a")
    p.add_argument("--lang-b")
    p.add_argument("--node-id")
    p.add_argument("-k", type=int)
    p.add_argument("--tau", type=float)
    p.add_argument("--no-commit", action="store_true")
    p.add_argument("--no-enqueue", action="store_true")
    p.set_defaults(func=_cmd_propose)

    p = sub.add_parser("queue", help="show the next review batch for a role", parents=[shared])
    p.add_argument(
        "--role", required=True, choices=[r.value for r in ValidatorRole]
    )
    p.add_argument("--batch-size", type=int, default=10)
    p.set_defaults(func=_cmd_queue)

    p = sub.add_parser("decide", help="submit one validator decision", parents=[shared])
    p.add_argument("--edge", required=True)
    p.add_argument("--validator", required=True)
    p.add_argument(
        "--role", required=True, choices=[r.value for r in ValidatorRole]
    )
    p.add_argument(
        "--verdict", required=True, choices=["accept", "reject", "modify"]
    )
    p.add_argument("--comment", default="")
    p.add_argument("--new-dst", help="replacement target for a modify verdict")
    p.add_argument("--new-edge-type", help="replacement edge type for modify")
    p.add_argument(
        "--update-thresholds",
        action="store_true",
        help="feed settled outcomes back into the proposal threshold",
    )
    p.set_defaults(func=_cmd_decide)

    p = sub.add_parser("adjudicate", help="resolve an escalated edge", parents=[shared])
    p.add_argument("--edge", required=True)
    p.add_argument(
        "--outcome",
        required=True,
        choices=["consensus_accept", "consensus_reject", "retain_parallel"],
    )
    p.add_argument("--parallel-edges", nargs="*")
    p.add_argument("--reasons", nargs="*")
    p.add_argument("--note", default="")
    p.set_defaults(func=_cmd_adjudicate)

    p = sub.add_parser("explain", help="render the explanation report for an edge", parents=[shared])
    p.add_argument("--edge", required=True)
    p.add_argument("--html", action="store_true")
    p.add_argument("--out", help="write the report to a file instead of stdout")
    p.set_defaults(func=_cmd_explain)

    p = sub.add_parser("metrics", help="graph metrics and review efficiency", parents=[shared])
    p.add_argument(
        "--out-dir", help="also write metrics.json/.csv/.png into this directory"
    )
    p.set_defaults(func=_cmd_metrics)

    p = sub.add_parser("simulate", help="seeded review simulation on the bundled fixture", parents=[shared])
    p.add_argument("--seed", type=int, default=1)
    p.add_argument("--policy", choices=list(POLICIES) + ["both"], default="both")
    p.add_argument("--accuracy", type=float, default=1.0)
    p.add_argument("--target-f1", type=float, default=0.9)
    p.add_argument(
        "--out-dir", help="also write simulation.json/.csv/.png into this directory"
    )
    p.set_defaults(func=_cmd_simulate)

    p = sub.add_parser("export", help="write the canonical graph document", parents=[shared])
    p.add_argument("--out", help="output file; stdout when omitted")
    p.set_defaults(func=_cmd_export)

    p = sub.add_parser("import", help="load a graph document into empty state", parents=[shared])
    p.add_argument("document", help="graph document JSON file")
    p.set_defaults(func=_cmd_import)

    p = sub.add_parser("serve", help="run the HTTP service", parents=[shared])
    p.add_argument("--host")
    p.add_argument("--port", type=int)
    p.set_defaults(func=_cmd_serve)

    return parser


def main(argv: Optional[list] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if not getattr(args, "command", None):
        parser.print_usage(sys.stderr)
        return 1
    try:
        return args.func(args)
    except IngestIOError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 2
    except DistressGraphError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 1
    except OSError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 2


if __name__ == "__main__":
    sys.exit(main())
