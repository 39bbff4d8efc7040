"""Event-sourced engine tying graph, alignment, workflow, and explanations
together.

Every mutation goes through one path: validate, apply to in-memory state,
then append the event to the log.  A failed request therefore leaves both
state and log untouched, and replaying a log into a fresh engine rebuilds
the exact state, ids included.  Embedding vectors are derived data and are
recomputed during replay rather than logged.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, replace
from datetime import datetime, timezone
from pathlib import Path
from typing import Callable, Iterable, Optional, Sequence, Union

from .alignment import (
    AlignmentEngine,
    AlignmentOutcome,
    CandidateEdge,
    MappingProposer,
    default_proposer,
)
from .annotation import AnnotationRecord
from .corpus import IngestReport, ingest_corpus
from .embedding import EmbeddingStore, HashedBagEmbedder
from .errors import (
    ConflictError,
    NotFoundError,
    ProposerError,
    StateError,
    ValidationError,
)
from .events import EventKind, EventLog, EventRecord, load_event_log
from .explain import (
    ExplanationBundle,
    ExplanationRule,
    build_bundle,
    default_rules,
    render_report,
    render_report_html,
)
from .graph import (
    ConceptNode,
    Edge,
    EdgeStatus,
    EdgeType,
    ExpressionNode,
    Framework,
    NodeStatus,
    OntologyGraph,
    Provenance,
    SourceKind,
    canonical_json_bytes,
    normalize_surface_text,
)
from .workflow import (
    AdjudicationOutcome,
    DecisionOutcome,
    QueueItem,
    ValidationDecision,
    ValidatorRole,
    Workflow,
    WorkflowConfig,
    uncertainty,
)

logger = logging.getLogger(__name__)

# Statuses that require a persisted explanation bundle.
_BUNDLE_STATUSES = (EdgeStatus.ACCEPTED, EdgeStatus.PARALLEL_RETAINED)


def utc_now() -> str:
    return datetime.now(timezone.utc).strftime("%Y-%m-%dT%H:%M:%S.%fZ")


def system_provenance(source_id: str = "system") -> Provenance:
    """Provenance for artifacts minted by the engine itself."""
    return Provenance(
        source_kind=SourceKind.SYNTHETIC,
        source_id=source_id,
        collected_at="",
        anonymized=True,
    )


@dataclass(frozen=True)
class AlignmentResult:
    """Applied outcome of aligning one incoming text."""

    outcome: AlignmentOutcome
    node: ExpressionNode
    created: bool
    matched_node_id: Optional[str] = None
    similarity: Optional[float] = None
    edge: Optional[Edge] = None

    def to_dict(self) -> dict:
        return {
            "outcome": self.outcome.value,
            "node": self.node.to_dict(),
            "created": self.created,
            "matched_node_id": self.matched_node_id,
            "similarity": self.similarity,
            "edge": self.edge.to_dict() if self.edge else None,
        }


class Engine:
    """One graph, one workflow, one event log."""

    def __init__(
        self,
        config: Optional[WorkflowConfig] = None,
        embedder: Optional[HashedBagEmbedder] = None,
        proposer: Optional[MappingProposer] = None,
        rules: Optional[Sequence[ExplanationRule]] = None,
        log_path: Optional[Union[str, Path]] = None,
        clock: Optional[Callable[[], str]] = None,
    ):
        self.config = config or WorkflowConfig()
        self.config.check()
        self.graph = OntologyGraph()
        self.store = EmbeddingStore()
        self.embedder = embedder or HashedBagEmbedder()
        self.alignment = AlignmentEngine(
            self.graph,
            self.store,
            self.embedder,
            tau=self.config.tau,
            tau_align=self.config.tau_align,
        )
        self.workflow = Workflow(self.graph, self.config)
        self.proposer = proposer or default_proposer()
        self.rules = list(rules) if rules is not None else default_rules()
        self.log = EventLog(log_path)
        self.bundles: dict[str, ExplanationBundle] = {}
        self._alternatives: dict[str, list[CandidateEdge]] = {}
        self._threshold_cursor = 0
        self.clock = clock or utc_now

    # ------------------------------------------------------------------
    # Event machinery
    # ------------------------------------------------------------------

    def _record(self, kind: EventKind, payload: dict):
        """Apply an event, then append it; returns the handler's result."""
        result = self._apply(kind, payload)
        self.log.append(kind, payload, at=self.clock())
        return result

    def _apply(self, kind: EventKind, payload: dict):
        handler = getattr(self, f"_apply_{EventKind(kind).value}")
        return handler(payload)

    def _apply_node_added(self, payload: dict):
        if payload["node_kind"] == "expression":
            node = ExpressionNode.from_dict(payload["node"])
            self.graph.insert_expression(node)
            self.alignment.ensure_embedding(node)
            return node
        node = ConceptNode.from_dict(payload["node"])
        self.graph.insert_concept(node)
        return node

    def _apply_edge_added(self, payload: dict):
        edge = Edge.from_dict(payload["edge"])
        self.graph.check_endpoints(edge.src, edge.dst, edge.edge_type)
        self.graph.insert_edge(edge)
        alternatives = payload.get("alternatives")
        if alternatives:
            self._alternatives[edge.id] = [
                CandidateEdge.from_dict(a) for a in alternatives
            ]
        return edge

    def _apply_edge_enqueued(self, payload: dict) -> QueueItem:
        return self.workflow.enqueue(
            payload["edge_id"], enqueued_at=payload.get("enqueued_at", "")
        )

    def _apply_decision_submitted(self, payload: dict) -> DecisionOutcome:
        return self.workflow.submit_decision(ValidationDecision.from_dict(payload))

    def _apply_adjudication_resolved(self, payload: dict) -> list[Edge]:
        return self.workflow.resolve_adjudication(
            payload["edge_id"],
            AdjudicationOutcome(payload["outcome"]),
            parallel_edges=payload.get("parallel_edges"),
            reasons=payload.get("reasons"),
            note=payload.get("note", ""),
        )

    def _apply_threshold_updated(self, payload: dict) -> float:
        tau = self.workflow.update_thresholds(
            [EdgeStatus(s) for s in payload["window"]]
        )
        self._threshold_cursor = len(self.workflow.terminal_log)
        self.alignment.tau = self.config.tau
        return tau

    def _apply_bundle_generated(self, payload: dict) -> ExplanationBundle:
        bundle = ExplanationBundle.from_dict(payload["bundle"])
        self.bundles[payload["edge_id"]] = bundle
        return bundle

    @classmethod
    def from_events(
        cls,
        records: Iterable[EventRecord],
        log_path: Optional[Union[str, Path]] = None,
        **kwargs,
    ) -> "Engine":
        """Rebuild an engine by replaying an event stream."""
        engine = cls(**kwargs)
        records = list(records)
        for record in records:
            engine._apply(record.kind, record.payload)
        engine.log.records = list(records)
        if log_path is not None:
            engine.log.close()
            engine.log = EventLog(log_path)
            engine.log.records = list(records)
        return engine

    @classmethod
    def from_log_file(cls, path: Union[str, Path], **kwargs) -> "Engine":
        return cls.from_events(load_event_log(path), log_path=path, **kwargs)

    # ------------------------------------------------------------------
    # Nodes
    # ------------------------------------------------------------------

    def add_expression(
        self,
        surface_text: str,
        language: str,
        annotation: Optional[AnnotationRecord] = None,
        provenance: Optional[Provenance] = None,
        gloss: Optional[str] = None,
        status: NodeStatus = NodeStatus.ACTIVE,
    ) -> tuple[ExpressionNode, bool]:
        text = normalize_surface_text(surface_text)
        if not text:
            raise ValidationError("surface_text is empty after trimming")
        language = language.strip().lower()
        if not language:
            raise ValidationError("language tag is empty")
        annotation = annotation or AnnotationRecord.empty()
        provenance = provenance or system_provenance()
        annotation.check()
        provenance.check()
        existing = self.graph.find_expression(text, language)
        if existing is not None:
            return existing, False
        node = ExpressionNode(
            id=self.graph.peek_next_id("expr"),
            surface_text=text,
            language=language,
            gloss=gloss,
            annotation=annotation,
            provenance=provenance,
            status=NodeStatus(status),
        )
        self._record(
            EventKind.NODE_ADDED, {"node_kind": "expression", "node": node.to_dict()}
        )
        return node, True

    def add_concept(
        self,
        code: str,
        framework: Framework,
        label: str,
        description: Optional[str] = None,
    ) -> tuple[ConceptNode, bool]:
        code = code.strip()
        label = label.strip()
        if not code or not label:
            raise ValidationError("concept code and label must be non-empty")
        framework = Framework(framework)
        existing = self.graph.find_concept(code, framework)
        if existing is not None:
            if existing.label != label:
                raise ConflictError(
                    f"concept ({code}, {framework.value}) already exists with "
                    f"label {existing.label!r}, refusing {label!r}"
                )
            return existing, False
        node = ConceptNode(
            id=self.graph.peek_next_id("conc"),
            code=code,
            framework=framework,
            label=label,
            description=description,
        )
        self._record(
            EventKind.NODE_ADDED, {"node_kind": "concept", "node": node.to_dict()}
        )
        return node, True

    # ------------------------------------------------------------------
    # Edges
    # ------------------------------------------------------------------

    def add_edge(
        self,
        src: str,
        dst: str,
        edge_type: EdgeType,
        model_confidence: float,
        rationale: str,
        provenance: Optional[Provenance] = None,
        revision_of: Optional[str] = None,
        alternatives: Optional[Sequence[CandidateEdge]] = None,
    ) -> tuple[Edge, bool]:
        edge_type = EdgeType(edge_type)
        if not 0.0 <= model_confidence <= 1.0:
            raise ValidationError(
                f"model_confidence {model_confidence} outside [0, 1]"
            )
        provenance = provenance or system_provenance()
        provenance.check()
        self.graph.check_endpoints(src, dst, edge_type)
        existing = self.graph.find_edge(src, dst, edge_type)
        if existing is not None:
            return existing, False
        edge = Edge(
            id=self.graph.peek_next_id("edge"),
            src=src,
            dst=dst,
            edge_type=edge_type,
            status=EdgeStatus.PROPOSED,
            model_confidence=float(model_confidence),
            rationale=rationale,
            provenance=provenance,
            revision_of=revision_of,
        )
        payload = {"edge": edge.to_dict()}
        if alternatives:
            payload["alternatives"] = [c.to_dict() for c in alternatives]
        self._record(EventKind.EDGE_ADDED, payload)
        return edge, True

    # ------------------------------------------------------------------
    # Corpus ingestion
    # ------------------------------------------------------------------

    def ingest_corpus(self, source) -> IngestReport:
        return ingest_corpus(source, self.add_expression)

    # ------------------------------------------------------------------
    # Candidate proposal
    # ------------------------------------------------------------------

    def propose(
        self,
        mode: str,
        language: Optional[str] = None,
        lang_a: Optional[str] = None,
        lang_b: Optional[str] = None,
        node_id: Optional[str] = None,
        k: Optional[int] = None,
        tau: Optional[float] = None,
        commit: bool = True,
        enqueue: bool = True,
    ) -> dict:
        """Generate candidates and, by default, commit them as Proposed
        edges and queue them for review.

        Concept mode records per-expression alternatives with each committed
        edge so contrastive explanations can cite the runner-up later.
        """
        per_src: dict[str, list[CandidateEdge]] = {}
        errors: list[str] = []
        if mode == "intra":
            if not language:
                raise ValidationError("intra proposal needs a language")
            candidates = self.alignment.propose_intra_lingual(language, k=k, tau=tau)
        elif mode == "cross":
            if not lang_a or not lang_b:
                raise ValidationError("cross proposal needs two languages")
            candidates = self.alignment.propose_cross_lingual(
                lang_a, lang_b, k=k, tau=tau
            )
        elif mode == "concept":
            node_ids = (
                [node_id] if node_id else [n.id for n in self.graph.expressions()]
            )
            candidates = []
            for nid in node_ids:
                try:
                    ranked = self.alignment.propose_expression_concept(
                        nid, self.proposer
                    )
                except ProposerError as exc:
                    if node_id:
                        raise
                    errors.append(str(exc))
                    continue
                per_src[nid] = ranked
                candidates.extend(ranked)
        else:
            raise ValidationError(f"unknown proposal mode {mode!r}")

        committed: list[Edge] = []
        created_count = 0
        if commit:
            for cand in candidates:
                edge, created = self.add_edge(
                    src=cand.src,
                    dst=cand.dst,
                    edge_type=cand.edge_type,
                    model_confidence=cand.score,
                    rationale=cand.rationale,
                    provenance=system_provenance(cand.proposer_id),
                    alternatives=per_src.get(cand.src),
                )
                committed.append(edge)
                if created:
                    created_count += 1
                    if enqueue:
                        self.enqueue(edge.id)
        return {
            "mode": mode,
            "candidates": [c.to_dict() for c in candidates],
            "edges": [e.to_dict() for e in committed],
            "created": created_count,
            "errors": errors,
        }

    # ------------------------------------------------------------------
    # Workflow
    # ------------------------------------------------------------------

    def enqueue(self, edge_id: str) -> QueueItem:
        edge = self.graph.edge(edge_id)
        payload = {
            "edge_id": edge_id,
            "enqueued_at": self.clock(),
            "priority": uncertainty(edge.model_confidence),
            "batch_key": self.workflow.batch_key(edge),
        }
        return self._record(EventKind.EDGE_ENQUEUED, payload)

    def next_batch(self, role: ValidatorRole, batch_size: int = 10) -> list[QueueItem]:
        return self.workflow.next_batch(ValidatorRole(role), batch_size)

    def submit_decision(
        self, decision: Union[ValidationDecision, dict]
    ) -> DecisionOutcome:
        if isinstance(decision, dict):
            decision = ValidationDecision.from_dict(decision)
        if not decision.decided_at:
            decision = replace(decision, decided_at=self.clock())
        outcome: DecisionOutcome = self._record(
            EventKind.DECISION_SUBMITTED, decision.to_dict()
        )
        if outcome.edge.status in _BUNDLE_STATUSES:
            self.generate_bundle(outcome.edge.id, force=True)
            outcome = replace(outcome, edge=self.graph.edge(outcome.edge.id))
        return outcome

    def resolve_adjudication(
        self,
        edge_id: str,
        outcome: AdjudicationOutcome,
        parallel_edges: Optional[Sequence[str]] = None,
        reasons: Optional[Sequence[str]] = None,
        note: str = "",
    ) -> list[Edge]:
        payload = {
            "edge_id": edge_id,
            "outcome": AdjudicationOutcome(outcome).value,
            "parallel_edges": list(parallel_edges) if parallel_edges else None,
            "reasons": list(reasons) if reasons else None,
            "note": note,
        }
        settled: list[Edge] = self._record(EventKind.ADJUDICATION_RESOLVED, payload)
        for edge in settled:
            if edge.status in _BUNDLE_STATUSES:
                self.generate_bundle(edge.id, force=True)
        return [self.graph.edge(e.id) for e in settled]

    def update_thresholds(
        self, window: Optional[Sequence[EdgeStatus]] = None
    ) -> float:
        """Feed settled outcomes to the threshold controller.

        Without an explicit window, uses every terminal outcome since the
        previous update; a no-op when nothing has settled since.
        """
        if window is None:
            window = self.workflow.terminal_log[self._threshold_cursor:]
            if not window:
                return self.config.tau
        payload = {"window": [EdgeStatus(s).value for s in window]}
        return self._record(EventKind.THRESHOLD_UPDATED, payload)

    # ------------------------------------------------------------------
    # Alignment of incoming text
    # ------------------------------------------------------------------

    def align_expression(
        self,
        surface_text: str,
        language: str,
        annotation: Optional[AnnotationRecord] = None,
        provenance: Optional[Provenance] = None,
        gloss: Optional[str] = None,
        tau_align: Optional[float] = None,
    ) -> AlignmentResult:
        """Place one incoming text: reuse an exact match, link a highly
        similar node, or mint a provisional node."""
        plan = self.alignment.plan_alignment(surface_text, language, tau_align)
        if plan.outcome is AlignmentOutcome.EXACT:
            node = self.graph.expression(plan.existing_node_id)
            return AlignmentResult(
                outcome=plan.outcome,
                node=node,
                created=False,
                matched_node_id=node.id,
            )
        if plan.outcome is AlignmentOutcome.ALIGNED:
            node, _ = self.add_expression(
                surface_text,
                language,
                annotation=annotation,
                provenance=provenance,
                gloss=gloss,
                status=NodeStatus.ACTIVE,
            )
            edge, _ = self.add_edge(
                src=plan.existing_node_id,
                dst=node.id,
                edge_type=plan.edge_type,
                model_confidence=plan.similarity,
                rationale=(
                    f"Auto-alignment: similarity {plan.similarity:.6f} to "
                    f"{plan.existing_node_id} under provider "
                    f"{self.alignment.provider_id}."
                ),
                provenance=system_provenance("auto-align"),
            )
            return AlignmentResult(
                outcome=plan.outcome,
                node=node,
                created=True,
                matched_node_id=plan.existing_node_id,
                similarity=plan.similarity,
                edge=edge,
            )
        node, _ = self.add_expression(
            surface_text,
            language,
            annotation=annotation,
            provenance=provenance,
            gloss=gloss,
            status=NodeStatus.PROVISIONAL,
        )
        return AlignmentResult(outcome=plan.outcome, node=node, created=True)

    # ------------------------------------------------------------------
    # Explanations
    # ------------------------------------------------------------------

    def generate_bundle(self, edge_id: str, force: bool = False) -> ExplanationBundle:
        """Build and persist the explanation bundle for an edge.

        Cached unless forced; terminal transitions force regeneration so the
        persisted bundle reflects final confidences.
        """
        if not force and edge_id in self.bundles:
            return self.bundles[edge_id]
        edge = self.graph.edge(edge_id)
        bundle = build_bundle(
            self.graph,
            self.store,
            self.embedder,
            edge,
            alternatives=self._alternatives.get(edge_id),
            rules=self.rules,
        )
        self._record(
            EventKind.BUNDLE_GENERATED,
            {"edge_id": edge_id, "bundle": bundle.to_dict()},
        )
        return self.bundles[edge_id]

    def preview_bundle(self, edge_id: str) -> ExplanationBundle:
        """Bundle content without persisting anything (read-only paths)."""
        if edge_id in self.bundles:
            return self.bundles[edge_id]
        edge = self.graph.edge(edge_id)
        return build_bundle(
            self.graph,
            self.store,
            self.embedder,
            edge,
            alternatives=self._alternatives.get(edge_id),
            rules=self.rules,
        )

    def report(self, edge_id: str, html: bool = False) -> str:
        edge = self.graph.edge(edge_id)
        bundle = self.generate_bundle(edge_id)
        renderer = render_report_html if html else render_report
        return renderer(self.graph, edge, bundle)

    # ------------------------------------------------------------------
    # Interchange
    # ------------------------------------------------------------------

    def export_document(self) -> dict:
        return self.graph.export_document(
            edge_extra=lambda e: {
                "explanation": self.bundles[e.id].to_dict()
                if e.id in self.bundles
                else None
            }
        )

    def export_bytes(self) -> bytes:
        return canonical_json_bytes(self.export_document())

    def import_document(self, doc: dict) -> dict:
        """Load a full graph document into an empty engine.

        Imports are fact events: ids and statuses are preserved exactly, so
        an export of the result is byte-identical to the input rendering.
        Queue membership is runtime state and is not part of the document.
        """
        if self.graph.expressions() or self.graph.concepts() or self.graph.edges():
            raise StateError("import needs an empty engine")
        parsed = OntologyGraph.from_document(doc)
        problems = parsed.integrity_problems()
        if problems:
            raise ValidationError("; ".join(problems))
        for node in parsed.expressions():
            self._record(
                EventKind.NODE_ADDED,
                {"node_kind": "expression", "node": node.to_dict()},
            )
        for node in parsed.concepts():
            self._record(
                EventKind.NODE_ADDED, {"node_kind": "concept", "node": node.to_dict()}
            )
        bundle_count = 0
        for item in doc["edges"]:
            edge = Edge.from_dict(item)
            self._record(EventKind.EDGE_ADDED, {"edge": edge.to_dict()})
            explanation = item.get("explanation")
            if explanation:
                self._record(
                    EventKind.BUNDLE_GENERATED,
                    {"edge_id": edge.id, "bundle": explanation},
                )
                bundle_count += 1
        return {
            "expressions": len(parsed.expressions()),
            "concepts": len(parsed.concepts()),
            "edges": len(parsed.edges()),
            "bundles": bundle_count,
        }

    # ------------------------------------------------------------------
    # Introspection
    # ------------------------------------------------------------------

    def summary(self) -> dict:
        by_status: dict[str, int] = {}
        for edge in self.graph.edges():
            by_status[edge.status.value] = by_status.get(edge.status.value, 0) + 1
        return {
            "expressions": len(self.graph.expressions()),
            "concepts": len(self.graph.concepts()),
            "edges": len(self.graph.edges()),
            "edges_by_status": by_status,
            "queue_depth": len(self.workflow.queue),
            "events": len(self.log),
            "tau": self.config.tau,
        }

    def close(self) -> None:
        self.log.close()


__all__ = ["AlignmentResult", "Engine", "system_provenance", "utc_now"]
