"""Typed heterogeneous graph of distress expressions and clinical concepts.

Two node kinds (expression, concept) and three edge kinds:

* intra-lingual edges group related expressions within one language,
* cross-lingual edges align equivalent expressions across languages,
* expression-concept edges tie patient language to a diagnostic category.

Every edge carries status, confidence scores, a rationale, and provenance.
Mutations are validated against the endpoint invariants at creation time and
status changes are restricted to the review-lifecycle transition table.
"""

from __future__ import annotations

import json
import unicodedata
from dataclasses import dataclass, replace
from enum import Enum
from typing import Callable, Iterable, Optional, Union

from .annotation import AnnotationRecord
from .errors import (
    ConflictError,
    EdgeKindError,
    NotFoundError,
    ParseError,
    PolicyError,
    StateError,
    ValidationError,
)


class NodeStatus(str, Enum):
    ACTIVE = "active"
    PROVISIONAL = "provisional"


class Framework(str, Enum):
    ICD11 = "ICD11"
    DSM5 = "DSM5"
    CULTURAL = "CULTURAL"


class EdgeType(str, Enum):
    INTRA_LINGUAL = "IntraLingual"
    CROSS_LINGUAL = "CrossLingual"
    EXPRESSION_CONCEPT = "ExpressionConcept"


class EdgeStatus(str, Enum):
    PROPOSED = "Proposed"
    UNDER_VALIDATION = "UnderValidation"
    ACCEPTED = "Accepted"
    REJECTED = "Rejected"
    SUPERSEDED = "Superseded"
    ADJUDICATION = "Adjudication"
    PARALLEL_RETAINED = "ParallelRetained"


# The only legal status moves for a persisted edge.  Everything an edge ever
# does must decompose into these steps.
ALLOWED_TRANSITIONS: frozenset[tuple[EdgeStatus, EdgeStatus]] = frozenset(
    {
        (EdgeStatus.PROPOSED, EdgeStatus.UNDER_VALIDATION),
        (EdgeStatus.UNDER_VALIDATION, EdgeStatus.ACCEPTED),
        (EdgeStatus.UNDER_VALIDATION, EdgeStatus.REJECTED),
        (EdgeStatus.UNDER_VALIDATION, EdgeStatus.SUPERSEDED),
        (EdgeStatus.UNDER_VALIDATION, EdgeStatus.ADJUDICATION),
        (EdgeStatus.ADJUDICATION, EdgeStatus.ACCEPTED),
        (EdgeStatus.ADJUDICATION, EdgeStatus.REJECTED),
        (EdgeStatus.ADJUDICATION, EdgeStatus.PARALLEL_RETAINED),
    }
)


class SourceKind(str, Enum):
    COUNSELING_TRANSCRIPT = "counseling_transcript"
    HELPLINE = "helpline"
    FORUM = "forum"
    COMMUNITY_HEALTH = "community_health"
    EXPERT_INTERVIEW = "expert_interview"
    SYNTHETIC = "synthetic"


@dataclass(frozen=True)
class Provenance:
    source_kind: SourceKind
    source_id: str
    collected_at: str
    anonymized: bool

    def check(self) -> None:
        # Real-world source material may only enter the graph anonymized.
        if self.source_kind is not SourceKind.SYNTHETIC and not self.anonymized:
            raise PolicyError(
                f"source {self.source_id!r} ({self.source_kind.value}) "
                "is not anonymized"
            )

    def to_dict(self) -> dict:
        return {
            "source_kind": self.source_kind.value,
            "source_id": self.source_id,
            "collected_at": self.collected_at,
            "anonymized": self.anonymized,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "Provenance":
        try:
            return cls(
                source_kind=SourceKind(data["source_kind"]),
                source_id=str(data["source_id"]),
                collected_at=str(data["collected_at"]),
                anonymized=bool(data["anonymized"]),
            )
        except (KeyError, ValueError, TypeError) as exc:
            raise ValidationError(f"bad provenance record: {exc}") from exc


@dataclass(frozen=True)
class ExpressionNode:
    id: str
    surface_text: str
    language: str
    gloss: Optional[str]
    annotation: AnnotationRecord
    provenance: Provenance
    status: NodeStatus

    def to_dict(self) -> dict:
        return {
            "id": self.id,
            "surface_text": self.surface_text,
            "language": self.language,
            "gloss": self.gloss,
            "annotation": self.annotation.to_dict(),
            "provenance": self.provenance.to_dict(),
            "status": self.status.value,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "ExpressionNode":
        return cls(
            id=str(data["id"]),
            surface_text=str(data["surface_text"]),
            language=str(data["language"]),
            gloss=data.get("gloss"),
            annotation=AnnotationRecord.from_dict(data["annotation"]),
            provenance=Provenance.from_dict(data["provenance"]),
            status=NodeStatus(data["status"]),
        )


@dataclass(frozen=True)
class ConceptNode:
    id: str
    code: str
    framework: Framework
    label: str
    description: Optional[str] = None

    def to_dict(self) -> dict:
        return {
            "id": self.id,
            "code": self.code,
            "framework": self.framework.value,
            "label": self.label,
            "description": self.description,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "ConceptNode":
        return cls(
            id=str(data["id"]),
            code=str(data["code"]),
            framework=Framework(data["framework"]),
            label=str(data["label"]),
            description=data.get("description"),
        )


Node = Union[ExpressionNode, ConceptNode]


@dataclass(frozen=True)
class Edge:
    id: str
    src: str
    dst: str
    edge_type: EdgeType
    status: EdgeStatus
    model_confidence: float
    rationale: str
    provenance: Provenance
    validator_agreement: Optional[float] = None
    combined_confidence: Optional[float] = None
    parallel_group: Optional[str] = None
    revision_of: Optional[str] = None
    adjudication_note: Optional[str] = None
    parallel_reason: Optional[str] = None

    def to_dict(self) -> dict:
        return {
            "id": self.id,
            "src": self.src,
            "dst": self.dst,
            "edge_type": self.edge_type.value,
            "status": self.status.value,
            "model_confidence": self.model_confidence,
            "validator_agreement": self.validator_agreement,
            "combined_confidence": self.combined_confidence,
            "rationale": self.rationale,
            "provenance": self.provenance.to_dict(),
            "parallel_group": self.parallel_group,
            "revision_of": self.revision_of,
            "adjudication_note": self.adjudication_note,
            "parallel_reason": self.parallel_reason,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "Edge":
        return cls(
            id=str(data["id"]),
            src=str(data["src"]),
            dst=str(data["dst"]),
            edge_type=EdgeType(data["edge_type"]),
            status=EdgeStatus(data["status"]),
            model_confidence=float(data["model_confidence"]),
            rationale=str(data["rationale"]),
            provenance=Provenance.from_dict(data["provenance"]),
            validator_agreement=data.get("validator_agreement"),
            combined_confidence=data.get("combined_confidence"),
            parallel_group=data.get("parallel_group"),
            revision_of=data.get("revision_of"),
            adjudication_note=data.get("adjudication_note"),
            parallel_reason=data.get("parallel_reason"),
        )


def normalize_surface_text(text: str) -> str:
    """NFC normalization plus trimming; case is preserved so romanized and
    native-script variants stay distinct."""
    return unicodedata.normalize("NFC", text).strip()


def _check_confidence(value: float, what: str = "confidence") -> float:
    try:
        value = float(value)
    except (TypeError, ValueError) as exc:
        raise ValidationError(f"{what} is not a number: {value!r}") from exc
    if not 0.0 <= value <= 1.0:
        raise ValidationError(f"{what} {value} outside [0, 1]")
    return value


class OntologyGraph:
    """In-memory store with idempotent insertion and deterministic ordering.

    Node identity: expressions deduplicate on (normalized surface text,
    language); concepts on (code, framework); edges on (src, dst, edge_type).
    Re-adding an existing element returns it unchanged.
    """

    def __init__(self):
        self._expressions: dict[str, ExpressionNode] = {}
        self._concepts: dict[str, ConceptNode] = {}
        self._edges: dict[str, Edge] = {}
        self._expr_by_key: dict[tuple[str, str], str] = {}
        self._concept_by_key: dict[tuple[str, str], str] = {}
        self._edge_by_key: dict[tuple[str, str, EdgeType], str] = {}
        self._expr_seq = 0
        self._concept_seq = 0
        self._edge_seq = 0
        self._group_seq = 0
        # Audit trail of every status change as (edge_id, old, new).
        self.transition_log: list[tuple[str, EdgeStatus, EdgeStatus]] = []

    # ------------------------------------------------------------------
    # Nodes
    # ------------------------------------------------------------------

    def add_expression(
        self,
        surface_text: str,
        language: str,
        annotation: AnnotationRecord,
        provenance: Provenance,
        status: NodeStatus = NodeStatus.ACTIVE,
        gloss: Optional[str] = None,
        node_id: Optional[str] = None,
    ) -> tuple[ExpressionNode, bool]:
        """Insert an expression node; returns (node, created).

        Identical (surface text, language) pairs resolve to the existing node.
        """
        text = normalize_surface_text(surface_text)
        if not text:
            raise ValidationError("surface_text is empty after trimming")
        language = language.strip().lower()
        if not language:
            raise ValidationError("language tag is empty")
        annotation.check()
        provenance.check()

        key = (text, language)
        existing = self._expr_by_key.get(key)
        if existing is not None:
            return self._expressions[existing], False

        node = ExpressionNode(
            id=node_id or self._next_id("expr"),
            surface_text=text,
            language=language,
            gloss=gloss,
            annotation=annotation,
            provenance=provenance,
            status=NodeStatus(status),
        )
        self.insert_expression(node)
        return node, True

    def insert_expression(self, node: ExpressionNode) -> None:
        """Raw insert used by import and event replay; caller owns validation."""
        if node.id in self._expressions or node.id in self._concepts:
            raise ConflictError(f"node id {node.id} already present")
        self._expressions[node.id] = node
        self._expr_by_key[(node.surface_text, node.language)] = node.id
        self._expr_seq = max(self._expr_seq, _id_sequence(node.id, "expr"))

    def add_concept(
        self,
        code: str,
        framework: Framework,
        label: str,
        description: Optional[str] = None,
        node_id: Optional[str] = None,
    ) -> tuple[ConceptNode, bool]:
        """Insert a concept node; returns (node, created).

        A (code, framework) pair is unique: re-adding with the same label
        returns the existing node, a different label is a conflict.
        """
        code = code.strip()
        label = label.strip()
        if not code:
            raise ValidationError("concept code is empty")
        if not label:
            raise ValidationError("concept label is empty")
        framework = Framework(framework)

        key = (code, framework.value)
        existing = self._concept_by_key.get(key)
        if existing is not None:
            node = self._concepts[existing]
            if node.label != label:
                raise ConflictError(
                    f"concept ({code}, {framework.value}) already exists with "
                    f"label {node.label!r}, refusing {label!r}"
                )
            return node, False

        node = ConceptNode(
            id=node_id or self._next_id("conc"),
            code=code,
            framework=framework,
            label=label,
            description=description,
        )
        self.insert_concept(node)
        return node, True

    def insert_concept(self, node: ConceptNode) -> None:
        if node.id in self._concepts or node.id in self._expressions:
            raise ConflictError(f"node id {node.id} already present")
        key = (node.code, node.framework.value)
        if key in self._concept_by_key:
            raise ConflictError(f"duplicate concept key {key}")
        self._concepts[node.id] = node
        self._concept_by_key[key] = node.id
        self._concept_seq = max(self._concept_seq, _id_sequence(node.id, "conc"))

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
        provenance: Provenance,
        revision_of: Optional[str] = None,
        edge_id: Optional[str] = None,
    ) -> tuple[Edge, bool]:
        """Create a Proposed edge; returns (edge, created).

        Endpoint invariants are enforced here: intra-lingual edges join two
        expressions with equal language tags, cross-lingual edges two
        expressions with different tags, expression-concept edges go from an
        expression to a concept.
        """
        edge_type = EdgeType(edge_type)
        model_confidence = _check_confidence(model_confidence, "model_confidence")
        provenance.check()
        self.check_endpoints(src, dst, edge_type)

        key = (src, dst, edge_type)
        existing = self._edge_by_key.get(key)
        if existing is not None:
            return self._edges[existing], False

        edge = Edge(
            id=edge_id or self._next_id("edge"),
            src=src,
            dst=dst,
            edge_type=edge_type,
            status=EdgeStatus.PROPOSED,
            model_confidence=model_confidence,
            rationale=rationale,
            provenance=provenance,
            revision_of=revision_of,
        )
        self.insert_edge(edge)
        return edge, True

    def check_endpoints(self, src: str, dst: str, edge_type: EdgeType) -> None:
        src_node = self.node(src)
        dst_node = self.node(dst)
        if edge_type is EdgeType.EXPRESSION_CONCEPT:
            if not isinstance(src_node, ExpressionNode) or not isinstance(
                dst_node, ConceptNode
            ):
                raise EdgeKindError(
                    "ExpressionConcept edges go from an expression to a concept"
                )
            return
        if not isinstance(src_node, ExpressionNode) or not isinstance(
            dst_node, ExpressionNode
        ):
            raise EdgeKindError(
                f"{edge_type.value} edges need expression nodes at both ends"
            )
        if edge_type is EdgeType.INTRA_LINGUAL and src_node.language != dst_node.language:
            raise EdgeKindError(
                f"IntraLingual edge across languages "
                f"{src_node.language!r} and {dst_node.language!r}"
            )
        if edge_type is EdgeType.CROSS_LINGUAL and src_node.language == dst_node.language:
            raise EdgeKindError(
                f"CrossLingual edge within one language {src_node.language!r}"
            )

    def insert_edge(self, edge: Edge) -> None:
        """Raw insert used by import and event replay; caller owns validation."""
        if edge.id in self._edges:
            raise ConflictError(f"edge id {edge.id} already present")
        self._edges[edge.id] = edge
        self._edge_by_key[(edge.src, edge.dst, edge.edge_type)] = edge.id
        self._edge_seq = max(self._edge_seq, _id_sequence(edge.id, "edge"))

    def set_edge_status(self, edge_id: str, new_status: EdgeStatus) -> Edge:
        """Guarded status transition; raises StateError off the table."""
        edge = self.edge(edge_id)
        new_status = EdgeStatus(new_status)
        if (edge.status, new_status) not in ALLOWED_TRANSITIONS:
            raise StateError(
                f"edge {edge_id}: illegal transition "
                f"{edge.status.value} -> {new_status.value}"
            )
        updated = replace(edge, status=new_status)
        self._edges[edge_id] = updated
        self.transition_log.append((edge_id, edge.status, new_status))
        return updated

    def update_edge(self, edge_id: str, **changes) -> Edge:
        """Update non-status metadata fields (confidences, notes, grouping)."""
        if "status" in changes:
            raise ValidationError("status changes go through set_edge_status")
        edge = self.edge(edge_id)
        updated = replace(edge, **changes)
        self._edges[edge_id] = updated
        return updated

    def retain_parallel(self, edge_ids: list[str], reasons: list[str]) -> str:
        """Keep several adjudicated interpretations side by side.

        All edges must share one source expression and sit in Adjudication;
        each gets the same parallel group id and its own stated reason.
        """
        if len(edge_ids) < 2:
            raise ValidationError(
                "parallel retention needs at least two interpretations"
            )
        if len(reasons) != len(edge_ids):
            raise ValidationError(
                f"{len(edge_ids)} edges but {len(reasons)} reasons; one reason "
                "per retained edge is required"
            )
        if len(set(edge_ids)) != len(edge_ids):
            raise ValidationError("duplicate edge ids in parallel retention")
        edges = [self.edge(eid) for eid in edge_ids]
        sources = {e.src for e in edges}
        if len(sources) != 1:
            raise ValidationError(
                f"parallel edges must share one source, got {sorted(sources)}"
            )
        for e in edges:
            if e.status is not EdgeStatus.ADJUDICATION:
                raise StateError(
                    f"edge {e.id} is {e.status.value}, expected Adjudication"
                )
        group_id = self._next_group_id()
        for eid, reason in zip(edge_ids, reasons):
            self.set_edge_status(eid, EdgeStatus.PARALLEL_RETAINED)
            self.update_edge(eid, parallel_group=group_id, parallel_reason=reason)
        return group_id

    # ------------------------------------------------------------------
    # Queries
    # ------------------------------------------------------------------

    def node(self, node_id: str) -> Node:
        node = self._expressions.get(node_id) or self._concepts.get(node_id)
        if node is None:
            raise NotFoundError(f"unknown node {node_id!r}")
        return node

    def expression(self, node_id: str) -> ExpressionNode:
        node = self.node(node_id)
        if not isinstance(node, ExpressionNode):
            raise ValidationError(f"node {node_id} is not an expression")
        return node

    def concept(self, node_id: str) -> ConceptNode:
        node = self.node(node_id)
        if not isinstance(node, ConceptNode):
            raise ValidationError(f"node {node_id} is not a concept")
        return node

    def edge(self, edge_id: str) -> Edge:
        edge = self._edges.get(edge_id)
        if edge is None:
            raise NotFoundError(f"unknown edge {edge_id!r}")
        return edge

    def has_node(self, node_id: str) -> bool:
        return node_id in self._expressions or node_id in self._concepts

    def expressions(self) -> list[ExpressionNode]:
        return [self._expressions[i] for i in sorted(self._expressions)]

    def concepts(self) -> list[ConceptNode]:
        return [self._concepts[i] for i in sorted(self._concepts)]

    def edges(self) -> list[Edge]:
        return [self._edges[i] for i in sorted(self._edges)]

    def find_expression(self, surface_text: str, language: str) -> Optional[ExpressionNode]:
        key = (normalize_surface_text(surface_text), language.strip().lower())
        node_id = self._expr_by_key.get(key)
        return self._expressions[node_id] if node_id else None

    def find_concept(self, code: str, framework: Framework) -> Optional[ConceptNode]:
        node_id = self._concept_by_key.get((code, Framework(framework).value))
        return self._concepts[node_id] if node_id else None

    def find_edge(self, src: str, dst: str, edge_type: EdgeType) -> Optional[Edge]:
        edge_id = self._edge_by_key.get((src, dst, EdgeType(edge_type)))
        return self._edges[edge_id] if edge_id else None

    def neighbors(
        self,
        node_id: str,
        edge_type: Optional[EdgeType] = None,
        statuses: Optional[Iterable[EdgeStatus]] = None,
    ) -> list[tuple[Edge, Node]]:
        """All incident edges with the node on the far side, ordered by edge id."""
        self.node(node_id)
        wanted = None if statuses is None else {EdgeStatus(s) for s in statuses}
        out = []
        for edge in self.edges():
            if node_id not in (edge.src, edge.dst):
                continue
            if edge_type is not None and edge.edge_type is not EdgeType(edge_type):
                continue
            if wanted is not None and edge.status not in wanted:
                continue
            other = edge.dst if edge.src == node_id else edge.src
            out.append((edge, self.node(other)))
        return out

    # ------------------------------------------------------------------
    # Interchange document
    # ------------------------------------------------------------------

    def export_document(
        self, edge_extra: Optional[Callable[[Edge], dict]] = None
    ) -> dict:
        """Graph document: arrays of expressions, concepts, edges sorted by id.

        ``edge_extra`` lets callers attach additional per-edge payload (the
        engine embeds explanation bundles this way).
        """
        edges = []
        for edge in self.edges():
            item = edge.to_dict()
            if edge_extra is not None:
                item.update(edge_extra(edge))
            edges.append(item)
        return {
            "expressions": [n.to_dict() for n in self.expressions()],
            "concepts": [n.to_dict() for n in self.concepts()],
            "edges": edges,
        }

    @classmethod
    def from_document(cls, doc: dict) -> "OntologyGraph":
        """Parse a graph document, validating structure and referential
        integrity; raises ParseError naming the offending element."""
        graph = cls()
        if not isinstance(doc, dict):
            raise ParseError("graph document must be a JSON object")
        for section in ("expressions", "concepts", "edges"):
            if not isinstance(doc.get(section), list):
                raise ParseError(f"missing or non-array section {section!r}")
        for i, item in enumerate(doc["expressions"]):
            where = f"expressions[{i}]"
            try:
                graph.insert_expression(ExpressionNode.from_dict(item))
            except (ValidationError, ConflictError, KeyError, ValueError) as exc:
                raise ParseError(str(exc), location=where) from exc
        for i, item in enumerate(doc["concepts"]):
            where = f"concepts[{i}]"
            try:
                graph.insert_concept(ConceptNode.from_dict(item))
            except (ValidationError, ConflictError, KeyError, ValueError) as exc:
                raise ParseError(str(exc), location=where) from exc
        for i, item in enumerate(doc["edges"]):
            where = f"edges[{i}]"
            try:
                edge = Edge.from_dict(item)
            except (ValidationError, KeyError, ValueError) as exc:
                raise ParseError(str(exc), location=where) from exc
            where = f"edges[{i}] ({edge.id})"
            for endpoint in (edge.src, edge.dst):
                if not graph.has_node(endpoint):
                    raise ParseError(
                        f"edge references missing node {endpoint!r}", location=where
                    )
            try:
                graph.check_endpoints(edge.src, edge.dst, edge.edge_type)
                graph.insert_edge(edge)
            except (EdgeKindError, ConflictError, ValidationError) as exc:
                raise ParseError(str(exc), location=where) from exc
        return graph

    def integrity_problems(self) -> list[str]:
        """Full-graph scan of the structural invariants; empty when clean."""
        problems = []
        for edge in self.edges():
            for endpoint in (edge.src, edge.dst):
                if not self.has_node(endpoint):
                    problems.append(f"edge {edge.id}: dangling endpoint {endpoint}")
            try:
                self.check_endpoints(edge.src, edge.dst, edge.edge_type)
            except (EdgeKindError, NotFoundError) as exc:
                problems.append(f"edge {edge.id}: {exc}")
            for value, name in (
                (edge.model_confidence, "model_confidence"),
                (edge.validator_agreement, "validator_agreement"),
                (edge.combined_confidence, "combined_confidence"),
            ):
                if value is not None and not 0.0 <= value <= 1.0:
                    problems.append(f"edge {edge.id}: {name} {value} outside [0, 1]")
        by_group: dict[str, set[str]] = {}
        for edge in self.edges():
            if edge.parallel_group:
                by_group.setdefault(edge.parallel_group, set()).add(edge.src)
        for group, sources in by_group.items():
            if len(sources) != 1:
                problems.append(f"parallel group {group} spans sources {sorted(sources)}")
        return problems

    # ------------------------------------------------------------------
    # Id helpers
    # ------------------------------------------------------------------

    def _next_id(self, prefix: str) -> str:
        attr = {"expr": "_expr_seq", "conc": "_concept_seq", "edge": "_edge_seq"}[prefix]
        pool = {
            "expr": self._expressions,
            "conc": self._concepts,
            "edge": self._edges,
        }[prefix]
        seq = getattr(self, attr)
        while True:
            seq += 1
            candidate = f"{prefix}-{seq:06d}"
            if candidate not in pool:
                setattr(self, attr, seq)
                return candidate

    def peek_next_id(self, prefix: str) -> str:
        """The id the next insert will take, without reserving it."""
        attr = {"expr": "_expr_seq", "conc": "_concept_seq", "edge": "_edge_seq"}[prefix]
        pool = {
            "expr": self._expressions,
            "conc": self._concepts,
            "edge": self._edges,
        }[prefix]
        seq = getattr(self, attr)
        while True:
            seq += 1
            candidate = f"{prefix}-{seq:06d}"
            if candidate not in pool:
                return candidate

    def _next_group_id(self) -> str:
        self._group_seq += 1
        return f"pg-{self._group_seq:04d}"


def _id_sequence(node_id: str, prefix: str) -> int:
    """Numeric suffix of a generated id; 0 for foreign id formats."""
    marker = prefix + "-"
    if node_id.startswith(marker):
        tail = node_id[len(marker):]
        if tail.isdigit():
            return int(tail)
    return 0


def canonical_json_bytes(obj) -> bytes:
    """Stable UTF-8 serialization: sorted keys, two-space indent, real
    Unicode (no escape sequences), trailing newline."""
    return (json.dumps(obj, ensure_ascii=False, sort_keys=True, indent=2) + "\n").encode(
        "utf-8"
    )
