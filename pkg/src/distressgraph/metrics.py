"""Intrinsic graph metrics and review-efficiency accounting.

Everything here is a pure function of a graph snapshot (plus an embedding
store for coherence), so repeated computation over the same state is
identical.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

import numpy as np

from .embedding import EmbeddingStore
from .events import EventKind, EventRecord
from .graph import Edge, EdgeStatus, EdgeType, OntologyGraph

# Edge statuses that still carry structural weight.  Rejected and Superseded
# edges are historical record only.
LIVE_STATUSES = frozenset(
    s for s in EdgeStatus if s not in (EdgeStatus.REJECTED, EdgeStatus.SUPERSEDED)
)
RETAINED_STATUSES = frozenset({EdgeStatus.ACCEPTED, EdgeStatus.PARALLEL_RETAINED})


@dataclass(frozen=True)
class GraphMetrics:
    node_counts: dict
    edge_counts_by_type: dict
    edge_counts_by_status: dict
    weakly_connected_components: int
    mean_degree: float
    isolated_expression_ratio: float
    concept_coverage: float

    def to_dict(self) -> dict:
        return {
            "node_counts": dict(self.node_counts),
            "edge_counts_by_type": dict(self.edge_counts_by_type),
            "edge_counts_by_status": dict(self.edge_counts_by_status),
            "weakly_connected_components": self.weakly_connected_components,
            "mean_degree": self.mean_degree,
            "isolated_expression_ratio": self.isolated_expression_ratio,
            "concept_coverage": self.concept_coverage,
        }


def _live_adjacency(graph: OntologyGraph, statuses: frozenset) -> dict:
    adjacency: dict[str, set[str]] = {n.id: set() for n in graph.expressions()}
    for node in graph.concepts():
        adjacency[node.id] = set()
    for edge in graph.edges():
        if edge.status in statuses:
            adjacency[edge.src].add(edge.dst)
            adjacency[edge.dst].add(edge.src)
    return adjacency


def _component_count(adjacency: dict) -> int:
    seen: set[str] = set()
    components = 0
    for start in adjacency:
        if start in seen:
            continue
        components += 1
        stack = [start]
        seen.add(start)
        while stack:
            current = stack.pop()
            for neighbor in adjacency[current]:
                if neighbor not in seen:
                    seen.add(neighbor)
                    stack.append(neighbor)
    return components


def _covered_expressions(graph: OntologyGraph) -> set[str]:
    """Expression ids with a path to any concept through Accepted edges."""
    adjacency = _live_adjacency(graph, RETAINED_STATUSES)
    concept_ids = {n.id for n in graph.concepts()}
    # Flood outward from every concept; anything reached is covered.
    seen: set[str] = set(concept_ids)
    stack = list(concept_ids)
    while stack:
        current = stack.pop()
        for neighbor in adjacency.get(current, ()):
            if neighbor not in seen:
                seen.add(neighbor)
                stack.append(neighbor)
    return {n.id for n in graph.expressions() if n.id in seen}


def connectivity_metrics(graph: OntologyGraph) -> GraphMetrics:
    expressions = graph.expressions()
    concepts = graph.concepts()
    edges = graph.edges()
    node_counts = {"expression": len(expressions), "concept": len(concepts)}
    by_type: dict[str, int] = {t.value: 0 for t in EdgeType}
    by_status: dict[str, int] = {s.value: 0 for s in EdgeStatus}
    for edge in edges:
        by_type[edge.edge_type.value] += 1
        by_status[edge.status.value] += 1

    adjacency = _live_adjacency(graph, LIVE_STATUSES)
    total_nodes = len(adjacency)
    if total_nodes == 0:
        return GraphMetrics(
            node_counts=node_counts,
            edge_counts_by_type=by_type,
            edge_counts_by_status=by_status,
            weakly_connected_components=0,
            mean_degree=0.0,
            isolated_expression_ratio=0.0,
            concept_coverage=0.0,
        )

    live_edge_count = sum(1 for e in edges if e.status in LIVE_STATUSES)
    mean_degree = 2.0 * live_edge_count / total_nodes
    if expressions:
        isolated = sum(1 for n in expressions if not adjacency[n.id])
        isolated_ratio = isolated / len(expressions)
        coverage = len(_covered_expressions(graph)) / len(expressions)
    else:
        isolated_ratio = 0.0
        coverage = 0.0
    return GraphMetrics(
        node_counts=node_counts,
        edge_counts_by_type=by_type,
        edge_counts_by_status=by_status,
        weakly_connected_components=_component_count(adjacency),
        mean_degree=mean_degree,
        isolated_expression_ratio=isolated_ratio,
        concept_coverage=coverage,
    )


def semantic_coherence(
    graph: OntologyGraph, store: EmbeddingStore, provider_id: str
) -> Optional[float]:
    """Intra-concept minus inter-concept mean pairwise cosine.

    Groups expressions by the concepts they are linked to through Accepted
    edges.  Returns None when no concept has two linked expressions or when
    there is no cross-concept pair to compare against.
    """
    groups: dict[str, list[str]] = {}
    for edge in graph.edges():
        if (
            edge.edge_type is EdgeType.EXPRESSION_CONCEPT
            and edge.status in RETAINED_STATUSES
        ):
            groups.setdefault(edge.dst, []).append(edge.src)
    groups = {
        concept: sorted(set(members)) for concept, members in sorted(groups.items())
    }
    if not any(len(members) >= 2 for members in groups.values()):
        return None

    vectors: dict[str, np.ndarray] = {}
    for members in groups.values():
        for node_id in members:
            if node_id not in vectors:
                vector = np.asarray(store.get(node_id, provider_id), dtype=float)
                norm = np.linalg.norm(vector)
                vectors[node_id] = vector / norm if norm else vector

    def cos(a: str, b: str) -> float:
        return float(np.clip(np.dot(vectors[a], vectors[b]), -1.0, 1.0))

    intra: list[float] = []
    for members in groups.values():
        for i in range(len(members)):
            for j in range(i + 1, len(members)):
                intra.append(cos(members[i], members[j]))
    inter: list[float] = []
    concept_ids = sorted(groups)
    for i in range(len(concept_ids)):
        for j in range(i + 1, len(concept_ids)):
            for a in groups[concept_ids[i]]:
                for b in groups[concept_ids[j]]:
                    if a != b:
                        inter.append(cos(a, b))
    if not intra or not inter:
        return None
    return float(np.mean(intra) - np.mean(inter))


# ----------------------------------------------------------------------
# Review-efficiency accounting
# ----------------------------------------------------------------------


def candidate_key(src: str, dst: str, edge_type: EdgeType) -> str:
    """Stable identity for a candidate mapping, independent of edge ids."""
    return f"{src}|{dst}|{EdgeType(edge_type).value}"


def edge_key(edge: Edge) -> str:
    return candidate_key(edge.src, edge.dst, edge.edge_type)


@dataclass(frozen=True)
class EfficiencyReport:
    decisions_used: int
    accepted_edge_precision: float
    accepted_edge_recall: float
    f1: float
    decisions_per_accepted_edge: float

    def to_dict(self) -> dict:
        return {
            "decisions_used": self.decisions_used,
            "accepted_edge_precision": self.accepted_edge_precision,
            "accepted_edge_recall": self.accepted_edge_recall,
            "f1": self.f1,
            "decisions_per_accepted_edge": self.decisions_per_accepted_edge,
        }


def precision_recall_f1(
    accepted: Iterable[str], truth: Iterable[str]
) -> tuple[float, float, float]:
    """Set precision/recall/F1 with total conventions.

    Zero accepted edges → precision 1.0; empty truth set → recall 1.0.
    """
    accepted = set(accepted)
    truth = set(truth)
    hits = len(accepted & truth)
    precision = hits / len(accepted) if accepted else 1.0
    recall = hits / len(truth) if truth else 1.0
    f1 = (
        2.0 * precision * recall / (precision + recall)
        if precision + recall > 0
        else 0.0
    )
    return precision, recall, f1


def efficiency_report(
    decisions_used: int,
    accepted_keys: Iterable[str],
    truth_keys: Optional[Iterable[str]] = None,
) -> EfficiencyReport:
    accepted_keys = set(accepted_keys)
    if truth_keys is None:
        # No ground truth: the quality fields are vacuously perfect.
        precision, recall, f1 = 1.0, 1.0, 1.0
    else:
        precision, recall, f1 = precision_recall_f1(accepted_keys, truth_keys)
    per_edge = decisions_used / len(accepted_keys) if accepted_keys else 0.0
    return EfficiencyReport(
        decisions_used=decisions_used,
        accepted_edge_precision=precision,
        accepted_edge_recall=recall,
        f1=f1,
        decisions_per_accepted_edge=per_edge,
    )


def hitl_efficiency(
    records: Sequence[EventRecord],
    truth_keys: Optional[Iterable[str]] = None,
) -> EfficiencyReport:
    """Efficiency of a recorded review run.

    A decision is one submitted validator verdict or one adjudication
    resolution.  Accepted edges are read from a replay of the log, so the
    report matches the live system exactly.  Without a ground-truth set the
    precision/recall fields use the vacuous 1.0 convention.
    """
    from .engine import Engine

    records = list(records)
    if not records:
        return EfficiencyReport(0, 1.0, 1.0, 1.0, 0.0)
    decisions_used = sum(
        1
        for r in records
        if r.kind
        in (EventKind.DECISION_SUBMITTED, EventKind.ADJUDICATION_RESOLVED)
    )
    engine = Engine.from_events(records)
    accepted = [
        edge_key(e) for e in engine.graph.edges() if e.status in RETAINED_STATUSES
    ]
    return efficiency_report(decisions_used, accepted, truth_keys)


__all__ = [
    "EfficiencyReport",
    "GraphMetrics",
    "LIVE_STATUSES",
    "RETAINED_STATUSES",
    "candidate_key",
    "connectivity_metrics",
    "edge_key",
    "efficiency_report",
    "hitl_efficiency",
    "precision_recall_f1",
    "semantic_coherence",
]
