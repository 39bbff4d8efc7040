"""Human-in-the-loop validation workflow over the ontology graph.

Proposed edges are enqueued for review by three expert roles (linguistic,
clinical, cultural).  The queue is uncertainty-ordered and batched by a
grouping key so one expert sees related candidates together.  Once every
required role has decided, decisions aggregate: unanimity settles the edge,
any modification supersedes it with a revised proposal, and accept/reject
conflicts go to adjudication, where consensus or parallel retention ends the
round.  A proportional feedback controller nudges the proposal threshold
toward a target reject rate.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Optional, Sequence

from .errors import NotFoundError, StateError, ValidationError
from .graph import Edge, EdgeStatus, EdgeType, OntologyGraph


class ValidatorRole(str, Enum):
    LINGUISTIC = "linguistic"
    CLINICAL = "clinical"
    CULTURAL = "cultural"


# Precedence when several modifications compete in one aggregation.
_ROLE_ORDER = {
    ValidatorRole.LINGUISTIC: 0,
    ValidatorRole.CLINICAL: 1,
    ValidatorRole.CULTURAL: 2,
}


class Verdict(str, Enum):
    ACCEPT = "accept"
    REJECT = "reject"
    MODIFY = "modify"


class AdjudicationOutcome(str, Enum):
    CONSENSUS_ACCEPT = "consensus_accept"
    CONSENSUS_REJECT = "consensus_reject"
    RETAIN_PARALLEL = "retain_parallel"


@dataclass(frozen=True)
class Modification:
    """Redirect of a reviewed edge: new destination and/or new edge type."""

    new_dst: Optional[str] = None
    new_edge_type: Optional[EdgeType] = None

    def is_empty(self) -> bool:
        return self.new_dst is None and self.new_edge_type is None

    def to_dict(self) -> dict:
        return {
            "new_dst": self.new_dst,
            "new_edge_type": self.new_edge_type.value if self.new_edge_type else None,
        }

    @classmethod
    def from_dict(cls, data: Optional[dict]) -> Optional["Modification"]:
        if data is None:
            return None
        new_type = data.get("new_edge_type")
        return cls(
            new_dst=data.get("new_dst"),
            new_edge_type=EdgeType(new_type) if new_type else None,
        )


@dataclass(frozen=True)
class ValidationDecision:
    edge_id: str
    validator_id: str
    role: ValidatorRole
    verdict: Verdict
    comment: str = ""
    modification: Optional[Modification] = None
    decided_at: str = ""

    def check(self) -> None:
        if not self.validator_id.strip():
            raise ValidationError("validator_id is empty")
        if self.verdict is Verdict.MODIFY and (
            self.modification is None or self.modification.is_empty()
        ):
            raise ValidationError("modify verdict requires a modification")

    def to_dict(self) -> dict:
        return {
            "edge_id": self.edge_id,
            "validator_id": self.validator_id,
            "role": self.role.value,
            "verdict": self.verdict.value,
            "comment": self.comment,
            "modification": self.modification.to_dict() if self.modification else None,
            "decided_at": self.decided_at,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "ValidationDecision":
        try:
            return cls(
                edge_id=str(data["edge_id"]),
                validator_id=str(data["validator_id"]),
                role=ValidatorRole(data["role"]),
                verdict=Verdict(data["verdict"]),
                comment=str(data.get("comment", "")),
                modification=Modification.from_dict(data.get("modification")),
                decided_at=str(data.get("decided_at", "")),
            )
        except (KeyError, ValueError, TypeError) as exc:
            raise ValidationError(f"bad decision record: {exc}") from exc


@dataclass(frozen=True)
class QueueItem:
    edge_id: str
    priority: float
    batch_key: str
    enqueued_at: str

    def to_dict(self) -> dict:
        return {
            "edge_id": self.edge_id,
            "priority": self.priority,
            "batch_key": self.batch_key,
            "enqueued_at": self.enqueued_at,
        }


@dataclass
class WorkflowConfig:
    alpha: float = 0.5
    required_roles: frozenset[ValidatorRole] = frozenset(ValidatorRole)
    tau: float = 0.70
    tau_align: float = 0.85
    eta: float = 0.1
    target_reject_rate: float = 0.2
    tau_bounds: tuple[float, float] = (0.5, 0.95)

    def check(self) -> None:
        for name in ("alpha", "eta", "target_reject_rate"):
            value = getattr(self, name)
            if not 0.0 <= value <= 1.0:
                raise ValidationError(f"{name} {value} outside [0, 1]")
        lo, hi = self.tau_bounds
        if not lo <= hi:
            raise ValidationError(f"tau_bounds {self.tau_bounds} inverted")
        if not lo <= self.tau <= hi:
            raise ValidationError(f"tau {self.tau} outside bounds {self.tau_bounds}")
        if not 0.0 <= self.tau_align <= 1.0:
            raise ValidationError(f"tau_align {self.tau_align} outside [0, 1]")
        if not self.required_roles:
            raise ValidationError("required_roles is empty")

    def to_dict(self) -> dict:
        return {
            "alpha": self.alpha,
            "required_roles": sorted(r.value for r in self.required_roles),
            "tau": self.tau,
            "tau_align": self.tau_align,
            "eta": self.eta,
            "target_reject_rate": self.target_reject_rate,
            "tau_bounds": list(self.tau_bounds),
        }

    @classmethod
    def from_dict(cls, data: dict) -> "WorkflowConfig":
        try:
            config = cls(
                alpha=float(data.get("alpha", 0.5)),
                required_roles=frozenset(
                    ValidatorRole(r) for r in data.get("required_roles", [r.value for r in ValidatorRole])
                ),
                tau=float(data.get("tau", 0.70)),
                tau_align=float(data.get("tau_align", 0.85)),
                eta=float(data.get("eta", 0.1)),
                target_reject_rate=float(data.get("target_reject_rate", 0.2)),
                tau_bounds=tuple(data.get("tau_bounds", (0.5, 0.95))),
            )
        except (KeyError, ValueError, TypeError) as exc:
            raise ValidationError(f"bad workflow config: {exc}") from exc
        config.check()
        return config


def uncertainty(confidence: float) -> float:
    """u = 1 - |2c - 1|: maximal at 0.5, zero at either end."""
    if not 0.0 <= confidence <= 1.0:
        raise ValidationError(f"confidence {confidence} outside [0, 1]")
    return 1.0 - abs(2.0 * confidence - 1.0)


def combined_confidence(
    model_confidence: float,
    decisions: Sequence[ValidationDecision],
    alpha: float,
) -> float:
    """alpha-weighted blend of the model estimate and validator agreement.

    Agreement a = accepts / (accepts + rejects); modifications count as
    neither.  Without any accept or reject, the model estimate stands.
    """
    if not 0.0 <= model_confidence <= 1.0:
        raise ValidationError(f"model_confidence {model_confidence} outside [0, 1]")
    if not 0.0 <= alpha <= 1.0:
        raise ValidationError(f"alpha {alpha} outside [0, 1]")
    accepts = sum(1 for d in decisions if d.verdict is Verdict.ACCEPT)
    rejects = sum(1 for d in decisions if d.verdict is Verdict.REJECT)
    if accepts + rejects == 0:
        return model_confidence
    agreement = accepts / (accepts + rejects)
    return alpha * model_confidence + (1.0 - alpha) * agreement


def validator_agreement(decisions: Sequence[ValidationDecision]) -> Optional[float]:
    accepts = sum(1 for d in decisions if d.verdict is Verdict.ACCEPT)
    rejects = sum(1 for d in decisions if d.verdict is Verdict.REJECT)
    if accepts + rejects == 0:
        return None
    return accepts / (accepts + rejects)


@dataclass(frozen=True)
class DecisionOutcome:
    """Result of one submitted decision: the (possibly transitioned) edge and,
    for an aggregated modification, the revised proposal."""

    edge: Edge
    aggregated: bool = False
    revised_edge: Optional[Edge] = None


class Workflow:
    """Queue, decision, adjudication, and threshold state for one graph.

    All mutations go through the graph's guarded transition API, so the
    transition log doubles as the workflow audit trail.
    """

    def __init__(self, graph: OntologyGraph, config: Optional[WorkflowConfig] = None):
        self.graph = graph
        self.config = config or WorkflowConfig()
        self.config.check()
        self.queue: dict[str, QueueItem] = {}
        self.decisions: dict[str, dict[str, ValidationDecision]] = {}
        # Terminal statuses in the order edges settled; feeds the threshold
        # feedback controller.
        self.terminal_log: list[EdgeStatus] = []

    # ------------------------------------------------------------------
    # Queueing
    # ------------------------------------------------------------------

    def batch_key(self, edge: Edge) -> str:
        if edge.edge_type is EdgeType.EXPRESSION_CONCEPT:
            return f"{edge.dst}|{edge.edge_type.value}"
        src = self.graph.node(edge.src)
        dst = self.graph.node(edge.dst)
        langs = sorted([src.language, dst.language])
        return f"{langs[0]}-{langs[1]}|{edge.edge_type.value}"

    def enqueue(self, edge_id: str, enqueued_at: str = "") -> QueueItem:
        """Move a Proposed edge under validation and queue it by uncertainty."""
        edge = self.graph.edge(edge_id)
        if edge.status is not EdgeStatus.PROPOSED:
            raise StateError(
                f"edge {edge_id} is {edge.status.value}, only Proposed edges enqueue"
            )
        item = QueueItem(
            edge_id=edge_id,
            priority=uncertainty(edge.model_confidence),
            batch_key=self.batch_key(edge),
            enqueued_at=enqueued_at,
        )
        self.graph.set_edge_status(edge_id, EdgeStatus.UNDER_VALIDATION)
        self.queue[edge_id] = item
        return item

    def pending_for_role(self, role: ValidatorRole) -> list[QueueItem]:
        """Queue items this role has not decided yet, priority order."""
        role = ValidatorRole(role)
        items = [
            item
            for item in self.queue.values()
            if not any(
                d.role is role for d in self.decisions.get(item.edge_id, {}).values()
            )
        ]
        items.sort(key=lambda it: (-it.priority, it.edge_id))
        return items

    def next_batch(self, role: ValidatorRole, batch_size: int) -> list[QueueItem]:
        """Up to batch_size undecided items sharing the batch key of the
        current highest-priority item for this role."""
        if batch_size < 1:
            raise ValidationError(f"batch_size must be positive, got {batch_size}")
        pending = self.pending_for_role(role)
        if not pending:
            return []
        key = pending[0].batch_key
        return [item for item in pending if item.batch_key == key][:batch_size]

    def _dequeue(self, edge_id: str) -> None:
        self.queue.pop(edge_id, None)

    # ------------------------------------------------------------------
    # Decisions
    # ------------------------------------------------------------------

    def decisions_for(self, edge_id: str) -> list[ValidationDecision]:
        return [
            self.decisions.get(edge_id, {})[v]
            for v in sorted(self.decisions.get(edge_id, {}))
        ]

    def submit_decision(self, decision: ValidationDecision) -> DecisionOutcome:
        """Record one validator's verdict; aggregate once all roles are in.

        Resubmission by the same validator replaces the earlier decision.
        During adjudication, decisions are recorded as deliberation input but
        trigger no transition; resolve_adjudication settles the edge.
        """
        decision.check()
        edge = self.graph.edge(decision.edge_id)
        if decision.role not in self.config.required_roles:
            raise ValidationError(
                f"role {decision.role.value} is not part of this workflow"
            )
        if edge.status not in (EdgeStatus.UNDER_VALIDATION, EdgeStatus.ADJUDICATION):
            raise StateError(
                f"edge {edge.id} is {edge.status.value}, decisions need "
                "UnderValidation or Adjudication"
            )
        if decision.verdict is Verdict.MODIFY and decision.modification.new_dst:
            if not self.graph.has_node(decision.modification.new_dst):
                raise NotFoundError(
                    f"modification target {decision.modification.new_dst!r} unknown"
                )

        self.decisions.setdefault(edge.id, {})[decision.validator_id] = decision
        recorded = self.decisions_for(edge.id)
        edge = self.graph.update_edge(
            edge.id,
            validator_agreement=validator_agreement(recorded),
            combined_confidence=combined_confidence(
                edge.model_confidence, recorded, self.config.alpha
            ),
        )

        if edge.status is not EdgeStatus.UNDER_VALIDATION:
            return DecisionOutcome(edge=edge)
        decided_roles = {d.role for d in recorded}
        if not self.config.required_roles <= decided_roles:
            return DecisionOutcome(edge=edge)
        return self._aggregate(edge, recorded)

    def _aggregate(
        self, edge: Edge, recorded: list[ValidationDecision]
    ) -> DecisionOutcome:
        modifies = [d for d in recorded if d.verdict is Verdict.MODIFY]
        if modifies:
            winner = min(
                modifies, key=lambda d: (_ROLE_ORDER[d.role], d.validator_id)
            )
            return self._apply_modification(edge, winner)
        verdicts = {d.verdict for d in recorded}
        if verdicts == {Verdict.ACCEPT}:
            edge = self._settle(edge.id, EdgeStatus.ACCEPTED)
        elif verdicts == {Verdict.REJECT}:
            edge = self._settle(edge.id, EdgeStatus.REJECTED)
        else:
            edge = self.graph.set_edge_status(edge.id, EdgeStatus.ADJUDICATION)
            self._dequeue(edge.id)
        return DecisionOutcome(edge=edge, aggregated=True)

    def _apply_modification(
        self, edge: Edge, decision: ValidationDecision
    ) -> DecisionOutcome:
        mod = decision.modification
        new_dst = mod.new_dst or edge.dst
        new_type = mod.new_edge_type or edge.edge_type
        rationale = (
            f"Revision of {edge.id} after {decision.role.value} review"
            f"{': ' + decision.comment if decision.comment else ''}"
        )
        revised, _ = self.graph.add_edge(
            src=edge.src,
            dst=new_dst,
            edge_type=new_type,
            model_confidence=edge.model_confidence,
            rationale=rationale,
            provenance=edge.provenance,
            revision_of=edge.id,
        )
        superseded = self._settle(edge.id, EdgeStatus.SUPERSEDED)
        return DecisionOutcome(edge=superseded, aggregated=True, revised_edge=revised)

    def _settle(self, edge_id: str, status: EdgeStatus) -> Edge:
        edge = self.graph.set_edge_status(edge_id, status)
        self._dequeue(edge_id)
        self.terminal_log.append(status)
        return edge

    # ------------------------------------------------------------------
    # Adjudication
    # ------------------------------------------------------------------

    def resolve_adjudication(
        self,
        edge_id: str,
        outcome: AdjudicationOutcome,
        parallel_edges: Optional[Sequence[str]] = None,
        reasons: Optional[Sequence[str]] = None,
        note: str = "",
    ) -> list[Edge]:
        """Settle an adjudicated edge by consensus or parallel retention."""
        outcome = AdjudicationOutcome(outcome)
        edge = self.graph.edge(edge_id)
        if edge.status is not EdgeStatus.ADJUDICATION:
            raise StateError(
                f"edge {edge_id} is {edge.status.value}, expected Adjudication"
            )
        note = note or f"adjudication: {outcome.value}"
        if outcome is AdjudicationOutcome.CONSENSUS_ACCEPT:
            self.graph.update_edge(edge_id, adjudication_note=note)
            return [self._settle(edge_id, EdgeStatus.ACCEPTED)]
        if outcome is AdjudicationOutcome.CONSENSUS_REJECT:
            self.graph.update_edge(edge_id, adjudication_note=note)
            return [self._settle(edge_id, EdgeStatus.REJECTED)]

        if not parallel_edges or not reasons:
            raise ValidationError(
                "retain_parallel needs parallel_edges and matching reasons"
            )
        if edge_id not in parallel_edges:
            raise ValidationError(
                f"adjudicated edge {edge_id} missing from parallel_edges"
            )
        self.graph.retain_parallel(list(parallel_edges), list(reasons))
        settled = []
        for eid in parallel_edges:
            self.graph.update_edge(eid, adjudication_note=note)
            self._dequeue(eid)
            self.terminal_log.append(EdgeStatus.PARALLEL_RETAINED)
            settled.append(self.graph.edge(eid))
        return settled

    # ------------------------------------------------------------------
    # Threshold feedback
    # ------------------------------------------------------------------

    def update_thresholds(self, window: Sequence[EdgeStatus]) -> float:
        """Proportional controller on the reject rate of a settled window.

        tau' = clamp(tau + eta * (reject_rate - target), bounds); windows
        without accept/reject outcomes leave tau untouched.
        """
        if not window:
            raise ValidationError("threshold update needs a non-empty window")
        accepts = sum(1 for s in window if EdgeStatus(s) is EdgeStatus.ACCEPTED)
        rejects = sum(1 for s in window if EdgeStatus(s) is EdgeStatus.REJECTED)
        if accepts + rejects == 0:
            return self.config.tau
        rate = rejects / (accepts + rejects)
        lo, hi = self.config.tau_bounds
        new_tau = self.config.tau + self.config.eta * (rate - self.config.target_reject_rate)
        self.config.tau = min(hi, max(lo, new_tau))
        return self.config.tau


__all__ = [
    "AdjudicationOutcome",
    "DecisionOutcome",
    "Modification",
    "QueueItem",
    "ValidationDecision",
    "ValidatorRole",
    "Verdict",
    "Workflow",
    "WorkflowConfig",
    "combined_confidence",
    "uncertainty",
    "validator_agreement",
]
