"""Candidate edge generation and alignment of new expressions.

Three proposal paths feed the validation workflow:

* embedding k-nearest-neighbor search for intra- and cross-lingual links,
* a pluggable mapping proposer for expression-to-concept candidates,
* alignment of incoming text onto the existing graph, falling back to a
  provisional node when nothing is close enough.

All proposals are deterministic for fixed store contents: candidates come
out sorted by score descending, then by endpoint ids.
"""

from __future__ import annotations

import unicodedata
from dataclasses import dataclass
from enum import Enum
from typing import Optional, Protocol, Sequence

import numpy as np

from .embedding import EmbeddingStore, HashedBagEmbedder, is_word_char, normalized_score
from .errors import ProposerError, ValidationError
from .graph import ConceptNode, EdgeType, ExpressionNode, Framework, OntologyGraph

DEFAULT_TAU = 0.70
DEFAULT_TAU_ALIGN = 0.85
DEFAULT_K = 10


@dataclass(frozen=True)
class CandidateEdge:
    src: str
    dst: str
    edge_type: EdgeType
    score: float
    rationale: str
    proposer_id: str

    def to_dict(self) -> dict:
        return {
            "src": self.src,
            "dst": self.dst,
            "edge_type": self.edge_type.value,
            "score": self.score,
            "rationale": self.rationale,
            "proposer_id": self.proposer_id,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "CandidateEdge":
        try:
            return cls(
                src=str(data["src"]),
                dst=str(data["dst"]),
                edge_type=EdgeType(data["edge_type"]),
                score=float(data["score"]),
                rationale=str(data["rationale"]),
                proposer_id=str(data["proposer_id"]),
            )
        except (KeyError, ValueError, TypeError) as exc:
            raise ValidationError(f"bad candidate record: {exc}") from exc


class MappingProposer(Protocol):
    """Ranks concept mappings for one expression.

    Implementations must be deterministic for a fixed configuration and
    input; the workflow records proposer_id with every resulting edge.
    """

    proposer_id: str

    def propose(
        self, node: ExpressionNode, concepts: Sequence[ConceptNode]
    ) -> list[CandidateEdge]:
        ...


@dataclass(frozen=True)
class ProposerEntry:
    """One cue-to-concept rule of the lexicon proposer."""

    cue: str
    language: str
    concept_code: str
    framework: Framework
    rationale_template: str
    base_confidence: float

    @classmethod
    def from_dict(cls, data: dict) -> "ProposerEntry":
        try:
            return cls(
                cue=str(data["cue"]),
                language=str(data["language"]).strip().lower(),
                concept_code=str(data["concept_code"]),
                framework=Framework(data["framework"]),
                rationale_template=str(data["rationale_template"]),
                base_confidence=float(data["base_confidence"]),
            )
        except (KeyError, ValueError, TypeError) as exc:
            raise ValidationError(f"bad proposer entry: {exc}") from exc

    def to_dict(self) -> dict:
        return {
            "cue": self.cue,
            "language": self.language,
            "concept_code": self.concept_code,
            "framework": self.framework.value,
            "rationale_template": self.rationale_template,
            "base_confidence": self.base_confidence,
        }


def contains_phrase(text: str, phrase: str) -> bool:
    """Case-folded literal containment on word boundaries."""
    text = unicodedata.normalize("NFC", text).casefold()
    phrase = unicodedata.normalize("NFC", phrase).casefold()
    if not phrase:
        return False
    start = 0
    while True:
        i = text.find(phrase, start)
        if i < 0:
            return False
        j = i + len(phrase)
        left_ok = i == 0 or not (is_word_char(text[i - 1]) and is_word_char(text[i]))
        right_ok = j >= len(text) or not (
            is_word_char(text[j - 1]) and is_word_char(text[j])
        )
        if left_ok and right_ok:
            return True
        start = i + 1


class LexiconProposer:
    """Deterministic stand-in for a model-driven concept proposer.

    Matches configured cue phrases against the expression text and emits one
    candidate per implied concept, carrying a templated rationale and the
    entry's base confidence.  When several cues point at the same concept the
    strongest one wins.
    """

    def __init__(self, entries: Sequence[ProposerEntry], proposer_id: str = "lexicon-proposer-v1"):
        self.entries = list(entries)
        self.proposer_id = proposer_id

    def propose(
        self, node: ExpressionNode, concepts: Sequence[ConceptNode]
    ) -> list[CandidateEdge]:
        by_key = {(c.code, c.framework): c for c in concepts}
        best: dict[str, CandidateEdge] = {}
        for entry in self.entries:
            if entry.language != node.language:
                continue
            if not contains_phrase(node.surface_text, entry.cue):
                continue
            concept = by_key.get((entry.concept_code, entry.framework))
            if concept is None:
                continue
            rationale = entry.rationale_template.format(
                cue=entry.cue, text=node.surface_text, label=concept.label
            )
            candidate = CandidateEdge(
                src=node.id,
                dst=concept.id,
                edge_type=EdgeType.EXPRESSION_CONCEPT,
                score=entry.base_confidence,
                rationale=rationale,
                proposer_id=self.proposer_id,
            )
            held = best.get(concept.id)
            if held is None or candidate.score > held.score:
                best[concept.id] = candidate
        return sorted(best.values(), key=lambda c: (-c.score, c.dst))

    @classmethod
    def from_dicts(cls, items: Sequence[dict], **kwargs) -> "LexiconProposer":
        return cls([ProposerEntry.from_dict(item) for item in items], **kwargs)


class AlignmentOutcome(str, Enum):
    EXACT = "exact"
    ALIGNED = "aligned"
    PROVISIONAL = "provisional"


@dataclass(frozen=True)
class AlignmentPlan:
    """Decision for one incoming text, before any graph mutation."""

    outcome: AlignmentOutcome
    existing_node_id: Optional[str] = None
    similarity: Optional[float] = None
    edge_type: Optional[EdgeType] = None


class AlignmentEngine:
    """Similarity search over the registered embeddings of a graph."""

    def __init__(
        self,
        graph: OntologyGraph,
        store: EmbeddingStore,
        embedder: Optional[HashedBagEmbedder] = None,
        tau: float = DEFAULT_TAU,
        tau_align: float = DEFAULT_TAU_ALIGN,
        k: int = DEFAULT_K,
    ):
        self.graph = graph
        self.store = store
        self.embedder = embedder or HashedBagEmbedder()
        self.tau = tau
        self.tau_align = tau_align
        self.k = k

    @property
    def provider_id(self) -> str:
        return self.embedder.provider_id

    def ensure_embedding(self, node: ExpressionNode) -> None:
        """Embed the node's surface text unless a vector is already registered."""
        if self.store.get(node.id, self.provider_id) is None:
            self.store.register(
                node.id, self.embedder.embed(node.surface_text), self.provider_id
            )

    # ------------------------------------------------------------------
    # k-NN candidate proposals
    # ------------------------------------------------------------------

    def propose_intra_lingual(
        self, language: str, k: Optional[int] = None, tau: Optional[float] = None
    ) -> list[CandidateEdge]:
        """Top-k same-language neighbor pairs with score at or above tau."""
        language = language.strip().lower()
        ids = [n.id for n in self.graph.expressions() if n.language == language]
        return self._knn_pairs(ids, ids, EdgeType.INTRA_LINGUAL, k, tau)

    def propose_cross_lingual(
        self,
        lang_a: str,
        lang_b: str,
        k: Optional[int] = None,
        tau: Optional[float] = None,
    ) -> list[CandidateEdge]:
        lang_a = lang_a.strip().lower()
        lang_b = lang_b.strip().lower()
        if lang_a == lang_b:
            raise ValidationError(
                f"cross-lingual proposal needs two languages, got {lang_a!r} twice"
            )
        ids_a = [n.id for n in self.graph.expressions() if n.language == lang_a]
        ids_b = [n.id for n in self.graph.expressions() if n.language == lang_b]
        return self._knn_pairs(ids_a, ids_b, EdgeType.CROSS_LINGUAL, k, tau)

    def _knn_pairs(
        self,
        ids_a: list[str],
        ids_b: list[str],
        edge_type: EdgeType,
        k: Optional[int],
        tau: Optional[float],
    ) -> list[CandidateEdge]:
        k = self.k if k is None else k
        tau = self.tau if tau is None else tau
        if k < 1:
            raise ValidationError(f"k must be positive, got {k}")
        kept_a, mat_a = self.store.matrix(self.provider_id, ids_a)
        same_side = ids_a is ids_b
        if same_side:
            kept_b, mat_b = kept_a, mat_a
        else:
            kept_b, mat_b = self.store.matrix(self.provider_id, ids_b)
        if not kept_a or not kept_b:
            return []
        scores = np.clip(mat_a @ mat_b.T, -1.0, 1.0)
        pairs: dict[tuple[str, str], float] = {}
        self._collect_topk(scores, kept_a, kept_b, same_side, k, tau, pairs)
        if not same_side:
            self._collect_topk(scores.T, kept_b, kept_a, False, k, tau, pairs)
        out = [
            CandidateEdge(
                src=src,
                dst=dst,
                edge_type=edge_type,
                score=score,
                rationale=(
                    f"Embedding similarity {score:.6f} under provider "
                    f"{self.provider_id}."
                ),
                proposer_id=f"embedding-knn:{self.provider_id}",
            )
            for (src, dst), score in pairs.items()
        ]
        out.sort(key=lambda c: (-c.score, c.src, c.dst))
        return out

    @staticmethod
    def _collect_topk(
        scores: np.ndarray,
        row_ids: list[str],
        col_ids: list[str],
        same_side: bool,
        k: int,
        tau: float,
        pairs: dict[tuple[str, str], float],
    ) -> None:
        masked = scores.copy()
        if same_side:
            np.fill_diagonal(masked, -np.inf)
        # Stable argsort keeps ties in column order, i.e. ascending node id.
        order = np.argsort(-masked, axis=1, kind="stable")[:, :k]
        for i, row in enumerate(order):
            for j in row:
                cos = masked[i, j]
                if cos == -np.inf:
                    continue
                score = normalized_score(float(cos))
                if score < tau:
                    continue
                a, b = row_ids[i], col_ids[int(j)]
                key = (a, b) if a < b else (b, a)
                held = pairs.get(key)
                if held is None or score > held:
                    pairs[key] = score

    # ------------------------------------------------------------------
    # Concept mapping
    # ------------------------------------------------------------------

    def propose_expression_concept(
        self, node_id: str, proposer: MappingProposer
    ) -> list[CandidateEdge]:
        """Ranked concept candidates for one expression via the proposer."""
        node = self.graph.expression(node_id)
        concepts = self.graph.concepts()
        try:
            candidates = proposer.propose(node, concepts)
        except Exception as exc:
            raise ProposerError(
                f"proposer {getattr(proposer, 'proposer_id', '?')} failed: {exc}",
                node_id=node_id,
            ) from exc
        for cand in candidates:
            if cand.src != node_id:
                raise ProposerError(
                    f"candidate src {cand.src} does not match {node_id}",
                    node_id=node_id,
                )
            if cand.edge_type is not EdgeType.EXPRESSION_CONCEPT:
                raise ProposerError(
                    f"unexpected edge type {cand.edge_type.value}", node_id=node_id
                )
            if not cand.rationale.strip():
                raise ProposerError("candidate without rationale", node_id=node_id)
            if not 0.0 <= cand.score <= 1.0:
                raise ProposerError(
                    f"candidate score {cand.score} outside [0, 1]", node_id=node_id
                )
            self.graph.concept(cand.dst)
        return candidates

    # ------------------------------------------------------------------
    # Incoming-text alignment
    # ------------------------------------------------------------------

    def plan_alignment(
        self, surface_text: str, language: str, tau_align: Optional[float] = None
    ) -> AlignmentPlan:
        """Decide how a new text should enter the graph.

        Exact normalized-text match wins; otherwise the nearest embedded
        expression at or above tau_align; otherwise a provisional node.
        """
        tau_align = self.tau_align if tau_align is None else tau_align
        language = language.strip().lower()
        existing = self.graph.find_expression(surface_text, language)
        if existing is not None:
            return AlignmentPlan(
                outcome=AlignmentOutcome.EXACT, existing_node_id=existing.id
            )
        vec = self.embedder.embed(surface_text)
        ids = [n.id for n in self.graph.expressions()]
        kept, mat = self.store.matrix(self.provider_id, ids)
        if kept:
            cos = np.clip(mat @ (vec / np.linalg.norm(vec)), -1.0, 1.0)
            best = int(np.argmax(cos))
            best_score = normalized_score(float(cos[best]))
            if best_score >= tau_align:
                best_node = self.graph.expression(kept[best])
                edge_type = (
                    EdgeType.INTRA_LINGUAL
                    if best_node.language == language
                    else EdgeType.CROSS_LINGUAL
                )
                return AlignmentPlan(
                    outcome=AlignmentOutcome.ALIGNED,
                    existing_node_id=best_node.id,
                    similarity=best_score,
                    edge_type=edge_type,
                )
        return AlignmentPlan(outcome=AlignmentOutcome.PROVISIONAL)


# Cue table for the bundled proposer, aligned with the demo concept
# inventory.  Confidences are configuration, not clinical claims.
DEFAULT_PROPOSER_ENTRIES: list[dict] = [
    {
        "cue": "ghabraahat",
        "language": "hi",
        "concept_code": "MB24.3",
        "framework": "ICD11",
        "rationale_template": (
            'Cue "{cue}" in "{text}" may correspond to {label} if persistent; '
            "not diagnostic in isolation."
        ),
        "base_confidence": 0.72,
    },
    {
        "cue": "stress",
        "language": "hi",
        "concept_code": "MB24.3",
        "framework": "ICD11",
        "rationale_template": (
            'Code-mixed cue "{cue}" in "{text}" may correspond to {label}; '
            "not diagnostic in isolation."
        ),
        "base_confidence": 0.55,
    },
    {
        "cue": "khushi mehsoos nahi hoti",
        "language": "hi",
        "concept_code": "ANHEDONIA",
        "framework": "DSM5",
        "rationale_template": (
            'Cue "{cue}" in "{text}" expresses absent pleasure, consistent '
            "with {label}; not diagnostic in isolation."
        ),
        "base_confidence": 0.68,
    },
    {
        "cue": "man ka bhoj",
        "language": "hi",
        "concept_code": "MIND-BURDEN",
        "framework": "CULTURAL",
        "rationale_template": (
            'Idiom "{cue}" in "{text}" matches the cultural distress idiom '
            "{label}."
        ),
        "base_confidence": 0.80,
    },
    {
        "cue": "मन का बोझ",
        "language": "hi",
        "concept_code": "MIND-BURDEN",
        "framework": "CULTURAL",
        "rationale_template": (
            'Idiom "{cue}" in "{text}" matches the cultural distress idiom '
            "{label}."
        ),
        "base_confidence": 0.80,
    },
    {
        "cue": "dil bhari hai",
        "language": "hi",
        "concept_code": "MIND-BURDEN",
        "framework": "CULTURAL",
        "rationale_template": (
            'Idiom "{cue}" in "{text}" conveys heaviness of heart, close to '
            "{label}."
        ),
        "base_confidence": 0.60,
    },
    {
        "cue": "neend nahi aati",
        "language": "hi",
        "concept_code": "SLEEP-DISTURBANCE",
        "framework": "DSM5",
        "rationale_template": (
            'Cue "{cue}" in "{text}" reports disturbed sleep, consistent with '
            "{label}; not diagnostic in isolation."
        ),
        "base_confidence": 0.74,
    },
    {
        "cue": "ಮನಸ್ಸಿಗೆ ಭಾರ",
        "language": "kn",
        "concept_code": "MIND-BURDEN",
        "framework": "CULTURAL",
        "rationale_template": (
            'Idiom "{cue}" in "{text}" matches the cultural distress idiom '
            "{label}."
        ),
        "base_confidence": 0.78,
    },
    {
        "cue": "ನಿದ್ರೆ ಬರುತ್ತಿಲ್ಲ",
        "language": "kn",
        "concept_code": "SLEEP-DISTURBANCE",
        "framework": "DSM5",
        "rationale_template": (
            'Cue "{cue}" in "{text}" reports disturbed sleep, consistent with '
            "{label}; not diagnostic in isolation."
        ),
        "base_confidence": 0.74,
    },
    {
        "cue": "मनावर ओझं",
        "language": "mr",
        "concept_code": "MIND-BURDEN",
        "framework": "CULTURAL",
        "rationale_template": (
            'Idiom "{cue}" in "{text}" matches the cultural distress idiom '
            "{label}."
        ),
        "base_confidence": 0.78,
    },
    {
        "cue": "झोप येत नाही",
        "language": "mr",
        "concept_code": "SLEEP-DISTURBANCE",
        "framework": "DSM5",
        "rationale_template": (
            'Cue "{cue}" in "{text}" reports disturbed sleep, consistent with '
            "{label}; not diagnostic in isolation."
        ),
        "base_confidence": 0.74,
    },
]

# Demo concept inventory the cue table refers to.
DEFAULT_CONCEPTS: list[dict] = [
    {"code": "MB24.3", "framework": "ICD11", "label": "Anxiety"},
    {
        "code": "ANHEDONIA",
        "framework": "DSM5",
        "label": "Markedly diminished interest or pleasure",
    },
    {
        "code": "SLEEP-DISTURBANCE",
        "framework": "DSM5",
        "label": "Insomnia or hypersomnia",
    },
    {
        "code": "MIND-BURDEN",
        "framework": "CULTURAL",
        "label": "Burden on the mind (distress idiom)",
    },
]


def default_proposer() -> LexiconProposer:
    return LexiconProposer.from_dicts(DEFAULT_PROPOSER_ENTRIES)


__all__ = [
    "AlignmentEngine",
    "AlignmentOutcome",
    "AlignmentPlan",
    "CandidateEdge",
    "DEFAULT_CONCEPTS",
    "DEFAULT_K",
    "DEFAULT_PROPOSER_ENTRIES",
    "DEFAULT_TAU",
    "DEFAULT_TAU_ALIGN",
    "LexiconProposer",
    "MappingProposer",
    "ProposerEntry",
    "default_proposer",
]
