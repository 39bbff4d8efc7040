"""Deterministic embeddings and similarity primitives.

Production deployments plug in multilingual encoders behind the same
provider interface.  The bundled provider is a hashed bag of tokens: each
distinct token owns one vector component carrying a Gaussian weight seeded
from the token's hash, occurrences accumulate, and the sum is L2-normalized.
Deterministic by construction, and texts with disjoint token sets come out
exactly orthogonal, which makes every similarity-based test an exact oracle.
"""

from __future__ import annotations

import hashlib
import json
import unicodedata
from dataclasses import dataclass
from typing import Iterable, Iterator, Optional, Sequence, TextIO, Union

import numpy as np

from .errors import ParseError, ValidationError

Vector = np.ndarray


def is_word_char(ch: str) -> bool:
    """Letters, digits, and combining marks.

    str.isalnum misses the Mn/Mc categories, which would split Devanagari
    and Kannada words at every vowel sign.
    """
    return ch.isalnum() or unicodedata.category(ch) in ("Mn", "Mc")


def tokenize(text: str) -> list[str]:
    """Case-folded word tokens in order of appearance."""
    text = unicodedata.normalize("NFC", text).casefold()
    tokens = []
    current: list[str] = []
    for ch in text:
        if is_word_char(ch):
            current.append(ch)
        elif current:
            tokens.append("".join(current))
            current = []
    if current:
        tokens.append("".join(current))
    return tokens


def cosine(u: Sequence[float], v: Sequence[float]) -> float:
    """dot(u, v) / (|u| |v|) for equal-length non-zero vectors."""
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    if u.shape != v.shape or u.ndim != 1:
        raise ValidationError(f"dimension mismatch: {u.shape} vs {v.shape}")
    nu = float(np.linalg.norm(u))
    nv = float(np.linalg.norm(v))
    if nu == 0.0 or nv == 0.0:
        raise ValidationError("cosine undefined for the zero vector")
    return float(np.dot(u, v) / (nu * nv))


def normalized_score(cos: float) -> float:
    """Map cosine in [-1, 1] to a confidence-scale score in [0, 1]."""
    return (cos + 1.0) / 2.0


@dataclass(frozen=True)
class EmbeddingRecord:
    node_id: str
    vector: tuple[float, ...]
    dim: int
    provider_id: str

    def to_dict(self) -> dict:
        return {
            "node_id": self.node_id,
            "vector": list(self.vector),
            "dim": self.dim,
            "provider_id": self.provider_id,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "EmbeddingRecord":
        try:
            vector = tuple(float(x) for x in data["vector"])
            return cls(
                node_id=str(data["node_id"]),
                vector=vector,
                dim=int(data.get("dim", len(vector))),
                provider_id=str(data["provider_id"]),
            )
        except (KeyError, ValueError, TypeError) as exc:
            raise ValidationError(f"bad embedding record: {exc}") from exc


def read_embedding_records(
    source: Union[TextIO, Iterable[str]]
) -> Iterator[EmbeddingRecord]:
    """Parse JSON-lines embedding input; blank lines are skipped."""
    for lineno, line in enumerate(source, start=1):
        line = line.strip()
        if not line:
            continue
        try:
            data = json.loads(line)
        except json.JSONDecodeError as exc:
            raise ParseError(f"invalid JSON: {exc}", location=f"line {lineno}") from exc
        try:
            yield EmbeddingRecord.from_dict(data)
        except ValidationError as exc:
            raise ParseError(str(exc), location=f"line {lineno}") from exc


class EmbeddingStore:
    """Per-provider vector store keyed by node id.

    The first registration under a provider fixes that provider's dimension;
    later vectors must match it.  Re-registration overwrites.
    """

    def __init__(self):
        self._vectors: dict[str, dict[str, Vector]] = {}
        self._dims: dict[str, int] = {}

    def register(self, node_id: str, vector: Sequence[float], provider_id: str) -> None:
        arr = np.asarray(vector, dtype=float)
        if arr.ndim != 1 or arr.size == 0:
            raise ValidationError(f"vector for {node_id} is not one-dimensional")
        if not np.any(arr):
            raise ValidationError(f"zero vector for node {node_id}")
        if not np.all(np.isfinite(arr)):
            raise ValidationError(f"non-finite components in vector for {node_id}")
        dim = self._dims.get(provider_id)
        if dim is None:
            self._dims[provider_id] = arr.size
        elif arr.size != dim:
            raise ValidationError(
                f"provider {provider_id}: vector dim {arr.size} does not match "
                f"established dim {dim}"
            )
        self._vectors.setdefault(provider_id, {})[node_id] = arr

    def get(self, node_id: str, provider_id: str) -> Optional[Vector]:
        return self._vectors.get(provider_id, {}).get(node_id)

    def dim(self, provider_id: str) -> Optional[int]:
        return self._dims.get(provider_id)

    def node_ids(self, provider_id: str) -> list[str]:
        return sorted(self._vectors.get(provider_id, {}))

    def matrix(
        self, provider_id: str, node_ids: Sequence[str]
    ) -> tuple[list[str], np.ndarray]:
        """Stacked unit-norm row vectors for the given nodes, skipping any
        without a registered embedding."""
        bucket = self._vectors.get(provider_id, {})
        kept = [nid for nid in node_ids if nid in bucket]
        if not kept:
            dim = self._dims.get(provider_id, 0)
            return [], np.zeros((0, dim))
        rows = np.stack([bucket[nid] for nid in kept])
        norms = np.linalg.norm(rows, axis=1, keepdims=True)
        return kept, rows / norms

    def records(self) -> list[EmbeddingRecord]:
        out = []
        for provider_id in sorted(self._vectors):
            for node_id in sorted(self._vectors[provider_id]):
                vec = self._vectors[provider_id][node_id]
                out.append(
                    EmbeddingRecord(
                        node_id=node_id,
                        vector=tuple(float(x) for x in vec),
                        dim=int(vec.size),
                        provider_id=provider_id,
                    )
                )
        return out


class HashedBagEmbedder:
    """The bundled deterministic text embedding provider.

    Every distinct token is pinned to its own vector component, chosen by the
    token's hash with first-fit probing on collision, and weighted by a
    Gaussian draw seeded from the same hash.  A text embeds as the
    L2-normalized sum of its token vectors.  Because components are never
    shared between tokens, similarity depends only on shared tokens, and
    disjoint token sets give cosine exactly 0.
    """

    def __init__(self, dim: int = 4096, provider_id: str = "hashed-bag-v1"):
        if dim < 2:
            raise ValidationError(f"provider dim {dim} too small")
        self.dim = dim
        self.provider_id = provider_id
        self._buckets: dict[str, int] = {}
        self._weights: dict[str, float] = {}
        self._occupied: set[int] = set()

    def _assign(self, token: str) -> tuple[int, float]:
        bucket = self._buckets.get(token)
        if bucket is not None:
            return bucket, self._weights[token]
        if len(self._buckets) >= self.dim:
            raise ValidationError(
                f"provider {self.provider_id}: vocabulary exceeds dim {self.dim}"
            )
        digest = hashlib.sha256(token.encode("utf-8")).digest()
        bucket = int.from_bytes(digest[:8], "big") % self.dim
        while bucket in self._occupied:
            bucket = (bucket + 1) % self.dim
        rng = np.random.default_rng(int.from_bytes(digest[8:16], "big"))
        weight = float(rng.standard_normal())
        if weight == 0.0:
            weight = 1.0
        self._buckets[token] = bucket
        self._weights[token] = weight
        self._occupied.add(bucket)
        return bucket, weight

    def embed(self, text: str) -> Vector:
        tokens = tokenize(text)
        if not tokens:
            raise ValidationError(f"no tokens in text {text!r}")
        vec = np.zeros(self.dim)
        for token in tokens:
            bucket, weight = self._assign(token)
            vec[bucket] += weight
        norm = float(np.linalg.norm(vec))
        return vec / norm

    def similarity(self, text_a: str, text_b: str) -> float:
        return cosine(self.embed(text_a), self.embed(text_b))


__all__ = [
    "EmbeddingRecord",
    "EmbeddingStore",
    "HashedBagEmbedder",
    "Vector",
    "cosine",
    "is_word_char",
    "normalized_score",
    "read_embedding_records",
    "tokenize",
]
