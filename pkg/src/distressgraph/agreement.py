"""Inter-annotator agreement.

Cohen's kappa for a pair of annotators:

            p_o - p_e
    kappa = ---------
            1 - p_e

where p_o is the observed per-item agreement rate and p_e the chance
agreement implied by each annotator's marginal label frequencies.  For more
than two annotators the report carries every pairwise kappa plus their
unweighted mean as the headline figure, so a diverging pair stays visible.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from typing import Hashable, Mapping, Sequence

from .errors import ValidationError

KAPPA_TARGET = 0.7


def cohen_kappa(labels_a: Sequence[Hashable], labels_b: Sequence[Hashable]) -> float:
    """Chance-corrected agreement between two aligned label lists.

    Returns 1.0 in the degenerate full-agreement case where both annotators
    used a single identical label throughout (p_e = 1).
    """
    if len(labels_a) != len(labels_b):
        raise ValidationError(
            f"label lists differ in length: {len(labels_a)} vs {len(labels_b)}"
        )
    n = len(labels_a)
    if n == 0:
        raise ValidationError("label lists are empty")

    # Integer form of (p_o - p_e)/(1 - p_e) with p_o = o/n, p_e = e/n^2:
    # a single division keeps clean ratios like 3/4 exact.
    observed = sum(1 for a, b in zip(labels_a, labels_b) if a == b)
    freq_a = Counter(labels_a)
    freq_b = Counter(labels_b)
    expected = sum(freq_a[label] * freq_b.get(label, 0) for label in freq_a)
    if expected == n * n:
        # Both lists are constant on the same label, which forces full
        # agreement; report perfect kappa instead of 0/0.
        return 1.0
    return (n * observed - expected) / (n * n - expected)


@dataclass
class AgreementReport:
    kappa: float
    item_count: int
    annotator_pairs: list[tuple[str, str]]
    per_pair_kappa: dict[tuple[str, str], float]
    target: float = KAPPA_TARGET
    meets_target: bool = field(init=False)

    def __post_init__(self):
        self.meets_target = self.kappa > self.target

    def to_dict(self) -> dict:
        return {
            "kappa": self.kappa,
            "item_count": self.item_count,
            "annotator_pairs": [list(p) for p in self.annotator_pairs],
            "per_pair_kappa": {
                f"{a}|{b}": k for (a, b), k in sorted(self.per_pair_kappa.items())
            },
            "target": self.target,
            "meets_target": self.meets_target,
        }


def agreement_report(
    labelings: Mapping[str, Sequence[Hashable]] | Sequence[Sequence[Hashable]],
    target: float = KAPPA_TARGET,
) -> AgreementReport:
    """Pairwise Cohen's kappa over two or more aligned labelings.

    ``labelings`` is either a mapping of annotator id to label list or a bare
    sequence of label lists (ids then default to a0, a1, ...).
    """
    if isinstance(labelings, Mapping):
        named = [(str(k), list(v)) for k, v in labelings.items()]
    else:
        named = [(f"a{i}", list(v)) for i, v in enumerate(labelings)]
    if len(named) < 2:
        raise ValidationError("agreement needs at least two annotators")
    length = len(named[0][1])
    if length == 0:
        raise ValidationError("label lists are empty")
    for name, labels in named:
        if len(labels) != length:
            raise ValidationError(
                f"annotator {name} has {len(labels)} items, expected {length}"
            )

    pairs: list[tuple[str, str]] = []
    per_pair: dict[tuple[str, str], float] = {}
    for i in range(len(named)):
        for j in range(i + 1, len(named)):
            pair = (named[i][0], named[j][0])
            pairs.append(pair)
            per_pair[pair] = cohen_kappa(named[i][1], named[j][1])
    mean_kappa = sum(per_pair.values()) / len(per_pair)
    return AgreementReport(
        kappa=mean_kappa,
        item_count=length,
        annotator_pairs=pairs,
        per_pair_kappa=per_pair,
        target=target,
    )
