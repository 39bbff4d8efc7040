"""Annotation schema for distress-expression spans.

Every expression carries one record from the project codebook: a semantic
category, zero or more cultural-usage markers, coarse severity, a temporal
profile, and the annotator's confidence in the labels.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

from .errors import ValidationError


class SemanticCategory(str, Enum):
    EMOTION = "emotion"
    SOMATIC_COMPLAINT = "somatic_complaint"
    BEHAVIOR = "behavior"
    OTHER = "other"


class CulturalMarker(str, Enum):
    IDIOMATIC = "idiomatic"
    METAPHORICAL = "metaphorical"
    BELIEF_SYSTEM_REFERENCE = "belief_system_reference"
    CODE_MIXED = "code_mixed"


class Severity(str, Enum):
    MILD = "mild"
    SEVERE = "severe"
    UNKNOWN = "unknown"


class TemporalProfile(str, Enum):
    ACUTE = "acute"
    CHRONIC = "chronic"
    UNKNOWN = "unknown"


@dataclass(frozen=True)
class AnnotationRecord:
    semantic_category: SemanticCategory
    cultural_markers: frozenset[CulturalMarker]
    severity: Severity
    temporal: TemporalProfile
    annotator_confidence: float
    annotator_id: str

    def problems(self) -> list[str]:
        """Return all schema violations; empty list when the record is valid."""
        found = []
        if not 0.0 <= self.annotator_confidence <= 1.0:
            found.append(
                f"annotator_confidence {self.annotator_confidence} outside [0, 1]"
            )
        if not self.is_informative():
            found.append(
                "record carries no information: semantic category 'other', "
                "no cultural markers, severity and temporal both unknown"
            )
        return found

    def is_informative(self) -> bool:
        # At least one label field must say something beyond its null value.
        return (
            self.semantic_category is not SemanticCategory.OTHER
            or bool(self.cultural_markers)
            or self.severity is not Severity.UNKNOWN
            or self.temporal is not TemporalProfile.UNKNOWN
        )

    def check(self) -> None:
        """Enforce range validity only.

        Informativeness is a corpus-schema requirement checked at ingest;
        nodes minted during alignment legitimately start with an empty
        record until an annotator fills it in.
        """
        if not 0.0 <= self.annotator_confidence <= 1.0:
            raise ValidationError(
                f"annotator_confidence {self.annotator_confidence} outside [0, 1]"
            )

    def to_dict(self) -> dict:
        return {
            "semantic_category": self.semantic_category.value,
            "cultural_markers": sorted(m.value for m in self.cultural_markers),
            "severity": self.severity.value,
            "temporal": self.temporal.value,
            "annotator_confidence": self.annotator_confidence,
            "annotator_id": self.annotator_id,
        }

    @classmethod
    def empty(cls, annotator_id: str = "system") -> "AnnotationRecord":
        """Placeholder record for nodes awaiting human annotation."""
        return cls(
            semantic_category=SemanticCategory.OTHER,
            cultural_markers=frozenset(),
            severity=Severity.UNKNOWN,
            temporal=TemporalProfile.UNKNOWN,
            annotator_confidence=0.0,
            annotator_id=annotator_id,
        )

    @classmethod
    def from_dict(cls, data: dict) -> "AnnotationRecord":
        try:
            return cls(
                semantic_category=SemanticCategory(data["semantic_category"]),
                cultural_markers=frozenset(
                    CulturalMarker(m) for m in data.get("cultural_markers", [])
                ),
                severity=Severity(data.get("severity", "unknown")),
                temporal=TemporalProfile(data.get("temporal", "unknown")),
                annotator_confidence=float(data["annotator_confidence"]),
                annotator_id=str(data["annotator_id"]),
            )
        except (KeyError, ValueError, TypeError) as exc:
            raise ValidationError(f"bad annotation record: {exc}") from exc
