import pytest

from distressgraph import (
    AnnotationRecord,
    CulturalMarker,
    Engine,
    Provenance,
    SemanticCategory,
    Severity,
    SourceKind,
    TemporalProfile,
)
from distressgraph.alignment import DEFAULT_CONCEPTS


def make_annotation(**overrides) -> AnnotationRecord:
    fields = {
        "semantic_category": SemanticCategory.EMOTION,
        "cultural_markers": frozenset({CulturalMarker.IDIOMATIC}),
        "severity": Severity.MILD,
        "temporal": TemporalProfile.CHRONIC,
        "annotator_confidence": 0.85,
        "annotator_id": "ann-1",
    }
    fields.update(overrides)
    return AnnotationRecord(**fields)


def make_provenance(**overrides) -> Provenance:
    fields = {
        "source_kind": SourceKind.HELPLINE,
        "source_id": "call-0001",
        "collected_at": "2025-11-02T10:00:00Z",
        "anonymized": True,
    }
    fields.update(overrides)
    return Provenance(**fields)


def seeded_engine(**kwargs) -> Engine:
    """Engine preloaded with the bundled concept inventory."""
    engine = Engine(**kwargs)
    for item in DEFAULT_CONCEPTS:
        engine.add_concept(
            code=item["code"], framework=item["framework"], label=item["label"]
        )
    return engine


@pytest.fixture
def annotation() -> AnnotationRecord:
    return make_annotation()


@pytest.fixture
def provenance() -> Provenance:
    return make_provenance()


@pytest.fixture
def engine() -> Engine:
    return seeded_engine()
