"""distressgraph: a heterogeneous multilingual graph of distress
expressions, clinical concepts, and validated mappings between them.

The package covers the full loop: corpus ingestion with span-level
annotations, deterministic embedding and candidate proposal, a
role-structured human validation workflow with uncertainty-ordered
queues, explanation bundles for every retained mapping, and intrinsic
metrics with a seeded review simulator.  State is an append-only event
log; replaying it reproduces the system byte for byte.
"""

from .agreement import KAPPA_TARGET, AgreementReport, agreement_report, cohen_kappa
from .alignment import (
    DEFAULT_CONCEPTS,
    DEFAULT_K,
    DEFAULT_PROPOSER_ENTRIES,
    DEFAULT_TAU,
    DEFAULT_TAU_ALIGN,
    AlignmentEngine,
    AlignmentOutcome,
    AlignmentPlan,
    CandidateEdge,
    LexiconProposer,
    MappingProposer,
    ProposerEntry,
    default_proposer,
)
from .annotation import (
    AnnotationRecord,
    CulturalMarker,
    SemanticCategory,
    Severity,
    TemporalProfile,
)
from .config import AppConfig, build_engine, load_config
from .corpus import (
    CorpusRecord,
    IngestReport,
    Span,
    extract_expressions,
    ingest_corpus,
    read_corpus,
    validate_record,
)
from .embedding import (
    EmbeddingRecord,
    EmbeddingStore,
    HashedBagEmbedder,
    cosine,
    is_word_char,
    normalized_score,
    read_embedding_records,
    tokenize,
)
from .engine import AlignmentResult, Engine
from .errors import (
    ConfigError,
    ConflictError,
    DistressGraphError,
    EdgeKindError,
    IngestIOError,
    NotFoundError,
    ParseError,
    PolicyError,
    ProposerError,
    StateError,
    ValidationError,
)
from .events import EventKind, EventLog, EventRecord, load_event_log, read_event_log
from .explain import (
    NON_DIAGNOSTIC_CAVEAT,
    ContrastiveRecord,
    ExplanationBundle,
    ExplanationRule,
    build_bundle,
    contrastive,
    default_rules,
    load_rules,
    match_rules,
    nearest_validated_examples,
    render_report,
    render_report_html,
    token_contributions,
)
from .graph import (
    ALLOWED_TRANSITIONS,
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
)
from .metrics import (
    EfficiencyReport,
    GraphMetrics,
    connectivity_metrics,
    hitl_efficiency,
    semantic_coherence,
)
from .simulate import SimulationConfig, run_simulation, simulate_validation
from .workflow import (
    AdjudicationOutcome,
    Modification,
    ValidationDecision,
    ValidatorRole,
    Verdict,
    Workflow,
    WorkflowConfig,
    combined_confidence,
    uncertainty,
    validator_agreement,
)

__version__ = "0.1.0"

__all__ = [
    "ALLOWED_TRANSITIONS",
    "AdjudicationOutcome",
    "AgreementReport",
    "AlignmentEngine",
    "AlignmentPlan",
    "AlignmentOutcome",
    "AlignmentResult",
    "AnnotationRecord",
    "AppConfig",
    "CandidateEdge",
    "ConceptNode",
    "ConfigError",
    "ConflictError",
    "ContrastiveRecord",
    "CorpusRecord",
    "CulturalMarker",
    "DEFAULT_CONCEPTS",
    "DEFAULT_K",
    "DEFAULT_PROPOSER_ENTRIES",
    "DEFAULT_TAU",
    "DEFAULT_TAU_ALIGN",
    "DistressGraphError",
    "Edge",
    "EdgeKindError",
    "EdgeStatus",
    "EdgeType",
    "EfficiencyReport",
    "EmbeddingRecord",
    "EmbeddingStore",
    "Engine",
    "EventKind",
    "EventLog",
    "EventRecord",
    "ExplanationBundle",
    "ExplanationRule",
    "ExpressionNode",
    "Framework",
    "GraphMetrics",
    "HashedBagEmbedder",
    "IngestIOError",
    "IngestReport",
    "KAPPA_TARGET",
    "LexiconProposer",
    "MappingProposer",
    "Modification",
    "NON_DIAGNOSTIC_CAVEAT",
    "NodeStatus",
    "NotFoundError",
    "OntologyGraph",
    "ParseError",
    "PolicyError",
    "ProposerEntry",
    "ProposerError",
    "Provenance",
    "SemanticCategory",
    "Severity",
    "SimulationConfig",
    "SourceKind",
    "Span",
    "StateError",
    "TemporalProfile",
    "ValidationDecision",
    "ValidationError",
    "ValidatorRole",
    "Verdict",
    "Workflow",
    "WorkflowConfig",
    "agreement_report",
    "build_bundle",
    "build_engine",
    "canonical_json_bytes",
    "cohen_kappa",
    "combined_confidence",
    "connectivity_metrics",
    "contrastive",
    "cosine",
    "default_proposer",
    "default_rules",
    "extract_expressions",
    "hitl_efficiency",
    "ingest_corpus",
    "is_word_char",
    "load_config",
    "load_event_log",
    "load_rules",
    "match_rules",
    "nearest_validated_examples",
    "normalized_score",
    "read_corpus",
    "read_embedding_records",
    "read_event_log",
    "render_report",
    "render_report_html",
    "run_simulation",
    "semantic_coherence",
    "simulate_validation",
    "token_contributions",
    "tokenize",
    "uncertainty",
    "validate_record",
    "validator_agreement",
]
