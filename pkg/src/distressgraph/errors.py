"""Exception types shared across the package."""


class DistressGraphError(Exception):
    """Base class for every error raised by this package."""


class ValidationError(DistressGraphError):
    """Input failed a precondition, range, or schema check."""


class PolicyError(DistressGraphError):
    """Ingestion policy violation, e.g. non-anonymized source material."""


class ConflictError(DistressGraphError):
    """Write conflicts with an existing record."""


class EdgeKindError(DistressGraphError):
    """Edge endpoints are incompatible with the declared edge type."""


class NotFoundError(DistressGraphError):
    """Referenced node or edge does not exist."""


class StateError(DistressGraphError):
    """Operation is not legal for the current lifecycle status."""


class ParseError(DistressGraphError):
    """Malformed document or event stream."""

    def __init__(self, message: str, location: str | None = None):
        self.location = location
        if location:
            message = f"{location}: {message}"
        super().__init__(message)


class ProposerError(DistressGraphError):
    """A mapping proposer failed or violated its contract."""

    def __init__(self, message: str, node_id: str | None = None):
        self.node_id = node_id
        if node_id:
            message = f"{message} (node {node_id})"
        super().__init__(message)


class IngestIOError(DistressGraphError):
    """Corpus stream became unreadable mid-ingest."""

    def __init__(self, message: str, records_processed: int = 0):
        self.records_processed = records_processed
        super().__init__(f"{message} (processed {records_processed} records)")


class ConfigError(DistressGraphError):
    """Service or CLI configuration is invalid."""
