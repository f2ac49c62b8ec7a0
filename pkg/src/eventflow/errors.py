"""Exception types shared across the package."""


class EventFlowError(Exception):
    """Base class for all eventflow errors."""


class EmptyDataset(EventFlowError):
    """No sequence survived dataset preparation."""


class UnknownOutcomeType(EventFlowError):
    """The requested outcome type appears in no outcome record."""


class InvariantViolation(EventFlowError):
    """A structural invariant that should always hold was broken."""


class ParseError(EventFlowError):
    """A row/line could not be parsed."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class MissingColumn(ParseError):
    """A required column is absent from the input file."""


class BadTimestamp(ParseError):
    """A timestamp field is neither epoch seconds nor ISO-8601."""


class SchemaVersionMismatch(EventFlowError):
    """A result file carries an unsupported schema_version."""


class EmptyFilter(EventFlowError):
    """The event-type filter selects no event types."""


class NoSegments(EventFlowError):
    """Segmentation produced no segments (all events filtered out)."""


class KTooLarge(EventFlowError):
    """Requested cluster count exceeds the number of distinct vectors."""


class DimensionMismatch(EventFlowError):
    """A count vector does not match the model's feature dimension."""


class EmptySample(EventFlowError):
    """Entropy of a sample with zero total count is undefined."""


class PartitionMismatch(EventFlowError):
    """Partition class counts do not sum to the parent's counts."""


class ZeroCount(EventFlowError):
    """Operation requires a node with at least one sequence."""
