"""Exception hierarchy shared across the package."""


class ChronobellError(Exception):
    """Base class for all errors raised by chronobell."""


class InvalidStateError(ChronobellError, ValueError):
    """A state vector violates its normalization contract."""


class ImpossibleOutcomeError(ChronobellError):
    """A zero-probability measurement branch was requested."""


class ImpossibleFlashError(ChronobellError):
    """A zero-probability hit center was requested."""


class StreamExhaustedError(ChronobellError):
    """A lambda stream ran out of stored words (never wraps around silently)."""


class CapacityError(ChronobellError):
    """A requested substream lies beyond the backing file's word range."""


class EmptyFileError(ChronobellError, ValueError):
    """A lambda file must contain at least one word."""


class LambdaFormatError(ChronobellError, ValueError):
    """Bytes do not parse as a valid lambda file."""


class NotReducibleError(ChronobellError):
    """A strategy quadruple violates the ordering-consistency equations."""


class SearchSpaceError(ChronobellError, ValueError):
    """An exhaustive search was requested over too large an alphabet."""


class OracleDisagreementError(ChronobellError):
    """Two independent locality checks returned different verdicts."""
