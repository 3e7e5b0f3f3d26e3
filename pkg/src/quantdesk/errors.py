"""Exception hierarchy shared across the engine."""


class QuantDeskError(Exception):
    """Base class for all engine errors."""


class DataError(QuantDeskError):
    """Malformed or inconsistent input data."""


class ParseError(DataError):
    """A file row or reply could not be parsed; carries location context."""


class ValidationError(DataError):
    """An invariant on loaded data was violated."""


class DuplicateBarError(DataError):
    """Two bars share the same (symbol, date)."""


class EmptyDatasetError(DataError):
    """An operation requires at least one bar."""


class LookaheadError(QuantDeskError):
    """A time-bounded view was asked for data after its cursor."""


class RegistryError(QuantDeskError):
    """Unknown indicator name."""


class ParameterError(QuantDeskError):
    """An indicator parameter is outside its documented domain."""


class InsufficientDataError(QuantDeskError):
    """A computation needs more history than was supplied."""


class DegenerateInputError(QuantDeskError):
    """The input collapses a formula's denominator (zero variance,
    no downside returns, zero drawdown, single-asset concentration, ...)."""


class ConfigError(QuantDeskError):
    """A run or strategy configuration value is invalid."""


class MarkingError(QuantDeskError):
    """A held symbol has no price on the marking date; the run must abort."""


class SchedulingError(QuantDeskError):
    """A meeting was requested on a day its protocol does not allow."""


class TransportError(QuantDeskError):
    """A remote backend call failed; safe to retry."""
