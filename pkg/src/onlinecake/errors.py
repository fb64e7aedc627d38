"""Exception types shared across the library."""


class CakeError(Exception):
    """Base class for every error raised by this library."""


class MalformedValuationError(CakeError):
    """Valuation segments do not tile the unit interval, or carry bad values."""


class ZeroValuationError(CakeError):
    """A valuation assigns zero value to the whole cake."""


class InsufficientValueError(CakeError):
    """A prefix of the requested value does not exist inside the region."""


class ConfigurationError(CakeError):
    """A scenario is missing a parameter the selected procedure requires."""


class SizeLimitError(CakeError):
    """An exhaustive search was refused because the instance is too large."""


class OracleScopeError(CakeError):
    """The brute-force oracle does not cover this instance."""


class TraceReplayError(CakeError):
    """Replaying a trace produced a decision that differs from the recording."""


class AuditInvariantError(CakeError):
    """Computed audit verdicts violate a known implication between properties."""


class ScenarioParseError(CakeError):
    """A scenario file failed to parse or validate.

    Attributes:
        line: 1-based line number the problem was detected on, when known.
        code: short machine-readable diagnostic code, e.g. "segment-gap".
    """

    def __init__(self, message: str, *, line: int | None = None, code: str = "parse"):
        self.line = line
        self.code = code
        where = f"line {line}: " if line is not None else ""
        super().__init__(f"{where}{message} [{code}]")
