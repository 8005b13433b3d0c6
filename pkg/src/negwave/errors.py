"""Exception hierarchy shared by every module."""


class NegwaveError(Exception):
    """Base class for domain errors (CLI exit code 1)."""


class InvalidLabel(NegwaveError, ValueError):
    pass


class SpaceMismatch(NegwaveError, ValueError):
    pass


class AlphabetMismatch(NegwaveError, ValueError):
    pass


class ZeroNorm(NegwaveError, ValueError):
    pass


class NotUnitary(NegwaveError, ValueError):
    pass


class NotFactorizable(NegwaveError, ValueError):
    pass


class BadScale(NegwaveError, ValueError):
    pass


class ConditionImpossible(NegwaveError, ValueError):
    pass


class InvalidScenario(NegwaveError, ValueError):
    pass


class ConfigError(Exception):
    """Bad CLI configuration (exit code 2). Carries the offending key and line."""

    def __init__(self, message, key=None, line=None):
        self.key = key
        self.line = line
        where = ""
        if key is not None:
            where += f" [key={key}"
            where += f", line={line}]" if line is not None else "]"
        super().__init__(message + where)
