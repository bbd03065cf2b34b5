"""Exception hierarchy for memrc."""


class MemrcError(Exception):
    """Base class for all toolkit errors."""


# device models
class NonFiniteState(MemrcError):
    """Integration produced NaN/Inf; usually the step is too large."""


class QuadratureUnderflow(MemrcError):
    """The closed-form solution left the representable range of doubles."""


class LengthMismatch(MemrcError):
    pass


# harmonic analysis
class NoRealPole(MemrcError):
    pass


class ExpansionDiverges(MemrcError):
    pass


class InvalidRegime(MemrcError):
    pass


class InsufficientPeriods(MemrcError):
    pass


# signals
class SymbolOutOfRange(MemrcError, ValueError):
    pass


# reservoir bank
class GridMismatch(MemrcError):
    pass


class OffsetOutOfRange(MemrcError):
    pass


# readout
class SingularSystem(MemrcError):
    pass


class DimensionMismatch(MemrcError):
    pass


class DegenerateTarget(MemrcError):
    pass


# configuration
class ConfigError(MemrcError):
    """Any problem with the experiment configuration (CLI exit code 1)."""


class ConfigParseError(ConfigError):
    def __init__(self, lineno, message):
        super().__init__(f"line {lineno}: {message}")
        self.lineno = lineno


class UnknownKey(ConfigError):
    pass


class RangeViolation(ConfigError):
    pass
