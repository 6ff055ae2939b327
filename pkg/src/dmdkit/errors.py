"""Exception types shared across the package.

The CLI maps these onto exit codes (config -> 2, data/shape -> 3,
numerical -> 4), so fitting and I/O code should raise the most specific
class that applies.
"""


class DmdkitError(Exception):
    """Base class for all dmdkit errors."""


class ShapeError(DmdkitError, ValueError):
    """An array argument has the wrong shape, is empty, or is non-finite."""


class DataError(DmdkitError, ValueError):
    """A file could not be parsed or fails its format contract."""


class ConfigError(DmdkitError, ValueError):
    """Invalid configuration: bad spec string, parameter range, flag misuse."""


class NumericalError(DmdkitError, ArithmeticError):
    """A computation failed numerically."""


class EmptyRankError(NumericalError):
    """No singular values survived truncation (numerically zero matrix)."""


class ConditioningError(NumericalError):
    """A matrix is too ill-conditioned for the requested algorithm."""


class DivergenceError(NumericalError):
    """A simulated trajectory left the trusted numeric range."""
