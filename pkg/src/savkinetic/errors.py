"""Exception types raised by the solver."""


class KineticError(Exception):
    """Base class for all solver errors."""


class GridMismatch(KineticError, ValueError):
    pass


class NonPositiveMass(KineticError, ValueError):
    pass


class NegativeDensity(KineticError, ValueError):
    """An entry fell below ``-floor`` when evaluating the entropy."""


class NonPositiveDensity(KineticError, ArithmeticError):
    """A scheme without positivity control produced a negative density."""


class NegativeRegion(KineticError, ValueError):
    pass


class NonPositiveModifiedEntropy(KineticError, ValueError):
    pass


class Degenerate(KineticError, ArithmeticError):
    """The scalar r-update has a non-positive denominator."""


class MissingHistory(KineticError, ValueError):
    pass


class OperatorWithoutSplit(KineticError, TypeError):
    pass


class NoConvergence(KineticError, RuntimeError):
    pass


class MetadataMismatch(KineticError, ValueError):
    pass


class CorruptFile(KineticError, IOError):
    pass
