"""Exception hierarchy shared by all modules."""


class CutoffOTError(Exception):
    """Base class for every error raised by this package."""


class NumericFailure(CutoffOTError):
    """A numerical procedure failed (maps to CLI exit code 3)."""


class NonNormalizable(NumericFailure):
    pass


class DivergentIntegral(NumericFailure):
    pass


class NoConvergence(NumericFailure):
    def __init__(self, iterations, residual, message=None):
        self.iterations = iterations
        self.residual = residual
        msg = message or f"no convergence after {iterations} iterations (residual {residual:.3e})"
        super().__init__(msg)


class OutOfRange(CutoffOTError, ValueError):
    pass


class EmptyCutoff(CutoffOTError, ValueError):
    pass


class DimensionMismatch(CutoffOTError, ValueError):
    pass


class UnknownCost(CutoffOTError, KeyError):
    pass


class UnknownDensity(CutoffOTError, KeyError):
    pass


class UnknownCase(CutoffOTError, KeyError):
    pass


class NotBoundedBelow(CutoffOTError, ValueError):
    pass


class BoundaryPoint(CutoffOTError, ValueError):
    pass


class InfiniteMoment(CutoffOTError, ValueError):
    pass


class BadAnchor(CutoffOTError, ValueError):
    pass


class HypothesisViolated(CutoffOTError, ValueError):
    pass


class ValidityExceeded(CutoffOTError, ValueError):
    pass


class EmptyGrid(CutoffOTError, ValueError):
    pass


class DegenerateDomain(CutoffOTError, ValueError):
    pass


class LengthMismatch(CutoffOTError, ValueError):
    pass


class DegenerateFit(CutoffOTError, ValueError):
    pass


class MissingColumn(CutoffOTError, KeyError):
    pass


class ConfigError(CutoffOTError, ValueError):
    """Invalid study configuration; ``key`` names the offending entry."""

    def __init__(self, key, message):
        self.key = key
        super().__init__(f"{key}: {message}")
