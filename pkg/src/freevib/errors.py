"""Exception types shared across the package."""


class FreevibError(Exception):
    """Base class for all package errors."""


class InvalidParams(FreevibError):
    """Input parameters violate a documented precondition."""


class NotPositiveDefinite(FreevibError):
    """A matrix required to be positive definite has a nonpositive pivot."""


class EigenFailure(FreevibError):
    """The hermitian eigensolver failed to converge or returned garbage."""


class BinMismatch(FreevibError):
    """Attempt to merge histograms with different ranges, bin counts or axes."""


class InsufficientData(FreevibError):
    """Not enough events in a region for the requested statistic."""


class OutOfWindow(FreevibError):
    """Evaluation outside the guaranteed-accuracy window."""


class PoorFit(FreevibError):
    """Least-squares fit residual exceeds the configured threshold."""


class BranchAmbiguity(FreevibError):
    """Root tracking could not identify the physical branch unambiguously."""


class QuadratureFailure(FreevibError):
    """Adaptive quadrature did not reach the requested accuracy."""
