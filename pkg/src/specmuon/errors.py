"""Exception types shared across the library."""


class SpecmuonError(Exception):
    """Base class for all library errors."""


class ShapeMismatchError(SpecmuonError, ValueError):
    """Operands have incompatible dimensions."""


class InvalidArgumentError(SpecmuonError, ValueError):
    """An argument is out of its legal range (e.g. rank budget too large)."""


class NonFiniteDataError(SpecmuonError, ValueError):
    """A matrix or scalar contains NaN or Inf."""


class SpectralStabilityError(SpecmuonError, RuntimeError):
    """Input violates the contraction precondition of an iterative scheme."""


class EnergyDomainError(SpecmuonError, ValueError):
    """loss + kappa is not positive, so the energy root is undefined."""


class ConfigError(SpecmuonError, ValueError):
    """A run configuration names an unknown component or an illegal value."""


class RateFitError(SpecmuonError, RuntimeError):
    """The trajectory window is unusable for a convergence-rate fit."""
