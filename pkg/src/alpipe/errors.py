"""Exception types shared across the pipeline."""


class AdmissibilityError(ValueError):
    """A lattice field violates sup|q| < 1."""


class DomainError(ValueError):
    """An argument is outside the mathematical domain of an operation."""


class RegionError(ValueError):
    """A ray xi = n/(2t) was routed to the wrong asymptotic region."""


class ResolutionError(RuntimeError):
    """A grid or quadrature is too coarse to resolve the requested data."""


class InconsistencyError(RuntimeError):
    """Computed scattering data violates an exact identity beyond tolerance."""


class SolverError(RuntimeError):
    """A linear solve failed or did not meet its residual target."""
