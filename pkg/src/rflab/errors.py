"""Exception hierarchy for rflab."""


class RflabError(Exception):
    """Base class for all rflab failures."""


class NonPositive(RflabError, ValueError):
    """Support function is not strictly positive (origin not interior)."""


class NonConvex(RflabError, ValueError):
    """Radius of curvature h + h'' is not strictly positive."""


class IncompatibleSampling(RflabError, ValueError):
    pass


class ConvexityLost(RflabError):
    """A flow step or perturbation produced a non-convex support function."""


class NonConvergent(RflabError):
    pass


class NotStarShaped(RflabError, ValueError):
    pass


class CutoffTooHigh(RflabError, ValueError):
    """Requested cutoff is beyond what the mesh resolves."""


class SolverFailure(RflabError):
    pass


class CutoffExceeded(RflabError, ValueError):
    """A spectral sum was requested above the cutoff of the computed spectrum."""


class GeometryMismatch(RflabError, ValueError):
    pass


class InsufficientSpectrum(RflabError, ValueError):
    pass


class DegenerateFit(RflabError):
    """Curvature is numerically constant, so the curvature term cannot be fitted."""
