"""Exception types raised across the package."""


class DgslError(Exception):
    """Base class for all package-specific errors."""


class ParseError(DgslError):
    """Mesh file content is malformed (bad line, bad index, bad count)."""


class NonConformingMesh(DgslError):
    """An edge is shared by more than two triangles."""


class PerturbationFoldover(DgslError):
    """Vertex perturbation produced a non-positive triangle area."""


class UnsupportedDegree(DgslError):
    """Requested polynomial or quadrature degree is outside the supported range."""


class DegenerateElement(DgslError):
    """Element mapping has non-positive Jacobian determinant."""


class NotConverged(DgslError):
    """Iterative solve exhausted its budget; carries the partial report."""

    def __init__(self, message, report=None, x=None):
        super().__init__(message)
        self.report = report
        self.x = x


class IndefiniteOperator(DgslError):
    """A direction of non-positive curvature was detected in a CG solve."""


class NewtonDiverged(DgslError):
    """Backtracking could not find a residual-decreasing step."""

    def __init__(self, message, report=None):
        super().__init__(message)
        self.report = report


class InsufficientLevels(DgslError):
    """Observed-order computation needs at least two refinement levels."""


class ConfigError(DgslError):
    """Run configuration is invalid (unknown key, missing file, bad value)."""
