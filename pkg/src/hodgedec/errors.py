"""Exception types shared across the package."""


class DomainError(ValueError):
    """Input lies outside the geometric domain of an operation."""


class ConfigError(ValueError):
    """Generation or run parameters are unusable."""


class TopologyError(ValueError):
    """Triangle set is not a simplicial disk (non-manifold edge, bad boundary, ...)."""


class MeshQualityError(ValueError):
    """Mesh violates quality bounds (edge lengths, non-positive star weights)."""


class DegreeError(ValueError):
    """Cochain degree is invalid for the requested operation."""


class ChecksumError(ValueError):
    """A cochain or report file does not match the mesh it claims to belong to."""


class PreconditionError(ValueError):
    """A documented operation precondition failed (e.g. input not co-closed)."""


class ConvergenceError(RuntimeError):
    """Iterative solver stopped before reaching the requested tolerance."""

    def __init__(self, message: str, residual: float, iterations: int):
        super().__init__(message)
        self.residual = residual
        self.iterations = iterations
