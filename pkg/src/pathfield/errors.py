"""Exception types shared across the package."""


class PathfieldError(Exception):
    """Base class for all errors raised by this package."""


class MeshFormatError(PathfieldError):
    """A mesh file could not be parsed."""


class MeshTopologyError(PathfieldError):
    """The triangulation is not a valid manifold planar mesh."""


class DegenerateGeometryError(PathfieldError):
    """A triangle has (numerically) zero area or a 0/pi angle."""


class FactorizationError(PathfieldError):
    """The interior Laplacian block could not be factorized."""


class InvalidTargetError(PathfieldError):
    """The requested source/target vertex is not admissible."""


class BudgetExceededError(PathfieldError):
    """The mesh is too large for a dense pseudo-inverse computation."""


class DivergenceDomainError(PathfieldError):
    """A divergence hit a zero denominator and clamping is disabled."""


class ConfigError(PathfieldError):
    """A configuration file or value is invalid."""
