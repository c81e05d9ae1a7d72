"""Exception types shared across the package.

All domain errors derive from :class:`PolyroofError` so callers (and the CLI)
can distinguish validation failures from programming errors.
"""


class PolyroofError(Exception):
    """Base class for all domain errors raised by this package."""


class DegenerateInput(PolyroofError):
    """Geometric input too degenerate to process (collinear points, <3 vertices,
    non-simple ring, ...)."""


class NumericalDegeneracy(PolyroofError):
    """Polygon clipping/triangulation could not be resolved within epsilon.

    Callers may fall back to a rasterized area estimate."""


class EmptyGraph(PolyroofError):
    """A wireframe operation needs at least one vertex."""


class NonPlanarInput(PolyroofError):
    """Wireframe edges cross somewhere other than a shared endpoint vertex."""


class DanglingEdge(PolyroofError):
    """A wireframe edge borders the outer face on both sides (a bridge).

    Carries the offending edge index in ``edge_index``."""

    def __init__(self, edge_index: int, message: str | None = None):
        self.edge_index = edge_index
        super().__init__(message or f"edge {edge_index} does not bound any interior face")


class DegenerateVariance(PolyroofError):
    """A feature has (near-)zero variance, so it cannot be standardized.

    Carries the offending feature names in ``features``."""

    def __init__(self, features: tuple[str, ...], message: str | None = None):
        self.features = tuple(features)
        super().__init__(message or f"zero variance in feature(s): {', '.join(self.features)}")


class InsufficientData(PolyroofError):
    """Not enough records/scenes for the requested operation."""


class SceneParseError(PolyroofError):
    """A scene document failed to parse or validate.

    Carries the source path in ``path``."""

    def __init__(self, path: str, message: str):
        self.path = path
        super().__init__(f"{path}: {message}")
