"""Core polygon primitives for roof outlines and segments.

Coordinates are pixel-space floats. Rings are simple polygons stored in
counter-clockwise orientation with consecutive duplicates and collinear
runs removed at construction; all derived quantities (area, perimeter,
convexity, compactness, intersection) are pure functions of the ring.

The shared geometric tolerance is expressed in squared-pixel units (cross
products and squared distances are compared against it). It defaults to
1e-9 and can be overridden with the ``POLYROOF_EPSILON`` environment
variable or :func:`set_epsilon`.
"""

from __future__ import annotations

import math
import os
from typing import Iterable, NamedTuple

import numpy as np

from ._kernels import clip_area_sum
from .errors import DegenerateInput, NumericalDegeneracy

__all__ = [
    "Point2",
    "PolygonRing",
    "area",
    "perimeter",
    "convex_hull",
    "convexity",
    "compactness",
    "intersection_area",
    "iou",
    "get_epsilon",
    "set_epsilon",
    "as_point_array",
]

_DEFAULT_EPSILON = 1e-9
_epsilon = float(os.environ.get("POLYROOF_EPSILON", _DEFAULT_EPSILON))


def get_epsilon() -> float:
    """Current geometric tolerance (squared-pixel units)."""
    return _epsilon


def set_epsilon(value: float) -> None:
    """Override the geometric tolerance for subsequently built objects."""
    global _epsilon
    value = float(value)
    if not math.isfinite(value) or value <= 0.0:
        raise ValueError("epsilon must be a positive finite number")
    _epsilon = value


class _PointBase(NamedTuple):
    x: float
    y: float


class Point2(_PointBase):
    """A 2-D point in pixel units. Coordinates must be finite."""

    __slots__ = ()

    def __new__(cls, x: float, y: float):
        xf = float(x)
        yf = float(y)
        if not (math.isfinite(xf) and math.isfinite(yf)):
            raise DegenerateInput(f"point coordinates must be finite, got ({x}, {y})")
        return super().__new__(cls, xf, yf)


def as_point_array(points: Iterable) -> np.ndarray:
    """Coerce a sequence of points (Point2, pairs, or an (n, 2) array) to float64."""
    arr = np.asarray(points, dtype=np.float64)
    if arr.ndim != 2 or arr.shape[1] != 2:
        raise DegenerateInput(f"expected an (n, 2) point sequence, got shape {arr.shape}")
    if not np.isfinite(arr).all():
        raise DegenerateInput("point coordinates must be finite")
    return arr


def _cross(u: np.ndarray, v: np.ndarray) -> np.ndarray:
    return u[..., 0] * v[..., 1] - u[..., 1] * v[..., 0]


def _signed_area(coords: np.ndarray) -> float:
    x = coords[:, 0]
    y = coords[:, 1]
    return 0.5 * float(np.sum(x * np.roll(y, -1) - np.roll(x, -1) * y))


def _shift(coords: np.ndarray, k: int) -> np.ndarray:
    return np.concatenate((coords[k:], coords[:k]))


def _clean_ring(coords: np.ndarray, eps: float) -> np.ndarray:
    """Drop consecutive (near-)duplicates and pass-through collinear middles.

    A collinear middle vertex whose edges double back (a spike) is a
    zero-area self-touch, not cleanable noise; it is rejected outright."""
    while len(coords) >= 3:
        prev = _shift(coords, -1)
        step = coords - prev
        dup = (step * step).sum(axis=1) <= eps
        if dup.any():
            coords = coords[~dup]
            continue
        forward = _shift(coords, 1) - coords
        straight = np.abs(_cross(step, forward)) <= eps
        if straight.any():
            if (straight & ((step * forward).sum(axis=1) < 0)).any():
                raise DegenerateInput("polygon ring contains a zero-area spike")
            coords = coords[~straight]
            continue
        break
    return coords


def _is_simple(coords: np.ndarray, eps: float) -> bool:
    """True if no two non-adjacent edges of the closed ring touch or cross."""
    n = len(coords)
    # repeated vertices anywhere make the ring non-simple
    diff = coords[:, None, :] - coords[None, :, :]
    d2 = (diff * diff).sum(axis=2)
    np.fill_diagonal(d2, np.inf)
    if (d2 <= eps).any():
        return False

    p = coords
    q = np.roll(coords, -1, axis=0)
    i_idx, j_idx = np.triu_indices(n, k=1)
    adjacent = (j_idx - i_idx == 1) | ((i_idx == 0) & (j_idx == n - 1))
    i_idx = i_idx[~adjacent]
    j_idx = j_idx[~adjacent]
    if len(i_idx) == 0:
        return True

    p1, q1 = p[i_idx], q[i_idx]
    p2, q2 = p[j_idx], q[j_idx]
    r = q1 - p1
    s = q2 - p2
    d1 = _cross(s, p1 - p2)
    d2_ = _cross(s, q1 - p2)
    d3 = _cross(r, p2 - p1)
    d4 = _cross(r, q2 - p1)

    crossing = (((d1 > eps) & (d2_ < -eps)) | ((d1 < -eps) & (d2_ > eps))) & (
        ((d3 > eps) & (d4 < -eps)) | ((d3 < -eps) & (d4 > eps))
    )
    if crossing.any():
        return False

    slack = math.sqrt(eps)

    def on_segment(d, pt, a, b):
        lo = np.minimum(a, b) - slack
        hi = np.maximum(a, b) + slack
        boxed = ((pt >= lo) & (pt <= hi)).all(axis=1)
        return (np.abs(d) <= eps) & boxed

    touching = (
        on_segment(d1, p1, p2, q2)
        | on_segment(d2_, q1, p2, q2)
        | on_segment(d3, p2, p1, q1)
        | on_segment(d4, q2, p1, q1)
    )
    return not touching.any()


def _triangulate(coords: np.ndarray, eps: float) -> np.ndarray:
    """Ear-clip a CCW simple ring into an (n-2, 3, 2) triangle fan partition."""
    n = len(coords)
    idx = list(range(n))
    tris = np.empty((n - 2, 3, 2), dtype=np.float64)
    nt = 0
    xs = coords[:, 0]
    ys = coords[:, 1]

    while len(idx) > 3:
        m = len(idx)
        clipped = False
        for k in range(m):
            i0, i1, i2 = idx[k - 1], idx[k], idx[(k + 1) % m]
            ax, ay = xs[i0], ys[i0]
            bx, by = xs[i1], ys[i1]
            cx, cy = xs[i2], ys[i2]
            turn = (bx - ax) * (cy - by) - (by - ay) * (cx - bx)
            if turn <= eps:
                continue
            rest = [t for t in idx if t not in (i0, i1, i2)]
            px = xs[rest]
            py = ys[rest]
            c1 = (bx - ax) * (py - ay) - (by - ay) * (px - ax)
            c2 = (cx - bx) * (py - by) - (cy - by) * (px - bx)
            c3 = (ax - cx) * (py - cy) - (ay - cy) * (px - cx)
            if ((c1 >= -eps) & (c2 >= -eps) & (c3 >= -eps)).any():
                continue
            tris[nt, 0] = (ax, ay)
            tris[nt, 1] = (bx, by)
            tris[nt, 2] = (cx, cy)
            nt += 1
            del idx[k]
            clipped = True
            break
        if not clipped:
            # drop a vertex that sits on the straight line between its neighbours
            for k in range(m):
                i0, i1, i2 = idx[k - 1], idx[k], idx[(k + 1) % m]
                ab = coords[i1] - coords[i0]
                bc = coords[i2] - coords[i1]
                if abs(ab[0] * bc[1] - ab[1] * bc[0]) <= eps and float(ab @ bc) > 0.0:
                    del idx[k]
                    clipped = True
                    break
        if not clipped:
            raise NumericalDegeneracy(
                "ear clipping could not resolve the ring within epsilon"
            )
    tris[nt, 0] = coords[idx[0]]
    tris[nt, 1] = coords[idx[1]]
    tris[nt, 2] = coords[idx[2]]
    nt += 1
    return tris[:nt]


class PolygonRing:
    """A simple closed polygon (the last vertex is not a repeat of the first).

    Construction normalizes the ring: consecutive duplicates and collinear
    middles are removed, clockwise input is silently reversed to CCW, and the
    result is checked to be simple. Instances are immutable.
    """

    __slots__ = ("_coords", "_area", "_perimeter", "_tris", "_bounds")

    def __init__(self, vertices: Iterable, *, _trusted: bool = False):
        # trusted rings come from validated wireframes: already float64 and finite
        coords = (
            np.asarray(vertices, dtype=np.float64) if _trusted else as_point_array(vertices)
        )
        eps = _epsilon
        coords = _clean_ring(coords, eps)
        if len(coords) < 3:
            raise DegenerateInput("a polygon ring needs at least 3 non-collinear vertices")
        nxt = _shift(coords, 1)
        signed = 0.5 * float((coords[:, 0] * nxt[:, 1] - nxt[:, 0] * coords[:, 1]).sum())
        if abs(signed) <= eps:
            raise DegenerateInput("polygon ring has (near-)zero area")
        length = float(np.hypot(nxt[:, 0] - coords[:, 0], nxt[:, 1] - coords[:, 1]).sum())
        if signed < 0.0:
            coords = coords[::-1]
        if not _trusted and not _is_simple(coords, eps):
            raise DegenerateInput("polygon ring is not simple (edges touch or cross)")
        coords = np.ascontiguousarray(coords)
        coords.setflags(write=False)
        object.__setattr__(self, "_coords", coords)
        object.__setattr__(self, "_area", abs(signed))
        object.__setattr__(self, "_perimeter", length)
        object.__setattr__(self, "_tris", None)
        lo = coords.min(axis=0)
        hi = coords.max(axis=0)
        object.__setattr__(
            self, "_bounds", (float(lo[0]), float(lo[1]), float(hi[0]), float(hi[1]))
        )

    def __setattr__(self, name, value):
        raise AttributeError("PolygonRing is immutable")

    @property
    def coords(self) -> np.ndarray:
        """Read-only (n, 2) float64 vertex array, CCW."""
        return self._coords

    @property
    def vertices(self) -> tuple[Point2, ...]:
        return tuple(Point2(x, y) for x, y in self._coords)

    def __len__(self) -> int:
        return len(self._coords)

    def __repr__(self) -> str:
        return f"PolygonRing({len(self._coords)} vertices, area={self._area:.6g})"

    def __eq__(self, other) -> bool:
        if not isinstance(other, PolygonRing):
            return NotImplemented
        return self._coords.shape == other._coords.shape and bool(
            (self._coords == other._coords).all()
        )

    def __hash__(self) -> int:
        return hash(self._coords.tobytes())

    def bounds(self) -> tuple[float, float, float, float]:
        """(min_x, min_y, max_x, max_y) of the ring."""
        return self._bounds

    def triangulation(self) -> np.ndarray:
        """Cached (m, 3, 2) CCW triangle partition of the ring interior."""
        if self._tris is None:
            object.__setattr__(self, "_tris", _triangulate(self._coords, _epsilon))
        return self._tris

    def contains_points(self, points: Iterable, *, tol: float | None = None) -> np.ndarray:
        """Vectorized point-in-ring test (boolean per query point).

        Points within ``tol`` of the boundary count as inside; the default
        tolerance is sqrt(epsilon) pixels."""
        if tol is None:
            tol = math.sqrt(_epsilon)
        pts = as_point_array(points)
        nxt = _shift(self._coords, 1)
        cx = self._coords[:, 0][None, :]
        cy = self._coords[:, 1][None, :]
        nx = nxt[:, 0][None, :]
        ny = nxt[:, 1][None, :]
        x = pts[:, 0][:, None]
        y = pts[:, 1][:, None]

        crossing = (cy <= y) != (ny <= y)
        t = (y - cy) / np.where(crossing, ny - cy, 1.0)
        xc = cx + t * (nx - cx)
        inside = (((xc > x) & crossing).sum(axis=1) % 2).astype(bool)

        ex = nx - cx
        ey = ny - cy
        L2 = ex * ex + ey * ey
        s = np.clip(((x - cx) * ex + (y - cy) * ey) / np.where(L2 > 0, L2, 1.0), 0.0, 1.0)
        dx = cx + s * ex - x
        dy = cy + s * ey - y
        near = ((dx * dx + dy * dy) <= tol * tol).any(axis=1)
        return inside | near

    def contains_point(self, x: float, y: float, *, tol: float | None = None) -> bool:
        """Point-in-ring test; points within ``tol`` of the boundary count as inside."""
        return bool(self.contains_points(np.array([[x, y]]), tol=tol)[0])


def area(p: PolygonRing) -> float:
    """Enclosed area of the ring in square pixels (strictly positive)."""
    return p._area


def perimeter(p: PolygonRing) -> float:
    """Total edge length of the closed ring in pixels."""
    return p._perimeter


def convex_hull(points: Iterable) -> PolygonRing:
    """Convex hull of a point set as a CCW ring (Andrew's monotone chain).

    Collinear boundary points are dropped; raises DegenerateInput when all
    points are collinear.
    """
    pts = as_point_array(points)
    eps = _epsilon
    order = np.lexsort((pts[:, 1], pts[:, 0]))
    pts = pts[order]
    keep = np.ones(len(pts), dtype=bool)
    keep[1:] = (np.abs(np.diff(pts, axis=0)) > 0).any(axis=1)
    pts = pts[keep]
    if len(pts) < 3:
        raise DegenerateInput("convex hull needs at least 3 distinct points")

    def chain(seq):
        out: list[np.ndarray] = []
        for pt in seq:
            while len(out) >= 2 and _cross(out[-1] - out[-2], pt - out[-1]) <= eps:
                out.pop()
            out.append(pt)
        return out

    lower = chain(pts)
    upper = chain(pts[::-1])
    hull = lower[:-1] + upper[:-1]
    if len(hull) < 3:
        raise DegenerateInput("all points are collinear; hull is degenerate")
    return PolygonRing(np.array(hull), _trusted=True)


def convexity(p: PolygonRing) -> float:
    """Area over convex-hull area, in percent. 100 exactly for convex rings."""
    hull = convex_hull(p._coords)
    return min(100.0, 100.0 * p._area / hull._area)


def compactness(p: PolygonRing) -> float:
    """Polsby-Popper circularity, in percent: 100 * 4*pi*area / perimeter^2."""
    return 100.0 * 4.0 * math.pi * p._area / (p._perimeter * p._perimeter)


def intersection_area(a: PolygonRing, b: PolygonRing) -> float:
    """Area of the intersection of two simple rings (convex or not).

    Both rings are partitioned into triangles once (cached) and every
    overlapping triangle pair is clipped exactly, so shared edges and
    identical rings need no perturbation. Raises NumericalDegeneracy if a
    ring cannot be triangulated within epsilon.
    """
    ax0, ay0, ax1, ay1 = a.bounds()
    bx0, by0, bx1, by1 = b.bounds()
    if ax0 > bx1 or bx0 > ax1 or ay0 > by1 or by0 > ay1:
        return 0.0
    total = float(clip_area_sum(a.triangulation(), b.triangulation()))
    return max(0.0, min(total, a._area, b._area))


def iou(a: PolygonRing, b: PolygonRing) -> float:
    """Intersection over union of two rings, in [0, 1]."""
    inter = intersection_area(a, b)
    union = a._area + b._area - inter
    if union <= 0.0:
        return 1.0
    return max(0.0, min(1.0, inter / union))
