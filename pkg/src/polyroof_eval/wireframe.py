"""Vertex-edge planar graphs of roof annotations.

A :class:`Wireframe` is the raw annotation of one scene: indexed vertices plus
undirected edges forming a planar subdivision. Interior faces of the
subdivision are the roof segments; edge-connected groups of faces are
buildings. Point degree (edge incidence per vertex) is the connectivity
statistic used by the complexity features.

Note on degree: reported dataset averages for mean point degree run well above
what per-vertex edge incidence yields on typical roof graphs; this module
implements plain edge-incidence degree and leaves any alternative statistic to
callers.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .errors import DanglingEdge, DegenerateInput, EmptyGraph, NonPlanarInput
from .geometry import PolygonRing, as_point_array, get_epsilon

__all__ = [
    "Wireframe",
    "BuildingInstance",
    "point_degree_mean",
    "extract_faces",
    "assemble_buildings",
    "buildings_from_wireframe",
]


def _point_segment_dist2(pt, a, b):
    """Squared distance from points to segments, all arrays broadcastable."""
    ab = b - a
    L2 = (ab * ab).sum(axis=-1)
    ap = pt - a
    t = (ap * ab).sum(axis=-1) / np.where(L2 > 0, L2, 1.0)
    t = np.clip(t, 0.0, 1.0)
    d = a + t[..., None] * ab - pt
    return (d * d).sum(axis=-1)


def _cross(u, v):
    return u[..., 0] * v[..., 1] - u[..., 1] * v[..., 0]


class Wireframe:
    """Planar vertex-edge graph; immutable after construction.

    Construction validates: indices in range, no self-loops, no duplicate
    edges, no isolated vertices, distinct vertex coordinates, and a planar
    embedding (edges meet only at shared endpoint vertices). Raises
    NonPlanarInput when edges cross or touch anywhere else.
    """

    __slots__ = ("_coords", "_edges", "_cycles")

    def __init__(self, vertices: Iterable, edges: Iterable[Sequence[int]]):
        coords = (
            np.empty((0, 2), dtype=np.float64)
            if len(list_v := list(vertices)) == 0
            else as_point_array(list_v)
        )
        n = len(coords)
        edge_arr = np.asarray(list(edges), dtype=np.int64).reshape(-1, 2)
        eps = get_epsilon()

        if len(edge_arr):
            if edge_arr.min() < 0 or edge_arr.max() >= n:
                raise DegenerateInput("edge references a vertex index out of range")
            if (edge_arr[:, 0] == edge_arr[:, 1]).any():
                raise DegenerateInput("self-loop edges are not allowed")
            norm = np.sort(edge_arr, axis=1)
            if len(np.unique(norm, axis=0)) != len(norm):
                raise DegenerateInput("duplicate edges are not allowed")
            edge_arr = norm

        used = np.zeros(n, dtype=bool)
        if len(edge_arr):
            used[edge_arr.ravel()] = True
        if n and not used.all():
            missing = int(np.flatnonzero(~used)[0])
            raise DegenerateInput(f"vertex {missing} is isolated (no incident edge)")

        if n >= 2:
            diff = coords[:, None, :] - coords[None, :, :]
            d2 = (diff * diff).sum(axis=2)
            np.fill_diagonal(d2, np.inf)
            if (d2 <= eps).any():
                raise DegenerateInput("two vertices share the same coordinates")

        self._validate_planarity(coords, edge_arr, eps)

        coords.setflags(write=False)
        edge_arr.setflags(write=False)
        object.__setattr__(self, "_coords", coords)
        object.__setattr__(self, "_edges", edge_arr)
        object.__setattr__(self, "_cycles", None)

    def __setattr__(self, name, value):
        raise AttributeError("Wireframe is immutable")

    @staticmethod
    def _validate_planarity(coords, edge_arr, eps):
        E = len(edge_arr)
        if E < 2:
            return
        i_idx, j_idx = np.triu_indices(E, k=1)
        # bounding-box prefilter: disjoint edges cannot interact
        p_all, q_all = coords[edge_arr[:, 0]], coords[edge_arr[:, 1]]
        lo = np.minimum(p_all, q_all) - math.sqrt(eps)
        hi = np.maximum(p_all, q_all) + math.sqrt(eps)
        overlap = ((lo[i_idx] <= hi[j_idx]) & (lo[j_idx] <= hi[i_idx])).all(axis=1)
        i_idx, j_idx = i_idx[overlap], j_idx[overlap]
        if len(i_idx) == 0:
            return
        a1, b1 = edge_arr[i_idx, 0], edge_arr[i_idx, 1]
        a2, b2 = edge_arr[j_idx, 0], edge_arr[j_idx, 1]
        shares = (a1 == a2) | (a1 == b2) | (b1 == a2) | (b1 == b2)

        # disjoint index pairs: any contact at all is non-planar
        ns = ~shares
        if ns.any():
            p1, q1 = coords[a1[ns]], coords[b1[ns]]
            p2, q2 = coords[a2[ns]], coords[b2[ns]]
            r = q1 - p1
            s = q2 - p2
            d1 = _cross(s, p1 - p2)
            d2 = _cross(s, q1 - p2)
            d3 = _cross(r, p2 - p1)
            d4 = _cross(r, q2 - p1)
            crossing = (((d1 > eps) & (d2 < -eps)) | ((d1 < -eps) & (d2 > eps))) & (
                ((d3 > eps) & (d4 < -eps)) | ((d3 < -eps) & (d4 > eps))
            )
            touching = (
                (_point_segment_dist2(p1, p2, q2) <= eps)
                | (_point_segment_dist2(q1, p2, q2) <= eps)
                | (_point_segment_dist2(p2, p1, q1) <= eps)
                | (_point_segment_dist2(q2, p1, q1) <= eps)
            )
            bad = crossing | touching
            if bad.any():
                k = int(np.flatnonzero(bad)[0])
                ei, ej = i_idx[ns][k], j_idx[ns][k]
                raise NonPlanarInput(f"edges {int(ei)} and {int(ej)} intersect away from a shared vertex")

        # pairs sharing a vertex: reject collinear overlap beyond the shared point
        sh = shares
        if sh.any():
            A1, B1, A2, B2 = a1[sh], b1[sh], a2[sh], b2[sh]
            s_idx = np.where((A1 == A2) | (A1 == B2), A1, B1)
            u_idx = np.where(A1 == s_idx, B1, A1)
            w_idx = np.where(A2 == s_idx, B2, A2)
            su = coords[u_idx] - coords[s_idx]
            sw = coords[w_idx] - coords[s_idx]
            overlap = (np.abs(_cross(su, sw)) <= eps) & ((su * sw).sum(axis=1) > 0)
            if overlap.any():
                k = int(np.flatnonzero(overlap)[0])
                ei, ej = i_idx[sh][k], j_idx[sh][k]
                raise NonPlanarInput(f"edges {int(ei)} and {int(ej)} overlap along a shared direction")

    @property
    def coords(self) -> np.ndarray:
        return self._coords

    @property
    def edges(self) -> np.ndarray:
        """(E, 2) int64 array of vertex index pairs, normalized to i < j."""
        return self._edges

    @property
    def n_vertices(self) -> int:
        return len(self._coords)

    @property
    def n_edges(self) -> int:
        return len(self._edges)

    def degrees(self) -> np.ndarray:
        """Edge-incidence count per vertex."""
        deg = np.zeros(len(self._coords), dtype=np.int64)
        if len(self._edges):
            np.add.at(deg, self._edges.ravel(), 1)
        return deg

    def connected_components(self) -> list[list[int]]:
        """Vertex index lists of the graph's connected components, sorted."""
        n = len(self._coords)
        parent = list(range(n))

        def find(x):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        for i, j in self._edges:
            ri, rj = find(int(i)), find(int(j))
            if ri != rj:
                parent[ri] = rj
        groups: dict[int, list[int]] = {}
        for v in range(n):
            groups.setdefault(find(v), []).append(v)
        return sorted(groups.values(), key=lambda g: g[0])

    def face_cycles(self) -> list[list[int]]:
        """Vertex index cycles of all interior faces (outer faces excluded).

        Traversal: around each vertex, outgoing edges are sorted by angle;
        from an incoming half-edge the walk continues along the next edge
        clockwise from its reversal, which walks every face exactly once.
        Interior faces come out counter-clockwise; the clockwise walk per
        component is the unbounded face and is dropped. Raises DanglingEdge
        if an edge borders the outer region on both sides (a bridge).
        """
        if self._cycles is not None:
            return self._cycles
        coords = self._coords
        pts = [(float(x), float(y)) for x, y in coords]
        neighbors: dict[int, list[int]] = {}
        for i, j in self._edges:
            neighbors.setdefault(int(i), []).append(int(j))
            neighbors.setdefault(int(j), []).append(int(i))

        order_pos: dict[tuple[int, int], int] = {}
        for v, nbrs in neighbors.items():
            vx, vy = pts[v]
            ranked = sorted(nbrs, key=lambda u: math.atan2(pts[u][1] - vy, pts[u][0] - vx))
            neighbors[v] = ranked
            for pos, u in enumerate(ranked):
                order_pos[(v, u)] = pos

        edge_index = {(int(i), int(j)): k for k, (i, j) in enumerate(self._edges)}

        def index_of(u, v):
            return edge_index[(u, v) if u < v else (v, u)]

        visited: set[tuple[int, int]] = set()
        cycles: list[list[int]] = []
        starts = sorted(
            [(int(i), int(j)) for i, j in self._edges] + [(int(j), int(i)) for i, j in self._edges]
        )
        for start in starts:
            if start in visited:
                continue
            walk: list[tuple[int, int]] = []
            here = start
            while True:
                visited.add(here)
                walk.append(here)
                u, v = here
                ring = neighbors[v]
                pos = order_pos[(v, u)]
                here = (v, ring[pos - 1])
                if here == start:
                    break
            walk_set = set(walk)
            for (u, v) in walk:
                if (v, u) in walk_set:
                    raise DanglingEdge(index_of(u, v))
            cycle = [u for (u, _) in walk]
            signed = 0.0
            for (u, _), (v, _) in zip(walk, walk[1:] + walk[:1]):
                signed += pts[u][0] * pts[v][1] - pts[v][0] * pts[u][1]
            if signed <= 0.0:
                continue
            k = cycle.index(min(cycle))
            cycles.append(cycle[k:] + cycle[:k])
        cycles.sort()
        object.__setattr__(self, "_cycles", cycles)
        return cycles


@dataclass(frozen=True)
class BuildingInstance:
    """One building: its outline ring plus the roof-segment rings it contains."""

    building_id: str
    outline: PolygonRing
    segments: tuple[tuple[str, PolygonRing], ...]
    vertex_ids: frozenset[int] | None = field(default=None, compare=False)

    def __post_init__(self):
        if len(self.segments) < 1:
            raise DegenerateInput(f"building {self.building_id} has no segments")
        ids = [sid for sid, _ in self.segments]
        if len(set(ids)) != len(ids):
            raise DegenerateInput(f"building {self.building_id} has duplicate segment ids")
        tol = max(math.sqrt(get_epsilon()), 1e-6)
        stacked = np.vstack([ring.coords for _, ring in self.segments])
        ok = self.outline.contains_points(stacked, tol=tol)
        if not ok.all():
            offset = 0
            for sid, ring in self.segments:
                if not ok[offset : offset + len(ring.coords)].all():
                    raise DegenerateInput(
                        f"segment {sid} of building {self.building_id} leaves the outline"
                    )
                offset += len(ring.coords)

    @property
    def segment_rings(self) -> list[PolygonRing]:
        return [ring for _, ring in self.segments]


def point_degree_mean(w: Wireframe) -> float:
    """Mean edge-incidence degree over all vertices (>= 1 on valid graphs)."""
    if w.n_vertices == 0:
        raise EmptyGraph("wireframe has no vertices")
    return float(w.degrees().mean())


def extract_faces(w: Wireframe) -> list[PolygonRing]:
    """All bounded faces of the planar subdivision as CCW rings.

    The unbounded outer face is excluded; for a connected graph the count
    equals E - V + 1. Output order is canonical (independent of the edge
    list order). Collinear pass-through vertices (T-junctions) are cleaned
    from the rings.
    """
    return [PolygonRing(w.coords[cyc], _trusted=True) for cyc in w.face_cycles()]


def _collinear_overlap_length(p1, q1, p2, q2, eps) -> float:
    d1 = q1 - p1
    if abs(float(_cross(d1, q2 - p2))) > eps or abs(float(_cross(d1, p2 - p1))) > eps:
        return 0.0
    L2 = float(d1 @ d1)
    if L2 <= eps:
        return 0.0
    ta = float((p2 - p1) @ d1) / L2
    tb = float((q2 - p1) @ d1) / L2
    lo, hi = min(ta, tb), max(ta, tb)
    return max(0.0, (min(1.0, hi) - max(0.0, lo))) * math.sqrt(L2)


def _faces_adjacent(a: PolygonRing, b: PolygonRing, eps: float) -> bool:
    """True if the two rings share at least one full (collinear, positive-length) edge run."""
    ax0, ay0, ax1, ay1 = a.bounds()
    bx0, by0, bx1, by1 = b.bounds()
    slack = math.sqrt(eps)
    if ax0 > bx1 + slack or bx0 > ax1 + slack or ay0 > by1 + slack or by0 > ay1 + slack:
        return False
    pa = a.coords
    qa = np.roll(pa, -1, axis=0)
    pb = b.coords
    qb = np.roll(pb, -1, axis=0)
    min_len = max(slack, 1e-9)
    for i in range(len(pa)):
        for j in range(len(pb)):
            if _collinear_overlap_length(pa[i], qa[i], pb[j], qb[j], eps) > min_len:
                return True
    return False


def _components_from_pairs(n: int, pairs: Iterable[tuple[int, int]]) -> list[list[int]]:
    parent = list(range(n))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for i, j in pairs:
        ri, rj = find(i), find(j)
        if ri != rj:
            parent[max(ri, rj)] = min(ri, rj)
    groups: dict[int, list[int]] = {}
    for k in range(n):
        groups.setdefault(find(k), []).append(k)
    return sorted(groups.values(), key=lambda g: g[0])


def _union_outline(rings: Sequence[PolygonRing]) -> PolygonRing:
    """Boundary of the union of interior-disjoint CCW rings sharing exact edges.

    Directed ring edges are fragmented at every other ring vertex lying on
    them, interior fragments cancel against their reversals, and the
    remaining boundary chain is retraced. Raises DegenerateInput for holed
    or self-touching unions (not modeled).
    """
    if len(rings) == 1:
        return rings[0]
    eps = get_epsilon()
    pool = np.unique(np.vstack([r.coords for r in rings]), axis=0)
    pool_pts = [(float(x), float(y)) for x, y in pool]

    starts = np.vstack([r.coords for r in rings])
    ends = np.vstack([np.concatenate((r.coords[1:], r.coords[:1])) for r in rings])
    ab = ends - starts
    L2 = (ab * ab).sum(axis=1)
    ap = pool[None, :, :] - starts[:, None, :]
    t = (ap * ab[:, None, :]).sum(axis=2) / L2[:, None]
    proj = starts[:, None, :] + np.clip(t, 0.0, 1.0)[..., None] * ab[:, None, :]
    d = proj - pool[None, :, :]
    on_interior = ((d * d).sum(axis=2) <= eps) & (t > 1e-12) & (t < 1.0 - 1e-12)
    fragmented = on_interior.any(axis=1)

    starts_list = [tuple(p) for p in starts.tolist()]
    ends_list = [tuple(p) for p in ends.tolist()]
    frag_list = fragmented.tolist()
    counts: dict[tuple[tuple[float, float], tuple[float, float]], int] = {}
    for k, (a, b) in enumerate(zip(starts_list, ends_list)):
        if frag_list[k]:
            inner = np.flatnonzero(on_interior[k])
            stops = [a] + [pool_pts[i] for i in inner[np.argsort(t[k, inner])]] + [b]
            for u, v in zip(stops[:-1], stops[1:]):
                counts[(u, v)] = counts.get((u, v), 0) + 1
        else:
            counts[(a, b)] = counts.get((a, b), 0) + 1

    boundary = [(u, v) for (u, v), c in counts.items() for _ in range(c) if (v, u) not in counts]
    successor: dict[tuple[float, float], tuple[float, float]] = {}
    for u, v in boundary:
        if u in successor:
            raise DegenerateInput("building outline touches itself (pinch vertex)")
        successor[u] = v
    if not successor:
        raise DegenerateInput("faces cancel completely; no outline boundary found")

    start = min(successor)
    trace = [start]
    here = successor[start]
    while here != start:
        trace.append(here)
        here = successor[here]
        if len(trace) > len(boundary):
            raise DegenerateInput("outline boundary does not close")
    if len(trace) != len(boundary):
        raise DegenerateInput("building outline has a hole (multi-ring outlines not modeled)")
    return PolygonRing(np.array(trace), _trusted=True)


def assemble_buildings(
    faces: Sequence[PolygonRing],
    adjacency: Iterable[tuple[int, int]] | None = None,
) -> list[BuildingInstance]:
    """Group pairwise interior-disjoint faces into buildings.

    Faces sharing at least one full edge belong to the same building
    (vertex-touching faces stay separate); each building's outline is the
    union boundary of its faces. ``adjacency`` overrides the geometric
    edge-sharing test with explicit face index pairs. Ids are assigned in
    face order: buildings ``b000...``, segments ``s000...`` within each.
    """
    faces = list(faces)
    if adjacency is None:
        eps = get_epsilon()
        adjacency = [
            (i, j)
            for i in range(len(faces))
            for j in range(i + 1, len(faces))
            if _faces_adjacent(faces[i], faces[j], eps)
        ]
    buildings = []
    for bi, group in enumerate(_components_from_pairs(len(faces), adjacency)):
        rings = [faces[k] for k in group]
        outline = _union_outline(rings)
        segments = tuple((f"s{si:03d}", ring) for si, ring in enumerate(rings))
        buildings.append(BuildingInstance(f"b{bi:03d}", outline, segments))
    return buildings


def buildings_from_wireframe(w: Wireframe) -> list[BuildingInstance]:
    """Canonical wireframe-to-buildings pipeline.

    Extracts interior faces, groups them by shared wireframe edges, and
    attaches each building's wireframe vertex index set (taken from the raw
    face cycles, so collinear T-junction vertices are kept even though the
    cleaned rings drop them).
    """
    cycles = w.face_cycles()
    faces = [PolygonRing(w.coords[cyc], _trusted=True) for cyc in cycles]

    edge_faces: dict[tuple[int, int], list[int]] = {}
    for fi, cyc in enumerate(cycles):
        for a, b in zip(cyc, cyc[1:] + cyc[:1]):
            key = (a, b) if a < b else (b, a)
            edge_faces.setdefault(key, []).append(fi)
    pairs = [(fs[0], fs[1]) for fs in edge_faces.values() if len(fs) == 2]

    buildings = []
    for bi, group in enumerate(_components_from_pairs(len(faces), pairs)):
        rings = [faces[k] for k in group]
        outline = _union_outline(rings)
        segments = tuple((f"s{si:03d}", ring) for si, ring in enumerate(rings))
        vids = frozenset(v for k in group for v in cycles[k])
        buildings.append(BuildingInstance(f"b{bi:03d}", outline, segments, vertex_ids=vids))
    return buildings
