"""Per-building complexity features, PCA scoring, and balanced dataset splitting.

Four features are computed per building: vertex count, mean point degree,
convexity, and compactness. A PCA is fitted on the z-scored feature matrix
and each building is scored by its projection onto the SECOND principal
component (deliberately, not the first), rescaled to 0-100 using the
fitting set's min/max projections. Splitting stratifies scenes by their
mean score into quantile bins so every complexity level feeds every split.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, replace
from typing import Iterable, Sequence

import numpy as np

from .errors import DegenerateInput, DegenerateVariance, InsufficientData
from .geometry import compactness, convexity, get_epsilon
from .wireframe import BuildingInstance, Wireframe, _point_segment_dist2

__all__ = [
    "FEATURE_NAMES",
    "ComplexityRecord",
    "PcaModel",
    "SplitManifest",
    "featurize",
    "fit_pca",
    "pca_score",
    "score_records",
    "histogram",
    "stratified_split",
    "jacobi_eigh",
]

FEATURE_NAMES = ("num_vertices", "point_degree", "convexity", "compactness")


@dataclass(frozen=True)
class ComplexityRecord:
    """Feature vector of one building, plus its PCA score once fitted."""

    scene_id: str
    building_id: str
    num_vertices: int
    point_degree: float
    convexity: float
    compactness: float
    pca_score: float | None = None

    def __post_init__(self):
        if self.num_vertices < 3:
            raise DegenerateInput(f"building {self.building_id}: num_vertices must be >= 3")
        if self.point_degree < 1.0:
            raise DegenerateInput(f"building {self.building_id}: point_degree must be >= 1")
        for name in ("convexity", "compactness"):
            v = getattr(self, name)
            if not (0.0 < v <= 100.0):
                raise DegenerateInput(f"building {self.building_id}: {name}={v} outside (0, 100]")

    def features(self) -> np.ndarray:
        return np.array(
            [self.num_vertices, self.point_degree, self.convexity, self.compactness],
            dtype=np.float64,
        )


def _building_vertex_ids(b: BuildingInstance, w: Wireframe) -> np.ndarray:
    """Wireframe vertex indices lying on the building's segment boundaries."""
    if b.vertex_ids is not None:
        return np.fromiter(sorted(b.vertex_ids), dtype=np.int64)
    eps = get_epsilon()
    pts = w.coords
    hit = np.zeros(len(pts), dtype=bool)
    for ring in b.segment_rings:
        a = ring.coords
        q = np.roll(a, -1, axis=0)
        d2 = _point_segment_dist2(pts[:, None, :], a[None, :, :], q[None, :, :])
        hit |= (d2 <= eps).any(axis=1)
    return np.flatnonzero(hit)


def featurize(b: BuildingInstance, w: Wireframe, scene_id: str = "") -> ComplexityRecord:
    """Complexity features of one building against its source wireframe.

    Vertex count and point degree are taken from the wireframe vertices that
    belong to the building (its raw face cycles when available, otherwise the
    vertices found on its segment boundaries); convexity and compactness are
    computed on the outline ring.
    """
    ids = _building_vertex_ids(b, w)
    if len(ids) < 3:
        raise DegenerateInput(f"building {b.building_id} touches fewer than 3 wireframe vertices")
    deg = w.degrees()[ids]
    return ComplexityRecord(
        scene_id=scene_id,
        building_id=b.building_id,
        num_vertices=int(len(ids)),
        point_degree=float(deg.mean()),
        convexity=convexity(b.outline),
        compactness=compactness(b.outline),
    )


def jacobi_eigh(matrix: np.ndarray, tol: float = 1e-12, max_sweeps: int = 100):
    """Eigen-decomposition of a small symmetric matrix by cyclic Jacobi rotations.

    Sweeps run until every off-diagonal entry is below ``tol``. Returns
    (eigenvalues, components) with eigenvalues in descending order and
    components as rows of an orthonormal matrix.
    """
    A = np.array(matrix, dtype=np.float64)
    n = A.shape[0]
    if A.shape != (n, n) or not np.allclose(A, A.T, atol=1e-9):
        raise ValueError("jacobi_eigh expects a symmetric square matrix")
    V = np.eye(n)
    for _ in range(max_sweeps):
        off = np.abs(A - np.diag(np.diag(A))).max()
        if off < tol:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = A[p, q]
                if abs(apq) < tol * 1e-3:
                    continue
                theta = (A[q, q] - A[p, p]) / (2.0 * apq)
                t = math.copysign(1.0, theta) / (abs(theta) + math.sqrt(theta * theta + 1.0))
                c = 1.0 / math.sqrt(t * t + 1.0)
                s = t * c
                rot_p = c * A[:, p] - s * A[:, q]
                rot_q = s * A[:, p] + c * A[:, q]
                A[:, p], A[:, q] = rot_p, rot_q
                rot_p = c * A[p, :] - s * A[q, :]
                rot_q = s * A[p, :] + c * A[q, :]
                A[p, :], A[q, :] = rot_p, rot_q
                rot_p = c * V[:, p] - s * V[:, q]
                rot_q = s * V[:, p] + c * V[:, q]
                V[:, p], V[:, q] = rot_p, rot_q
    eigenvalues = np.diag(A).copy()
    order = np.argsort(-eigenvalues, kind="stable")
    return eigenvalues[order], V[:, order].T


@dataclass(frozen=True)
class PcaModel:
    """Standardization constants and principal axes of the feature matrix.

    ``components`` rows are principal axes in descending eigenvalue order,
    sign-fixed so each row's largest-magnitude loading is positive.
    ``score_lo``/``score_hi`` are the fitting set's min/max projections onto
    the second component, used to rescale scores to 0-100.
    """

    feature_means: np.ndarray
    feature_stds: np.ndarray
    components: np.ndarray
    eigenvalues: np.ndarray
    score_lo: float
    score_hi: float
    feature_names: tuple[str, ...] = FEATURE_NAMES

    def standardize(self, X: np.ndarray) -> np.ndarray:
        return (np.asarray(X, dtype=np.float64) - self.feature_means) / self.feature_stds

    def project(self, X: np.ndarray) -> np.ndarray:
        """Projections of raw feature rows onto all principal axes."""
        return self.standardize(X) @ self.components.T

    def to_dict(self) -> dict:
        return {
            "feature_names": list(self.feature_names),
            "feature_means": self.feature_means.tolist(),
            "feature_stds": self.feature_stds.tolist(),
            "components": self.components.tolist(),
            "eigenvalues": self.eigenvalues.tolist(),
            "score_lo": self.score_lo,
            "score_hi": self.score_hi,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "PcaModel":
        return cls(
            feature_means=np.array(d["feature_means"], dtype=np.float64),
            feature_stds=np.array(d["feature_stds"], dtype=np.float64),
            components=np.array(d["components"], dtype=np.float64),
            eigenvalues=np.array(d["eigenvalues"], dtype=np.float64),
            score_lo=float(d["score_lo"]),
            score_hi=float(d["score_hi"]),
            feature_names=tuple(d["feature_names"]),
        )


def fit_pca(records: Sequence[ComplexityRecord]) -> PcaModel:
    """Fit the complexity PCA: z-score features, then eigen-decompose the
    4x4 sample covariance with the Jacobi solver.

    Raises InsufficientData for fewer than 5 records and DegenerateVariance
    (naming the features) when any feature is constant.
    """
    if len(records) < 5:
        raise InsufficientData(f"PCA needs at least 5 records, got {len(records)}")
    X = np.stack([r.features() for r in records])
    means = X.mean(axis=0)
    stds = X.std(axis=0, ddof=1)
    dead = stds <= 1e-12 * np.maximum(1.0, np.abs(means))
    if dead.any():
        raise DegenerateVariance(tuple(n for n, d in zip(FEATURE_NAMES, dead) if d))
    Z = (X - means) / stds
    cov = (Z.T @ Z) / (len(records) - 1)
    eigenvalues, components = jacobi_eigh(cov)
    eigenvalues = np.maximum(eigenvalues, 0.0)
    for row in components:
        k = int(np.argmax(np.abs(row)))
        if row[k] < 0:
            row *= -1.0
    proj2 = Z @ components[1]
    return PcaModel(
        feature_means=means,
        feature_stds=stds,
        components=components,
        eigenvalues=eigenvalues,
        score_lo=float(proj2.min()),
        score_hi=float(proj2.max()),
    )


def pca_score(m: PcaModel, r: ComplexityRecord) -> float:
    """Score of one record: second-component projection rescaled to 0-100.

    The fitting set's extreme projections map to 0 and 100; out-of-fit
    records are clamped into [0, 100].
    """
    proj = float(m.standardize(r.features()) @ m.components[1])
    span = m.score_hi - m.score_lo
    if span <= 0.0:
        return 0.0
    return float(np.clip(100.0 * (proj - m.score_lo) / span, 0.0, 100.0))


def score_records(m: PcaModel, records: Iterable[ComplexityRecord]) -> list[ComplexityRecord]:
    return [replace(r, pca_score=pca_score(m, r)) for r in records]


def histogram(scores: Sequence[float], bins: int) -> list[tuple[float, float, int]]:
    """Equal-width histogram over [min, max]; the max value lands in the last bin.

    Returns (bin_lo, bin_hi, count) triples whose counts sum to len(scores).
    """
    if bins < 1:
        raise ValueError("bins must be >= 1")
    arr = np.asarray(list(scores), dtype=np.float64)
    if arr.size == 0:
        raise ValueError("scores must be non-empty")
    counts, edges = np.histogram(arr, bins=bins)
    return [(float(edges[k]), float(edges[k + 1]), int(counts[k])) for k in range(bins)]


@dataclass(frozen=True)
class SplitManifest:
    """Scene-id partition into train/val/test plus the binning that produced it."""

    train: tuple[str, ...]
    val: tuple[str, ...]
    test: tuple[str, ...]
    bin_edges: tuple[float, ...]
    ratios: tuple[float, float, float]
    seed: int

    def to_dict(self) -> dict:
        return {
            "train": list(self.train),
            "val": list(self.val),
            "test": list(self.test),
            "bin_edges": list(self.bin_edges),
            "ratios": list(self.ratios),
            "seed": self.seed,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "SplitManifest":
        return cls(
            train=tuple(d["train"]),
            val=tuple(d["val"]),
            test=tuple(d["test"]),
            bin_edges=tuple(float(x) for x in d["bin_edges"]),
            ratios=tuple(float(x) for x in d["ratios"]),
            seed=int(d["seed"]),
        )


def _largest_remainder(size: int, ratios: Sequence[float]) -> list[int]:
    quotas = [size * r for r in ratios]
    alloc = [int(math.floor(q)) for q in quotas]
    rest = size - sum(alloc)
    remainders = sorted(range(len(ratios)), key=lambda k: (-(quotas[k] - alloc[k]), k))
    for k in remainders[:rest]:
        alloc[k] += 1
    # bins of 3+ scenes should feed every split; shift one seat when rounding
    # starved a split, but never move a donor more than one scene from its quota
    if size >= 3:
        for k, a in enumerate(alloc):
            if a > 0:
                continue
            donors = [
                d
                for d in range(len(alloc))
                if alloc[d] >= 2 and abs(alloc[d] - 1 - quotas[d]) <= 1.0 + 1e-9
            ]
            if donors:
                donor = max(donors, key=lambda d: (alloc[d] - quotas[d], alloc[d], -d))
                alloc[donor] -= 1
                alloc[k] += 1
    return alloc


def stratified_split(
    records: Sequence[ComplexityRecord],
    ratios: Sequence[float] = (0.7, 0.15, 0.15),
    bins: int = 5,
    seed: int = 42,
) -> SplitManifest:
    """Deterministic PCA-balanced scene split.

    Scenes are ranked by the mean score of their buildings and grouped into
    quantile bins; within each bin scenes are shuffled (Mersenne Twister
    seeded with ``seed``) and dealt to train/val/test by largest-remainder
    rounding of the ratios. Scenes are never split across sets. Bins are
    rounded independently, so tiny datasets need proportionally few bins or
    the minority splits can end up empty (InsufficientData).
    """
    ratios = tuple(float(r) for r in ratios)
    if len(ratios) != 3 or any(r <= 0 for r in ratios):
        raise ValueError("ratios must be three positive numbers")
    if abs(sum(ratios) - 1.0) > 1e-9:
        raise ValueError(f"ratios must sum to 1, got {sum(ratios)}")
    if bins < 1:
        raise ValueError("bins must be >= 1")
    by_scene: dict[str, list[float]] = {}
    for r in records:
        if r.pca_score is None:
            raise ValueError(f"record {r.scene_id}/{r.building_id} has no pca_score; fit and score first")
        by_scene.setdefault(r.scene_id, []).append(r.pca_score)
    if not by_scene:
        raise InsufficientData("no records to split")

    scene_ids = sorted(by_scene)
    scene_scores = np.array([float(np.mean(by_scene[s])) for s in scene_ids])
    edges = np.quantile(scene_scores, np.linspace(0.0, 1.0, bins + 1))
    which = np.clip(np.searchsorted(edges[1:-1], scene_scores, side="right"), 0, bins - 1)

    rng = random.Random(seed)
    splits: tuple[list[str], list[str], list[str]] = ([], [], [])
    for b in range(bins):
        members = [scene_ids[k] for k in np.flatnonzero(which == b)]
        if not members:
            continue
        rng.shuffle(members)
        alloc = _largest_remainder(len(members), ratios)
        pos = 0
        for split_k, count in enumerate(alloc):
            splits[split_k].extend(members[pos : pos + count])
            pos += count
    if any(len(s) == 0 for s in splits):
        raise InsufficientData(
            f"split of {len(scene_ids)} scenes with ratios {ratios} leaves an empty set"
        )
    return SplitManifest(
        train=tuple(sorted(splits[0])),
        val=tuple(sorted(splits[1])),
        test=tuple(sorted(splits[2])),
        bin_edges=tuple(float(e) for e in edges),
        ratios=ratios,
        seed=seed,
    )
