"""Instance matching and the evaluation metric suite.

Predictions are scored against ground truth at two granularities: building
outlines and roof segments, both matched one-to-one by optimal assignment on
the IoU matrix under a threshold (default 0.5). On top of the matching sit
five metrics: point position accuracy (RMSE of matched corner points), line
distance accuracy (mean of Hausdorff and discrete Fréchet distances over
matched outlines), building and roof-segment F1 scores, and the
reconstruction score (harmonic mean of the two F1s). The area-segmentation
score sums the three F1 fractions into a 0-3 quality score.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy.optimize import linear_sum_assignment

from ._kernels import frechet_dp
from .geometry import PolygonRing, as_point_array, iou
from .wireframe import BuildingInstance

__all__ = [
    "MatchSet",
    "EvalConfig",
    "EvalReport",
    "match_instances",
    "match_from_scores",
    "point_position_accuracy",
    "hausdorff",
    "frechet_discrete",
    "line_distance_accuracy",
    "instance_f1",
    "reconstruction_score",
    "area_segmentation_score",
    "evaluate_scene",
    "aggregate_reports",
    "scene_corner_points",
]


@dataclass(frozen=True)
class MatchSet:
    """One-to-one matching between ground-truth and predicted instances."""

    pairs: tuple[tuple[int, int, float], ...]
    unmatched_gt: tuple[int, ...]
    unmatched_pred: tuple[int, ...]
    iou_threshold: float


@dataclass(frozen=True)
class EvalConfig:
    """Thresholds for scene evaluation.

    ``point_radius`` bounds corner matching; 5 px is loose against typical
    corner RMSEs (around 1.3 px) yet tight enough to avoid cross-corner
    matches. ``densify_step`` optionally inserts boundary points every so
    many pixels before line distances are computed.
    """

    iou_threshold: float = 0.5
    point_radius: float = 5.0
    densify_step: float | None = None


def match_from_scores(scores: np.ndarray, threshold: float) -> MatchSet:
    """Optimal one-to-one matching on a gt x pred score matrix.

    Maximizes the total score over pairs scoring at least ``threshold``
    (lower entries are forbidden). Among equally optimal matchings, pairs
    earlier in (gt, pred) lexicographic order are preferred via an
    infinitesimal bias on the leading cells.
    """
    scores = np.asarray(scores, dtype=np.float64)
    n_gt, n_pred = scores.shape if scores.ndim == 2 else (0, 0)
    if n_gt == 0 or n_pred == 0:
        return MatchSet((), tuple(range(n_gt)), tuple(range(n_pred)), threshold)
    allowed = scores >= threshold
    masked = np.where(allowed, scores, 0.0)
    cell = np.arange(n_gt * n_pred, dtype=np.float64).reshape(n_gt, n_pred)
    masked = masked + np.where(allowed, 1e-12 * np.exp2(-cell), 0.0)
    rows, cols = linear_sum_assignment(masked, maximize=True)
    pairs = tuple(
        (int(i), int(j), float(scores[i, j]))
        for i, j in sorted(zip(rows, cols))
        if allowed[i, j]
    )
    used_gt = {i for i, _, _ in pairs}
    used_pred = {j for _, j, _ in pairs}
    return MatchSet(
        pairs=pairs,
        unmatched_gt=tuple(i for i in range(n_gt) if i not in used_gt),
        unmatched_pred=tuple(j for j in range(n_pred) if j not in used_pred),
        iou_threshold=threshold,
    )


def match_instances(
    gt: Sequence[PolygonRing],
    pred: Sequence[PolygonRing],
    iou_threshold: float = 0.5,
) -> MatchSet:
    """Match predicted polygons to ground truth by maximum total IoU.

    Pairs below ``iou_threshold`` are never matched. Disjoint bounding boxes
    skip the clipping entirely.
    """
    if not 0.0 < iou_threshold <= 1.0:
        raise ValueError("iou_threshold must be in (0, 1]")
    scores = np.zeros((len(gt), len(pred)))
    g_bounds = [g.bounds() for g in gt]
    p_bounds = [p.bounds() for p in pred]
    for i, g in enumerate(gt):
        gx0, gy0, gx1, gy1 = g_bounds[i]
        for j, p in enumerate(pred):
            px0, py0, px1, py1 = p_bounds[j]
            if gx0 > px1 or px0 > gx1 or gy0 > py1 or py0 > gy1:
                continue
            scores[i, j] = iou(g, p)
    return match_from_scores(scores, iou_threshold)


def _squared_distance_matrix(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    diff = a[:, None, :] - b[None, :, :]
    return diff[..., 0] * diff[..., 0] + diff[..., 1] * diff[..., 1]


def _match_points(gt: np.ndarray, pred: np.ndarray, radius: float):
    """Min-cost point assignment within ``radius``; returns (i, j, d2) triples."""
    if len(gt) == 0 or len(pred) == 0:
        return []
    d2 = _squared_distance_matrix(gt, pred)
    r2 = radius * radius
    big = r2 * (min(d2.shape) + 1.0) + 1.0
    cost = np.where(d2 <= r2, d2, big)
    rows, cols = linear_sum_assignment(cost)
    return [
        (int(i), int(j), float(d2[i, j]))
        for i, j in zip(rows, cols)
        if d2[i, j] <= r2
    ]


def point_position_accuracy(
    gt_points: Sequence, pred_points: Sequence, radius: float = 5.0
) -> tuple[float, float]:
    """(RMSE, match rate) of corner points under radius-bounded assignment.

    The assignment minimizes total squared distance among pairs within
    ``radius``; RMSE is over matched pairs only and the match rate is
    matched / max(len(gt), len(pred)). Returns (0.0, 0.0) when nothing
    matches.
    """
    if radius <= 0:
        raise ValueError("radius must be positive")
    gt = as_point_array(gt_points) if len(gt_points) else np.empty((0, 2))
    pred = as_point_array(pred_points) if len(pred_points) else np.empty((0, 2))
    pairs = _match_points(gt, pred, radius)
    denom = max(len(gt), len(pred))
    if not pairs or denom == 0:
        return 0.0, 0.0
    rmse = math.sqrt(math.fsum(d2 for _, _, d2 in pairs) / len(pairs))
    return rmse, len(pairs) / denom


def hausdorff(a: Sequence, b: Sequence) -> float:
    """Symmetric point-set Hausdorff distance between two vertex sequences."""
    pa = as_point_array(a)
    pb = as_point_array(b)
    if len(pa) == 0 or len(pb) == 0:
        raise ValueError("hausdorff needs non-empty point sequences")
    d2 = _squared_distance_matrix(pa, pb)
    return math.sqrt(max(d2.min(axis=1).max(), d2.min(axis=0).max()))


def frechet_discrete(a: Sequence, b: Sequence) -> float:
    """Discrete Fréchet distance between two ordered polylines."""
    pa = as_point_array(a)
    pb = as_point_array(b)
    if len(pa) == 0 or len(pb) == 0:
        raise ValueError("frechet_discrete needs non-empty point sequences")
    d2 = np.ascontiguousarray(_squared_distance_matrix(pa, pb))
    return math.sqrt(float(frechet_dp(d2)))


def _densify(coords: np.ndarray, step: float) -> np.ndarray:
    out = []
    n = len(coords)
    for k in range(n):
        p = coords[k]
        q = coords[(k + 1) % n]
        seg = math.hypot(q[0] - p[0], q[1] - p[1])
        pieces = max(1, int(math.ceil(seg / step)))
        for t in range(pieces):
            out.append(p + (q - p) * (t / pieces))
    return np.array(out)


def _aligned_sequences(g: PolygonRing, p: PolygonRing, densify_step: float | None):
    """Vertex sequences for line distances: pred rolled to start nearest gt's start."""
    gc = g.coords
    pc = p.coords
    d2 = ((pc - gc[0]) ** 2).sum(axis=1)
    pc = np.roll(pc, -int(np.argmin(d2)), axis=0)
    if densify_step is not None:
        gc = _densify(gc, densify_step)
        pc = _densify(pc, densify_step)
    return gc, pc


def line_distance_accuracy(
    matches: MatchSet,
    gt: Sequence[PolygonRing],
    pred: Sequence[PolygonRing],
    densify_step: float | None = None,
) -> float:
    """Mean of Hausdorff and Fréchet distances over all matched ring pairs.

    Each predicted ring is rotated to start at the vertex nearest its ground
    truth ring's first vertex (orientations already agree: rings are CCW).
    With no matched pairs the result is NaN, never a silent zero.
    """
    if not matches.pairs:
        return math.nan
    values = []
    for gi, pi, _ in matches.pairs:
        gc, pc = _aligned_sequences(gt[gi], pred[pi], densify_step)
        values.append(hausdorff(gc, pc))
        values.append(frechet_discrete(gc, pc))
    return math.fsum(values) / len(values)


def instance_f1(matches: MatchSet, n_gt: int, n_pred: int) -> float:
    """F1 of the instance matching, in percent. TP = matched pairs."""
    tp = len(matches.pairs)
    if tp == 0:
        return 0.0
    fp = n_pred - tp
    fn = n_gt - tp
    if fp < 0 or fn < 0:
        raise ValueError("counts are inconsistent with the match set")
    return 100.0 * 2.0 * tp / (2.0 * tp + fp + fn)


def reconstruction_score(building_f1: float, roof_f1: float) -> float:
    """Harmonic mean of the building and roof-segment F1 scores (percent)."""
    if building_f1 == 0.0 and roof_f1 == 0.0:
        return 0.0
    return 2.0 * building_f1 * roof_f1 / (building_f1 + roof_f1)


def area_segmentation_score(
    building_f1: float, roof_f1: float, reconstruction: float
) -> float:
    """Sum of the three F1 fractions (each in [0, 1]); higher is better, max 3."""
    return building_f1 + roof_f1 + reconstruction


@dataclass(frozen=True)
class EvalReport:
    """All metrics of one scene; mirrors one row of the results table."""

    scene_id: str
    point_pos_acc: float
    point_match_rate: float
    line_dist_acc: float | None
    building_f1: float
    roof_f1: float
    reconstruction_score: float
    area_segmentation_score: float
    counts: dict[str, int] = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "scene_id": self.scene_id,
            "metrics": {
                "point_pos_acc": self.point_pos_acc,
                "point_match_rate": self.point_match_rate,
                "line_dist_acc": self.line_dist_acc,
                "building_f1": self.building_f1,
                "roof_f1": self.roof_f1,
                "reconstruction_score": self.reconstruction_score,
                "area_segmentation_score": self.area_segmentation_score,
            },
            "counts": dict(self.counts),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "EvalReport":
        m = d["metrics"]
        return cls(
            scene_id=d["scene_id"],
            point_pos_acc=float(m["point_pos_acc"]),
            point_match_rate=float(m["point_match_rate"]),
            line_dist_acc=None if m["line_dist_acc"] is None else float(m["line_dist_acc"]),
            building_f1=float(m["building_f1"]),
            roof_f1=float(m["roof_f1"]),
            reconstruction_score=float(m["reconstruction_score"]),
            area_segmentation_score=float(m["area_segmentation_score"]),
            counts={k: int(v) for k, v in d["counts"].items()},
        )


def scene_corner_points(buildings: Sequence[BuildingInstance]) -> np.ndarray:
    """Distinct corner coordinates across all outlines and segments of a scene."""
    if not buildings:
        return np.empty((0, 2))
    stacked = np.vstack(
        [b.outline.coords for b in buildings]
        + [ring.coords for b in buildings for ring in b.segment_rings]
    )
    return np.unique(stacked, axis=0)


def evaluate_scene(
    gt: Sequence[BuildingInstance],
    pred: Sequence[BuildingInstance],
    cfg: EvalConfig = EvalConfig(),
    scene_id: str = "",
) -> EvalReport:
    """Score one scene's predicted buildings against ground truth.

    Buildings are matched on their outlines; roof segments are matched only
    within matched buildings (a segment matched to the wrong building earns
    nothing). Point accuracy uses all distinct corner points of the scene;
    line distances are computed over matched building outlines.
    """
    gt_outlines = [b.outline for b in gt]
    pred_outlines = [b.outline for b in pred]
    try:
        building_matches = match_instances(gt_outlines, pred_outlines, cfg.iou_threshold)

        n_gt_segments = sum(len(b.segments) for b in gt)
        n_pred_segments = sum(len(b.segments) for b in pred)
        tp_segments = 0
        for gi, pi, _ in building_matches.pairs:
            seg_matches = match_instances(
                gt[gi].segment_rings, pred[pi].segment_rings, cfg.iou_threshold
            )
            tp_segments += len(seg_matches.pairs)

        gt_points = scene_corner_points(gt)
        pred_points = scene_corner_points(pred)
        point_pairs = _match_points(gt_points, pred_points, cfg.point_radius)
        if point_pairs:
            rmse = math.sqrt(math.fsum(d2 for _, _, d2 in point_pairs) / len(point_pairs))
            rate = len(point_pairs) / max(len(gt_points), len(pred_points))
        else:
            rmse, rate = 0.0, 0.0

        line = line_distance_accuracy(
            building_matches, gt_outlines, pred_outlines, cfg.densify_step
        )
    except Exception as exc:
        try:
            wrapped = type(exc)(f"scene {scene_id or '<unnamed>'}: {exc}")
        except Exception:
            raise exc
        raise wrapped from exc

    building_f1 = instance_f1(building_matches, len(gt), len(pred))
    # 2TP / (2TP + FP + FN) with FP = n_pred_segments - TP, FN = n_gt_segments - TP
    roof_f1 = (
        200.0 * tp_segments / (n_gt_segments + n_pred_segments) if tp_segments else 0.0
    )
    recon = reconstruction_score(building_f1, roof_f1)
    seg_score = area_segmentation_score(building_f1 / 100.0, roof_f1 / 100.0, recon / 100.0)
    return EvalReport(
        scene_id=scene_id,
        point_pos_acc=rmse,
        point_match_rate=rate,
        line_dist_acc=None if math.isnan(line) else line,
        building_f1=building_f1,
        roof_f1=roof_f1,
        reconstruction_score=recon,
        area_segmentation_score=seg_score,
        counts={
            "n_gt_buildings": len(gt),
            "n_pred_buildings": len(pred),
            "n_matched_buildings": len(building_matches.pairs),
            "n_gt_segments": n_gt_segments,
            "n_pred_segments": n_pred_segments,
            "n_matched_segments": tp_segments,
            "n_gt_points": len(gt_points),
            "n_pred_points": len(pred_points),
            "n_matched_points": len(point_pairs),
            "n_line_pairs": len(building_matches.pairs),
        },
    )


def aggregate_reports(reports: Sequence[EvalReport]) -> dict:
    """Dataset-level aggregation of per-scene reports.

    ``micro`` pools TP/FP/FN (F1s), squared point errors (RMSE), and matched
    pairs (line distance) across scenes; ``macro`` averages the per-scene
    values. Both reconstruction variants are reported: the harmonic mean of
    the pooled F1s (micro) and the mean of per-scene harmonic means (macro).
    """
    reports = sorted(reports, key=lambda r: r.scene_id)
    if not reports:
        raise ValueError("no reports to aggregate")

    def csum(key):
        return sum(r.counts[key] for r in reports)

    tp_b = csum("n_matched_buildings")
    total_b = csum("n_gt_buildings") + csum("n_pred_buildings")
    tp_s = csum("n_matched_segments")
    total_s = csum("n_gt_segments") + csum("n_pred_segments")
    building_f1 = 200.0 * tp_b / total_b if tp_b else 0.0
    roof_f1 = 200.0 * tp_s / total_s if tp_s else 0.0

    n_pts = csum("n_matched_points")
    sq_sum = math.fsum(r.point_pos_acc**2 * r.counts["n_matched_points"] for r in reports)
    rmse = math.sqrt(sq_sum / n_pts) if n_pts else 0.0
    denom_pts = sum(max(r.counts["n_gt_points"], r.counts["n_pred_points"]) for r in reports)
    rate = n_pts / denom_pts if denom_pts else 0.0

    line_pairs = [
        (r.line_dist_acc, r.counts["n_line_pairs"]) for r in reports if r.line_dist_acc is not None
    ]
    k_total = sum(k for _, k in line_pairs)
    line_micro = math.fsum(v * k for v, k in line_pairs) / k_total if k_total else None

    recon_micro = reconstruction_score(building_f1, roof_f1)
    recon_macro = math.fsum(r.reconstruction_score for r in reports) / len(reports)

    def macro(attr):
        return math.fsum(getattr(r, attr) for r in reports) / len(reports)

    line_macro_vals = [r.line_dist_acc for r in reports if r.line_dist_acc is not None]
    return {
        "n_scenes": len(reports),
        "micro": {
            "point_pos_acc": rmse,
            "point_match_rate": rate,
            "line_dist_acc": line_micro,
            "building_f1": building_f1,
            "roof_f1": roof_f1,
            "reconstruction_score": recon_micro,
            "area_segmentation_score": area_segmentation_score(
                building_f1 / 100.0, roof_f1 / 100.0, recon_micro / 100.0
            ),
        },
        "macro": {
            "point_pos_acc": macro("point_pos_acc"),
            "point_match_rate": macro("point_match_rate"),
            "line_dist_acc": (
                math.fsum(line_macro_vals) / len(line_macro_vals) if line_macro_vals else None
            ),
            "building_f1": macro("building_f1"),
            "roof_f1": macro("roof_f1"),
            "reconstruction_score": recon_macro,
            "area_segmentation_score": macro("area_segmentation_score"),
        },
    }
