"""Geometric complexity analysis and evaluation metrics for roof polygonization.

The package follows the annotation model of roof-vector datasets: each scene
is a planar wireframe whose interior faces are roof segments, grouped into
building instances. On top sit three capabilities:

* per-building complexity features with a PCA-based complexity score,
* a deterministic complexity-balanced train/val/test splitter, and
* an instance-matched evaluation suite (point RMSE, line distances, F1s,
  reconstruction and area-segmentation scores).
"""

from .complexity import (
    FEATURE_NAMES,
    ComplexityRecord,
    PcaModel,
    SplitManifest,
    featurize,
    fit_pca,
    histogram,
    jacobi_eigh,
    pca_score,
    score_records,
    stratified_split,
)
from .errors import (
    DanglingEdge,
    DegenerateInput,
    DegenerateVariance,
    EmptyGraph,
    InsufficientData,
    NonPlanarInput,
    NumericalDegeneracy,
    PolyroofError,
    SceneParseError,
)
from .geometry import (
    Point2,
    PolygonRing,
    area,
    compactness,
    convex_hull,
    convexity,
    get_epsilon,
    intersection_area,
    iou,
    perimeter,
    set_epsilon,
)
from .metrics import (
    EvalConfig,
    EvalReport,
    MatchSet,
    aggregate_reports,
    area_segmentation_score,
    evaluate_scene,
    frechet_discrete,
    hausdorff,
    instance_f1,
    line_distance_accuracy,
    match_from_scores,
    match_instances,
    point_position_accuracy,
    reconstruction_score,
)
from .sceneio import SceneBuilding, SceneDocument, parse_scene, write_scene
from .wireframe import (
    BuildingInstance,
    Wireframe,
    assemble_buildings,
    buildings_from_wireframe,
    extract_faces,
    point_degree_mean,
)

__version__ = "0.1.0"
