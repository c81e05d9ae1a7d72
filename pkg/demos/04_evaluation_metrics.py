"""The evaluation metric suite on a hand-built prediction.

Ground truth: two buildings. The prediction shifts one building by a pixel,
distorts a corner of the other, and hallucinates a spurious shed. Run with:
python demos/04_evaluation_metrics.py
"""

from polyroof_eval import (
    BuildingInstance,
    PolygonRing,
    evaluate_scene,
    frechet_discrete,
    hausdorff,
    match_instances,
)


def building(bid, outline_pts, segment_pts_list):
    return BuildingInstance(
        bid,
        PolygonRing(outline_pts),
        tuple((f"s{k}", PolygonRing(pts)) for k, pts in enumerate(segment_pts_list)),
    )


gt = [
    building(
        "house",
        [(0, 0), (40, 0), (40, 20), (0, 20)],
        [[(0, 0), (20, 0), (20, 20), (0, 20)], [(20, 0), (40, 0), (40, 20), (20, 20)]],
    ),
    building("garage", [(60, 0), (80, 0), (80, 15), (60, 15)], [[(60, 0), (80, 0), (80, 15), (60, 15)]]),
]

pred = [
    building(  # house shifted 1 px right
        "house?",
        [(1, 0), (41, 0), (41, 20), (1, 20)],
        [[(1, 0), (21, 0), (21, 20), (1, 20)], [(21, 0), (41, 0), (41, 20), (21, 20)]],
    ),
    building(  # garage with one dented corner
        "garage?",
        [(60, 0), (80, 0), (80, 15), (63, 13)],
        [[(60, 0), (80, 0), (80, 15), (63, 13)]],
    ),
    building("shed??", [(100, 50), (110, 50), (110, 60), (100, 60)], [[(100, 50), (110, 50), (110, 60), (100, 60)]]),
]

# Outline matching under the 50% IoU threshold.
matches = match_instances([b.outline for b in gt], [b.outline for b in pred], 0.5)
print("matched building pairs (gt_index, pred_index, IoU):")
for gi, pi, v in matches.pairs:
    print(f"  {gt[gi].building_id} <- {pred[pi].building_id}  IoU {v:.3f}")
print("unmatched predictions:", [pred[k].building_id for k in matches.unmatched_pred])

# The two boundary distances behind Line Distance Accuracy.
g = gt[0].outline.coords
p = pred[0].outline.coords
print("\nhouse boundary:  hausdorff", hausdorff(g, p), " frechet", frechet_discrete(g, p))

report = evaluate_scene(gt, pred, scene_id="demo")
print("\nfull report:")
print(f"  point position accuracy {report.point_pos_acc:.3f} px (match rate {report.point_match_rate:.2f})")
print(f"  line distance accuracy  {report.line_dist_acc:.3f} px")
print(f"  building F1             {report.building_f1:.2f} %")
print(f"  roof segment F1         {report.roof_f1:.2f} %")
print(f"  reconstruction score    {report.reconstruction_score:.2f} %")
print(f"  area segmentation score {report.area_segmentation_score:.3f} / 3")
print("  counts:", report.counts)
