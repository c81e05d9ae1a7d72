"""End-to-end CLI pipeline on a generated toy dataset.

Writes scene JSON files into a temp directory, then runs:
  analyze --fit-pca  ->  split  ->  histogram  ->  evaluate
Run with: python demos/05_cli_pipeline.py
"""

import json
import subprocess
import sys
import tempfile
from pathlib import Path

import numpy as np

from polyroof_eval import SceneDocument, write_scene


def make_scene(rng, scene_id):
    """A scene with 2-3 buildings: boxes, ridged boxes, and L-shapes."""
    vertices, edges = [], []
    for b in range(int(rng.integers(2, 4))):
        x0 = 30 + 150 * b + int(rng.integers(0, 40))
        y0 = 30 + int(rng.integers(0, 40))
        w = int(rng.integers(40, 90))
        h = int(rng.integers(40, 90))
        base = len(vertices)
        kind = rng.random()
        if kind < 0.34:  # plain box
            vertices += [(x0, y0), (x0 + w, y0), (x0 + w, y0 + h), (x0, y0 + h)]
            edges += [(base, base + 1), (base + 1, base + 2), (base + 2, base + 3), (base + 3, base)]
        elif kind < 0.67:  # box with a vertical ridge
            cut = int(rng.integers(x0 + 10, x0 + w - 10 + 1))
            vertices += [
                (x0, y0), (cut, y0), (x0 + w, y0),
                (x0 + w, y0 + h), (cut, y0 + h), (x0, y0 + h),
            ]
            edges += [
                (base, base + 1), (base + 1, base + 2), (base + 2, base + 3),
                (base + 3, base + 4), (base + 4, base + 5), (base + 5, base),
                (base + 1, base + 4),
            ]
        else:  # L-shaped footprint (top-right corner notched away)
            nx = int(rng.integers(x0 + 10, x0 + w - 10 + 1))
            ny = int(rng.integers(y0 + 10, y0 + h - 10 + 1))
            vertices += [
                (x0, y0), (x0 + w, y0), (x0 + w, ny),
                (nx, ny), (nx, y0 + h), (x0, y0 + h),
            ]
            edges += [
                (base, base + 1), (base + 1, base + 2), (base + 2, base + 3),
                (base + 3, base + 4), (base + 4, base + 5), (base + 5, base),
            ]
    return SceneDocument(
        scene_id=scene_id,
        width=512,
        height=512,
        vertices=tuple((float(x), float(y)) for x, y in vertices),
        edges=tuple(edges),
    )


def run(*args):
    cmd = [sys.executable, "-m", "polyroof_eval", *args]
    print("\n$", " ".join(str(a) for a in cmd[2:]))
    proc = subprocess.run(cmd, text=True, capture_output=True)
    print(proc.stdout.strip())
    if proc.returncode != 0:
        print(proc.stderr.strip())
        raise SystemExit(proc.returncode)


rng = np.random.default_rng(11)
root = Path(tempfile.mkdtemp(prefix="polyroof_demo_"))
gt_dir = root / "gt"
pred_dir = root / "pred"
gt_dir.mkdir()
pred_dir.mkdir()

for k in range(12):
    doc = make_scene(rng, f"scene{k:03d}")
    write_scene(doc, gt_dir / f"{doc.scene_id}.json")
    # predictions: every vertex nudged 1 px right
    moved = SceneDocument(
        scene_id=doc.scene_id,
        width=doc.width,
        height=doc.height,
        vertices=tuple((x + 1.0, y) for x, y in doc.vertices),
        edges=doc.edges,
    )
    write_scene(moved, pred_dir / f"{doc.scene_id}.json")
print("wrote 12 scenes to", root)

run("analyze", str(gt_dir), "--fit-pca", "--out-dir", str(root / "analysis"))
run("split", str(root / "analysis" / "complexity_buildings.csv"),
    "--bins", "3", "--seed", "42", "--out", str(root / "split.json"))
run("histogram", str(root / "analysis" / "complexity_buildings.csv"),
    "--bins", "8", "--out", str(root / "hist.csv"))
run("evaluate", "--gt", str(gt_dir), "--pred", str(pred_dir),
    "--label", "demo-shift", "--out-dir", str(root / "eval"))

print("\nsplit manifest:")
manifest = json.loads((root / "split.json").read_text())
print("  train", manifest["train"])
print("  val  ", manifest["val"])
print("  test ", manifest["test"])

print("\nevaluation summary.csv:")
print((root / "eval" / "summary.csv").read_text().strip())
print("\nall outputs under", root)
