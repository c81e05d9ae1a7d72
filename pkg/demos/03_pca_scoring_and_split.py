"""Complexity features, the PCA score, and the balanced dataset split.

Each building contributes four features (vertex count, mean point degree,
convexity, compactness). A PCA is fitted on the standardized features and the
projection onto the SECOND principal component, rescaled to 0-100, is the
complexity score. Scenes are then split train/val/test so every complexity
level is represented. Run with: python demos/03_pca_scoring_and_split.py
"""

import numpy as np

from polyroof_eval import (
    FEATURE_NAMES,
    ComplexityRecord,
    fit_pca,
    histogram,
    score_records,
    stratified_split,
)

rng = np.random.default_rng(7)

# Synthesize a mixed-complexity dataset: simple boxy roofs and ornate ones.
records = []
for s in range(80):
    ornate = rng.random() < 0.4
    for b in range(int(rng.integers(1, 4))):
        records.append(
            ComplexityRecord(
                scene_id=f"scene{s:03d}",
                building_id=f"b{b}",
                num_vertices=int(rng.integers(24, 70)) if ornate else int(rng.integers(4, 14)),
                point_degree=float(rng.uniform(4, 7)) if ornate else float(rng.uniform(2, 3)),
                convexity=float(rng.uniform(55, 90)) if ornate else float(rng.uniform(92, 100)),
                compactness=float(rng.uniform(5, 25)) if ornate else float(rng.uniform(40, 75)),
            )
        )
print("buildings:", len(records))

model = fit_pca(records)
print("\nprincipal axes (rows, descending eigenvalue):")
for name, eigenvalue, row in zip(("PC1", "PC2", "PC3", "PC4"), model.eigenvalues, model.components):
    loadings = ", ".join(f"{f}={v:+.2f}" for f, v in zip(FEATURE_NAMES, row))
    print(f"  {name} (lambda={eigenvalue:.3f}): {loadings}")
print("the complexity score is the PC2 projection rescaled to 0-100")

scored = score_records(model, records)
scores = [r.pca_score for r in scored]
print("\nscore range:", round(min(scores), 2), "to", round(max(scores), 2))
print("score histogram (10 bins):")
for lo, hi, count in histogram(scores, 10):
    print(f"  [{lo:6.2f}, {hi:6.2f})  {'#' * count}")

manifest = stratified_split(scored, ratios=(0.7, 0.15, 0.15), bins=5, seed=42)
print(
    "\nsplit sizes:",
    len(manifest.train), "train /", len(manifest.val), "val /", len(manifest.test), "test",
)

# Balance check: mean scene score per split should be close across splits.
scene_score = {}
for r in scored:
    scene_score.setdefault(r.scene_id, []).append(r.pca_score)
for name, part in (("train", manifest.train), ("val", manifest.val), ("test", manifest.test)):
    means = [float(np.mean(scene_score[s])) for s in part]
    print(f"  {name:5s} mean scene score: {np.mean(means):6.2f}")

again = stratified_split(scored, ratios=(0.7, 0.15, 0.15), bins=5, seed=42)
print("same seed reproduces the same manifest:", manifest == again)
