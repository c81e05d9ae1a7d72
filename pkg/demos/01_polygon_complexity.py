"""Polygon primitives walk-through: area, hulls, convexity, compactness, IoU.

Run with: python demos/01_polygon_complexity.py
"""

import numpy as np

from polyroof_eval import (
    PolygonRing,
    area,
    compactness,
    convex_hull,
    convexity,
    intersection_area,
    iou,
    perimeter,
)

# A simple square roof footprint, 10x10 pixels.
square = PolygonRing([(0, 0), (10, 0), (10, 10), (0, 10)])
print("square:        area", area(square), " perimeter", perimeter(square))

# An L-shaped footprint: two wings. Note the ring is stored counter-clockwise
# and collinear vertices would be cleaned away automatically.
ell = PolygonRing([(0, 0), (20, 0), (20, 10), (10, 10), (10, 20), (0, 20)])
print("L-shape:       area", area(ell), " perimeter", perimeter(ell))

# The convex hull of the L is a pentagon; the notch costs convexity.
hull = convex_hull(ell.coords)
print("hull vertices:", hull.coords.tolist())
print("convexity:     square", convexity(square), "  L-shape", round(convexity(ell), 3))

# Compactness (circularity): 100 means circle-like, low means sprawling.
# A square sits at 100*pi/4 ~ 78.5; a thin bar scores far lower.
bar = PolygonRing([(0, 0), (50, 0), (50, 2), (0, 2)])
print(
    "compactness:   square",
    round(compactness(square), 2),
    "  L-shape",
    round(compactness(ell), 2),
    "  thin bar",
    round(compactness(bar), 2),
)

# A 64-gon approximates a circle, so its compactness approaches 100.
angles = 2 * np.pi * np.arange(64) / 64
near_circle = PolygonRing(np.column_stack([np.cos(angles), np.sin(angles)]))
print("compactness of a regular 64-gon:", round(compactness(near_circle), 4))

# Intersection handles non-convex rings exactly; shared edges are no problem.
shifted = PolygonRing([(5, 0), (15, 0), (15, 10), (5, 10)])
print("\nsquare vs. square shifted by 5 px:")
print("  intersection", intersection_area(square, shifted), " IoU", round(iou(square, shifted), 4))
print("L-shape vs. square:")
print("  intersection", intersection_area(ell, square), " IoU", round(iou(ell, square), 4))
print("identical rings give IoU exactly", iou(ell, ell))
