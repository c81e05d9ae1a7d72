"""From an edge annotation to roof segments and buildings.

A scene is annotated as a planar wireframe: vertices plus edges. The bounded
faces of that planar subdivision are the roof segments; edge-connected faces
form buildings. Run with: python demos/02_faces_and_buildings.py
"""

from polyroof_eval import (
    Wireframe,
    area,
    buildings_from_wireframe,
    extract_faces,
    point_degree_mean,
)

# Two gabled roofs in one scene. The left building is a 20x10 rectangle with
# a ridge line splitting it into two 10x10 halves; the right building is a
# plain 8x8 square, far away.
vertices = [
    (0, 0), (10, 0), (20, 0), (20, 10), (10, 10), (0, 10),   # left building
    (40, 0), (48, 0), (48, 8), (40, 8),                       # right building
]
edges = [
    (0, 1), (1, 2), (2, 3), (3, 4), (4, 5), (5, 0), (1, 4),   # outline + ridge
    (6, 7), (7, 8), (8, 9), (9, 6),
]
w = Wireframe(vertices, edges)

print("vertices:", w.n_vertices, " edges:", w.n_edges)
print("mean point degree:", round(point_degree_mean(w), 4))

faces = extract_faces(w)
print("\nfaces found:", len(faces))
for k, face in enumerate(faces):
    print(f"  face {k}: {len(face)} vertices, area {area(face)}")

# Euler sanity per component: interior faces = E - V + 1
for comp in w.connected_components():
    comp_set = set(comp)
    e_c = sum(1 for i, j in w.edges if int(i) in comp_set)
    print(f"component with {len(comp)} vertices: E - V + 1 = {e_c - len(comp) + 1}")

buildings = buildings_from_wireframe(w)
print("\nbuildings:", len(buildings))
for b in buildings:
    print(
        f"  {b.building_id}: {len(b.segments)} segment(s),",
        f"outline area {area(b.outline)}, outline vertices {len(b.outline)}",
    )
# The ridge vertices are collinear on the left building's outline, so the
# outline cleans down to the 4 corners while both roof halves stay segments.
