"""On-disk scene documents: one UTF-8 JSON file per annotated scene.

Schema (``schema_version`` 1):

.. code-block:: json

    {
      "schema_version": 1,
      "scene_id": "scene_000",
      "width": 512,
      "height": 512,
      "vertices": [[x, y], ...],
      "edges": [[i, j], ...],
      "buildings": [
        {"building_id": "b000",
         "outline": [i, ...],
         "segments": [{"segment_id": "s000", "ring": [i, ...]}]}
      ]
    }

``buildings`` is optional: when absent, buildings are derived from the
wireframe's faces. When present it is trusted but validated (indices in
range, rings simple, segments inside outlines). Rings list vertex indices
without repeating the first one at the end.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import SceneParseError
from .geometry import PolygonRing
from .wireframe import BuildingInstance, Wireframe, buildings_from_wireframe

__all__ = ["SceneDocument", "SceneBuilding", "parse_scene", "write_scene"]

SCHEMA_VERSION = 1


@dataclass(frozen=True)
class SceneBuilding:
    building_id: str
    outline: tuple[int, ...]
    segments: tuple[tuple[str, tuple[int, ...]], ...]


@dataclass(frozen=True)
class SceneDocument:
    scene_id: str
    width: int
    height: int
    vertices: tuple[tuple[float, float], ...]
    edges: tuple[tuple[int, int], ...]
    buildings: tuple[SceneBuilding, ...] | None = None
    schema_version: int = SCHEMA_VERSION
    source_path: str = field(default="", compare=False)

    def to_json_dict(self) -> dict:
        doc: dict = {
            "schema_version": self.schema_version,
            "scene_id": self.scene_id,
            "width": self.width,
            "height": self.height,
            "vertices": [[x, y] for x, y in self.vertices],
            "edges": [[i, j] for i, j in self.edges],
        }
        if self.buildings is not None:
            doc["buildings"] = [
                {
                    "building_id": b.building_id,
                    "outline": list(b.outline),
                    "segments": [
                        {"segment_id": sid, "ring": list(ring)} for sid, ring in b.segments
                    ],
                }
                for b in self.buildings
            ]
        return doc

    def to_wireframe(self) -> Wireframe:
        return Wireframe(self.vertices, self.edges)

    def to_buildings(self) -> list[BuildingInstance]:
        """Building instances: the precomputed ones if present, else derived
        from the wireframe faces."""
        if self.buildings is None:
            return buildings_from_wireframe(self.to_wireframe())
        coords = np.asarray(self.vertices, dtype=np.float64)
        out = []
        for b in self.buildings:
            outline = PolygonRing(coords[list(b.outline)])
            segments = tuple(
                (sid, PolygonRing(coords[list(ring)])) for sid, ring in b.segments
            )
            vids = frozenset(b.outline) | frozenset(i for _, ring in b.segments for i in ring)
            out.append(BuildingInstance(b.building_id, outline, segments, vertex_ids=vids))
        return out


def _need(obj: dict, key: str, kind, path: str):
    if key not in obj:
        raise SceneParseError(path, f"missing required field '{key}'")
    value = obj[key]
    if kind is int and isinstance(value, bool) or not isinstance(value, kind):
        raise SceneParseError(path, f"field '{key}' must be {kind.__name__}")
    return value


def _index_ring(raw, n_vertices: int, what: str, path: str) -> tuple[int, ...]:
    if not isinstance(raw, list) or len(raw) < 3:
        raise SceneParseError(path, f"{what} must be a list of at least 3 vertex indices")
    ring = []
    for v in raw:
        if isinstance(v, bool) or not isinstance(v, int) or not 0 <= v < n_vertices:
            raise SceneParseError(path, f"{what} references invalid vertex index {v!r}")
        ring.append(v)
    return tuple(ring)


def parse_scene(path: str | Path) -> SceneDocument:
    """Load and validate one scene document. Raises SceneParseError (with the
    source path, and the line number for malformed JSON) on any problem."""
    path = str(path)
    try:
        with open(path, encoding="utf-8") as fh:
            raw = json.load(fh)
    except OSError as exc:
        raise SceneParseError(path, str(exc)) from exc
    except json.JSONDecodeError as exc:
        raise SceneParseError(path, f"invalid JSON at line {exc.lineno}: {exc.msg}") from exc

    if not isinstance(raw, dict):
        raise SceneParseError(path, "top-level JSON value must be an object")
    version = _need(raw, "schema_version", int, path)
    if version != SCHEMA_VERSION:
        raise SceneParseError(path, f"unsupported schema_version {version}")
    scene_id = _need(raw, "scene_id", str, path)
    if not scene_id:
        raise SceneParseError(path, "scene_id must be a non-empty string")
    width = _need(raw, "width", int, path)
    height = _need(raw, "height", int, path)
    if width <= 0 or height <= 0:
        raise SceneParseError(path, "width and height must be positive")

    raw_vertices = _need(raw, "vertices", list, path)
    vertices = []
    for k, entry in enumerate(raw_vertices):
        if (
            not isinstance(entry, list)
            or len(entry) != 2
            or not all(isinstance(c, (int, float)) and not isinstance(c, bool) for c in entry)
        ):
            raise SceneParseError(path, f"vertex {k} must be an [x, y] number pair")
        vertices.append((float(entry[0]), float(entry[1])))

    raw_edges = _need(raw, "edges", list, path)
    edges = []
    for k, entry in enumerate(raw_edges):
        if (
            not isinstance(entry, list)
            or len(entry) != 2
            or not all(isinstance(c, int) and not isinstance(c, bool) for c in entry)
        ):
            raise SceneParseError(path, f"edge {k} must be an [i, j] index pair")
        i, j = entry
        if not (0 <= i < len(vertices) and 0 <= j < len(vertices)):
            raise SceneParseError(path, f"edge {k} references a vertex index out of range")
        edges.append((i, j))

    buildings = None
    if "buildings" in raw and raw["buildings"] is not None:
        if not isinstance(raw["buildings"], list):
            raise SceneParseError(path, "buildings must be a list")
        buildings = []
        for bk, braw in enumerate(raw["buildings"]):
            if not isinstance(braw, dict):
                raise SceneParseError(path, f"building {bk} must be an object")
            bid = _need(braw, "building_id", str, path)
            outline = _index_ring(
                braw.get("outline"), len(vertices), f"building {bid} outline", path
            )
            raw_segs = _need(braw, "segments", list, path)
            if not raw_segs:
                raise SceneParseError(path, f"building {bid} has no segments")
            segments = []
            for sraw in raw_segs:
                if not isinstance(sraw, dict):
                    raise SceneParseError(path, f"building {bid} segment must be an object")
                sid = _need(sraw, "segment_id", str, path)
                ring = _index_ring(
                    sraw.get("ring"), len(vertices), f"segment {bid}/{sid} ring", path
                )
                segments.append((sid, ring))
            buildings.append(SceneBuilding(bid, outline, tuple(segments)))
        buildings = tuple(buildings)

    return SceneDocument(
        scene_id=scene_id,
        width=width,
        height=height,
        vertices=tuple(vertices),
        edges=tuple(edges),
        buildings=buildings,
        schema_version=version,
        source_path=path,
    )


def write_scene(doc: SceneDocument, path: str | Path) -> None:
    """Serialize a scene document as canonical, diff-friendly JSON."""
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc.to_json_dict(), fh, indent=2, sort_keys=True)
        fh.write("\n")
