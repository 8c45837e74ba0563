"""GeoJSON ingestion and output, truth files and a static SVG rendering."""

from __future__ import annotations

import json
import math
from pathlib import Path
from typing import Any, Iterable, Optional, Sequence, Union
from xml.sax.saxutils import quoteattr

from .exceptions import DegeneratePolygon, FormatError
from .geometry import Polygon, Polyline
from .pipeline import LinearPattern
from .proximity import BuildingRecord, make_buildings

PathLike = Union[str, Path]


def _load_json(source: Union[PathLike, dict]) -> Any:
    if isinstance(source, dict):
        return source
    try:
        text = Path(source).read_text(encoding="utf-8")
    except UnicodeDecodeError as exc:
        raise FormatError(f"{source}: not UTF-8 text") from exc
    if not text.strip():
        raise FormatError(f"{source}: empty file")
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise FormatError(f"{source}: invalid JSON ({exc.msg} at line {exc.lineno})") from exc


def _point(c: Any, where: str) -> tuple[float, float]:
    if not isinstance(c, (list, tuple)) or len(c) < 2:
        raise FormatError(f"{where}: a position needs at least two numbers")
    x, y = c[0], c[1]
    if isinstance(x, bool) or isinstance(y, bool) or not isinstance(x, (int, float)) or not isinstance(y, (int, float)):
        raise FormatError(f"{where}: coordinates must be numbers")
    if not (math.isfinite(x) and math.isfinite(y)):
        raise FormatError(f"{where}: coordinates must be finite")
    return float(x), float(y)


def _feature_id(feat: dict, index: int) -> int:
    props = feat.get("properties") or {}
    raw = props.get("id", feat.get("id", index))
    if isinstance(raw, bool):
        raise FormatError(f"feature {index}: id must be an integer, got {raw!r}")
    try:
        value = int(raw)
    except (TypeError, ValueError):
        raise FormatError(f"feature {index}: id must be an integer, got {raw!r}") from None
    if isinstance(raw, float) and raw != value:
        raise FormatError(f"feature {index}: id must be an integer, got {raw!r}")
    return value


def read_features(source: Union[PathLike, dict]) -> tuple[list[int], list[Polygon], list[Polyline]]:
    """Buildings (Polygon features) and roads (LineString features) of a FeatureCollection.

    Only the exterior ring of a polygon is read. Building ids come from the
    ``id`` property, else the feature id, else the feature index.
    """
    doc = _load_json(source)
    if not isinstance(doc, dict) or doc.get("type") != "FeatureCollection":
        raise FormatError("expected a GeoJSON FeatureCollection")
    feats = doc.get("features")
    if not isinstance(feats, list):
        raise FormatError("FeatureCollection.features must be a list")
    ids, polys, roads = [], [], []
    for n, feat in enumerate(feats):
        if not isinstance(feat, dict) or feat.get("type") != "Feature":
            raise FormatError(f"feature {n}: not a GeoJSON Feature")
        geom = feat.get("geometry")
        if not isinstance(geom, dict):
            raise FormatError(f"feature {n}: missing geometry")
        kind, coords = geom.get("type"), geom.get("coordinates")
        where = f"feature {n}"
        if kind == "Polygon":
            if not isinstance(coords, list) or not coords or not isinstance(coords[0], list):
                raise FormatError(f"{where}: Polygon needs at least one ring")
            ring = [_point(c, where) for c in coords[0]]
            if len(ring) >= 2 and ring[0] == ring[-1]:
                ring = ring[:-1]
            try:
                polys.append(Polygon(tuple(ring)))
            except DegeneratePolygon as exc:
                raise FormatError(f"{where}: {exc}") from exc
            ids.append(_feature_id(feat, n))
        elif kind in ("LineString", "MultiLineString"):
            lines = [coords] if kind == "LineString" else coords
            if not isinstance(lines, list):
                raise FormatError(f"{where}: bad {kind} coordinates")
            for line in lines:
                if not isinstance(line, list):
                    raise FormatError(f"{where}: bad {kind} coordinates")
                pts = [_point(c, where) for c in line]
                try:
                    roads.append(Polyline(tuple(pts)))
                except ValueError as exc:
                    raise FormatError(f"{where}: {exc}") from exc
        else:
            raise FormatError(f"{where}: unsupported geometry type {kind!r} (expected Polygon or LineString)")
    if len(set(ids)) != len(ids):
        raise FormatError("building ids are not unique")
    return ids, polys, roads


def read_buildings(source: Union[PathLike, dict]) -> tuple[list[BuildingRecord], list[Polyline]]:
    ids, polys, roads = read_features(source)
    return make_buildings(polys, ids), roads


def _ring_coords(p: Polygon) -> list[list[float]]:
    ring = [[x, y] for x, y in p.ring]
    return ring + [ring[0]]


def buildings_geojson(buildings: Sequence[BuildingRecord], roads: Sequence[Polyline] = ()) -> dict:
    feats = [
        {
            "type": "Feature",
            "properties": {"id": b.id},
            "geometry": {"type": "Polygon", "coordinates": [_ring_coords(b.footprint)]},
        }
        for b in buildings
    ]
    for r in roads:
        feats.append(
            {
                "type": "Feature",
                "properties": {"kind": "road"},
                "geometry": {"type": "LineString", "coordinates": [[x, y] for x, y in r.points]},
            }
        )
    return {"type": "FeatureCollection", "features": feats}


def patterns_geojson(patterns: Sequence[LinearPattern], buildings: Sequence[BuildingRecord]) -> dict:
    """Each pattern as a LineString through the centroids of its ordered buildings."""
    by_id = {b.id: b for b in buildings}
    feats = []
    for p in patterns:
        feats.append(
            {
                "type": "Feature",
                "properties": {"building_ids": list(p.building_ids), "size": len(p), "strict": p.strict},
                "geometry": {
                    "type": "LineString",
                    "coordinates": [list(by_id[i].centroid) for i in p.building_ids],
                },
            }
        )
    return {"type": "FeatureCollection", "features": feats}


def read_detected(source: Union[PathLike, dict]) -> list[frozenset[int]]:
    """Pattern id sets from a patterns FeatureCollection (``building_ids`` property)."""
    doc = _load_json(source)
    if not isinstance(doc, dict) or doc.get("type") != "FeatureCollection":
        raise FormatError("expected a GeoJSON FeatureCollection of patterns")
    out = []
    for n, feat in enumerate(doc.get("features") or []):
        ids = ((feat or {}).get("properties") or {}).get("building_ids")
        out.append(_id_set(ids, f"feature {n}"))
    return out


def _id_set(ids: Any, where: str) -> frozenset[int]:
    if not isinstance(ids, list) or any(isinstance(i, bool) or not isinstance(i, int) for i in ids):
        raise FormatError(f"{where}: building_ids must be a list of integers")
    return frozenset(ids)


def read_truth(source: Union[PathLike, dict, list]) -> list[frozenset[int]]:
    """Truth patterns: a JSON list of id lists, or ``{"patterns": [...]}``."""
    doc = source if isinstance(source, list) else _load_json(source)
    if isinstance(doc, dict):
        doc = doc.get("patterns")
    if not isinstance(doc, list):
        raise FormatError("truth must be a list of building-id lists")
    return [_id_set(ids, f"pattern {n}") for n, ids in enumerate(doc)]


def truth_json(truth: Iterable[Iterable[int]]) -> dict:
    return {"patterns": [sorted(t) for t in truth]}


def write_json(obj: Any, path: PathLike) -> None:
    Path(path).write_text(json.dumps(obj, indent=2) + "\n", encoding="utf-8")


_PALETTE = ("#d62728", "#1f77b4", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#e377c2", "#17becf")


def render_svg(
    buildings: Sequence[BuildingRecord],
    patterns: Sequence[LinearPattern] = (),
    roads: Sequence[Polyline] = (),
    width: int = 800,
    margin: float = 10.0,
) -> str:
    """Footprints in grey, roads in light grey, one coloured polyline per pattern."""
    xs = [x for b in buildings for x, _ in b.footprint.ring] + [x for r in roads for x, _ in r.points]
    ys = [y for b in buildings for _, y in b.footprint.ring] + [y for r in roads for _, y in r.points]
    if not xs:
        return f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{width}"/>\n'
    x0, x1, y0, y1 = min(xs), max(xs), min(ys), max(ys)
    span = max(x1 - x0, y1 - y0, 1e-9)
    k = (width - 2 * margin) / span
    height = int(math.ceil((y1 - y0) * k + 2 * margin))

    def pt(x: float, y: float) -> str:
        return f"{(x - x0) * k + margin:.2f},{(y1 - y) * k + margin:.2f}"

    by_id = {b.id: b for b in buildings}
    out = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" viewBox="0 0 {width} {height}">']
    out.append(f'<rect width="{width}" height="{height}" fill="white"/>')
    for r in roads:
        out.append(f'<polyline points="{" ".join(pt(x, y) for x, y in r.points)}" fill="none" stroke="#cccccc" stroke-width="3"/>')
    for b in buildings:
        out.append(
            f'<polygon points="{" ".join(pt(x, y) for x, y in b.footprint.ring)}" fill="#bbbbbb" stroke="#555555" stroke-width="0.5">'
            f"<title>{b.id}</title></polygon>"
        )
    for n, p in enumerate(patterns):
        color = _PALETTE[n % len(_PALETTE)]
        pts = " ".join(pt(*by_id[i].centroid) for i in p.building_ids)
        label = quoteattr(",".join(map(str, p.building_ids)))
        out.append(f'<polyline points="{pts}" fill="none" stroke="{color}" stroke-width="2" data-buildings={label}/>')
    out.append("</svg>")
    return "\n".join(out) + "\n"
