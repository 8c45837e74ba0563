"""Input checks shared by the estimator and the command line."""

from __future__ import annotations

import math
from typing import Any, Iterable, Optional, Sequence

import numpy as np

from .exceptions import DegeneratePolygon, FormatError
from .geometry import Polygon, Polyline
from .proximity import BuildingRecord, make_buildings


def _as_ring(item: Any, index: int) -> tuple[tuple[float, float], ...]:
    try:
        arr = np.asarray(item, dtype=float)
    except (TypeError, ValueError):
        raise FormatError(f"footprint {index}: coordinates must be numeric") from None
    if arr.ndim != 2 or arr.shape[1] != 2:
        raise FormatError(f"footprint {index}: expected an (n, 2) array of vertices, got shape {arr.shape}")
    if not np.isfinite(arr).all():
        raise FormatError(f"footprint {index}: coordinates must be finite")
    return tuple((float(x), float(y)) for x, y in arr)


def check_footprint(item: Any, index: int = 0) -> Polygon:
    """A :class:`Polygon` from a Polygon, a shapely-like object or an (n, 2) vertex array."""
    if isinstance(item, Polygon):
        return item
    if isinstance(item, BuildingRecord):
        return item.footprint
    exterior = getattr(item, "exterior", None)
    if exterior is not None:  # shapely polygons
        item = list(exterior.coords)
    ring = _as_ring(item, index)
    if len(ring) >= 2 and ring[0] == ring[-1]:
        ring = ring[:-1]
    try:
        return Polygon(ring)
    except DegeneratePolygon as exc:
        raise FormatError(f"footprint {index}: {exc}") from exc


def check_buildings(X: Any, ids: Optional[Sequence[int]] = None) -> list[BuildingRecord]:
    """Building records from a sequence of footprints (or records, which pass through)."""
    if isinstance(X, (str, bytes)) or not isinstance(X, Iterable):
        raise FormatError("expected a sequence of building footprints")
    items = list(X)
    if not items:
        raise FormatError("no building footprints given")
    if ids is None and all(isinstance(b, BuildingRecord) for b in items):
        if len({b.id for b in items}) != len(items):
            raise FormatError("building ids must be unique")
        return items
    polys = [check_footprint(it, n) for n, it in enumerate(items)]
    if ids is None:
        ids = [it.id if isinstance(it, BuildingRecord) else n for n, it in enumerate(items)]
    ids = [check_int(i, "building id") for i in ids]
    if len(ids) != len(polys):
        raise FormatError(f"{len(ids)} ids for {len(polys)} footprints")
    if len(set(ids)) != len(ids):
        raise FormatError("building ids must be unique")
    return make_buildings(polys, ids)


def check_roads(roads: Any) -> list[Polyline]:
    if roads is None:
        return []
    out = []
    for n, r in enumerate(roads):
        if isinstance(r, Polyline):
            out.append(r)
            continue
        coords = getattr(r, "coords", None)
        pts = _as_ring(list(coords) if coords is not None else r, n)
        try:
            out.append(Polyline(pts))
        except ValueError as exc:
            raise FormatError(f"road {n}: {exc}") from exc
    return out


def check_int(v: Any, name: str) -> int:
    if isinstance(v, bool) or not isinstance(v, (int, np.integer)):
        raise FormatError(f"{name} must be an integer, got {v!r}")
    return int(v)


def check_positive(v: Any, name: str) -> float:
    if isinstance(v, bool) or not isinstance(v, (int, float, np.number)) or not math.isfinite(v) or v <= 0:
        raise ValueError(f"{name} must be a positive finite number, got {v!r}")
    return float(v)
