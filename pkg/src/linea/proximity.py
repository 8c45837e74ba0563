"""Road-constrained relative neighbourhood graph over building footprints."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np
from scipy.spatial import Delaunay, QhullError, cKDTree

from . import geometry as geo
from .exceptions import EmptyDataset
from .geometry import OrientedRect, Point, Polygon, Polyline

RNG_METRICS = ("footprint", "centroid")
FR_COMBINE = ("max", "min")


@dataclass(frozen=True)
class BuildingRecord:
    """A footprint plus the derived attributes the predicates read."""

    id: int
    footprint: Polygon
    area: float
    sbr: OrientedRect
    b_ori: float
    edge_cnt: int
    centroid: Point
    radius: float = field(repr=False, compare=False, default=0.0)

    @classmethod
    def from_polygon(cls, id: int, footprint: Polygon, collinear_tol_deg: float = 1.0) -> "BuildingRecord":
        if not isinstance(footprint, Polygon):
            footprint = Polygon(tuple(footprint))
        sbr = geo.min_bounding_rect(footprint)
        c = geo.centroid(footprint)
        radius = max(math.hypot(x - c[0], y - c[1]) for x, y in footprint.ring)
        return cls(
            id=int(id),
            footprint=footprint,
            area=geo.polygon_area(footprint),
            sbr=sbr,
            b_ori=sbr.axis_deg,
            edge_cnt=geo.edge_count(footprint, collinear_tol_deg),
            centroid=c,
            radius=radius,
        )


def make_buildings(polygons: Iterable, ids: Sequence[int] | None = None, collinear_tol_deg: float = 1.0) -> list[BuildingRecord]:
    polys = list(polygons)
    if ids is None:
        ids = range(len(polys))
    ids = list(ids)
    if len(ids) != len(polys):
        raise ValueError("ids and polygons differ in length")
    if len(set(ids)) != len(ids):
        raise ValueError("building ids must be unique")
    return [BuildingRecord.from_polygon(i, p, collinear_tol_deg) for i, p in zip(ids, polys)]


@dataclass(frozen=True)
class ProximityEdge:
    i: int
    j: int
    le: float
    e_ori: float
    fr: float

    def __post_init__(self) -> None:
        if self.i == self.j:
            raise ValueError("self-loop proximity edge")
        if self.i > self.j:
            raise ValueError("proximity edges are stored with i < j")

    def other(self, b: int) -> int:
        return self.j if b == self.i else self.i


class _Distances:
    """Pairwise distances by dataset index, vectorized one source at a time.

    Footprint distance is the minimum of vertex-to-segment distances in both
    directions, or 0 when the footprints touch or nest. The arithmetic for a
    pair is the same whichever side issues the query, so ``d(a, b)`` and
    ``d(b, a)`` are bit-identical and exact and pruned RNG runs compare the
    same numbers.
    """

    def __init__(self, buildings: Sequence[BuildingRecord], metric: str):
        self.b = buildings
        self.metric = metric
        self.cent = np.array([b.centroid for b in buildings], dtype=float).reshape(-1, 2)
        self._cache: dict[tuple[int, int], float] = {}
        if metric == "footprint":
            self.rings = [np.array(b.footprint.ring, dtype=float) for b in buildings]
            self.ends = [np.roll(r, -1, axis=0) for r in self.rings]
            self.bbox = np.array([b.footprint.bbox for b in buildings], dtype=float).reshape(-1, 4)

    def __call__(self, a: int, b: int) -> float:
        if a == b:
            return 0.0
        d = self._cache.get((a, b) if a < b else (b, a))
        if d is None:
            d = float(self.row(a, [b])[0])
        return d

    def row(self, a: int, others: Sequence[int]) -> np.ndarray:
        """Distances from ``a`` to each index in ``others`` (which must not contain ``a``)."""
        others = np.asarray(others, dtype=int)
        if len(others) == 0:
            return np.zeros(0)
        if self.metric == "centroid":
            diff = self.cent[others] - self.cent[a]
            out = np.sqrt(diff[:, 0] * diff[:, 0] + diff[:, 1] * diff[:, 1])
        else:
            out = self._footprint_row(a, others)
        for o, d in zip(others.tolist(), out.tolist()):
            self._cache[(a, o) if a < o else (o, a)] = d
        return out

    def _footprint_row(self, a: int, others: np.ndarray) -> np.ndarray:
        va, ea = self.rings[a], self.ends[a]
        counts = np.array([len(self.rings[o]) for o in others])
        vb = np.concatenate([self.rings[o] for o in others])
        eb = np.concatenate([self.ends[o] for o in others])
        starts = np.concatenate(([0], np.cumsum(counts)[:-1]))
        # a's vertices against the others' segments, and the reverse
        d1 = _point_segment(va[:, None, :], vb[None, :, :], eb[None, :, :]).min(axis=0)
        d2 = _point_segment(vb[:, None, :], va[None, :, :], ea[None, :, :]).min(axis=1)
        out = np.minimum(np.minimum.reduceat(d1, starts), np.minimum.reduceat(d2, starts))
        ba, bo = self.bbox[a], self.bbox[others]
        touch = ~((ba[2] < bo[:, 0]) | (bo[:, 2] < ba[0]) | (ba[3] < bo[:, 1]) | (bo[:, 3] < ba[1]))
        for idx in np.nonzero(touch & (out > 0))[0]:
            if _footprints_meet(self.b[a].footprint, self.b[int(others[idx])].footprint):
                out[idx] = 0.0
        return out


def _point_segment(p: np.ndarray, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    abx, aby = b[..., 0] - a[..., 0], b[..., 1] - a[..., 1]
    apx, apy = p[..., 0] - a[..., 0], p[..., 1] - a[..., 1]
    den = abx * abx + aby * aby
    t = np.clip((apx * abx + apy * aby) / np.where(den > 0, den, 1.0), 0.0, 1.0)
    dx = apx - t * abx
    dy = apy - t * aby
    return np.sqrt(dx * dx + dy * dy)


def _footprints_meet(p: Polygon, q: Polygon) -> bool:
    for a, b in p.segments():
        for c, d in q.segments():
            if geo.segments_intersect(a, b, c, d):
                return True
    return geo.point_in_polygon(p.ring[0], q) or geo.point_in_polygon(q.ring[0], p)


def distance_matrix(buildings: Sequence[BuildingRecord], metric: str = "footprint") -> np.ndarray:
    """Symmetric matrix of pairwise footprint (or centroid) distances."""
    n = len(buildings)
    ids = [b.id for b in buildings]
    if len(set(ids)) != n:
        raise ValueError("building ids must be unique")
    dist = _Distances(buildings, metric)
    out = np.zeros((n, n))
    for a in range(n - 1):
        row = dist.row(a, np.arange(a + 1, n))
        out[a, a + 1 :] = row
        out[a + 1 :, a] = row
    return out


def _inner_points(buildings: Sequence[BuildingRecord]) -> np.ndarray:
    """A point on each footprint: the centroid when inside, else the nearest vertex.

    Distances between these points bound footprint distances from above.
    """
    pts = []
    for b in buildings:
        c = b.centroid
        if geo.point_in_polygon(c, b.footprint):
            pts.append(c)
        else:
            pts.append(min(b.footprint.ring, key=lambda v: math.hypot(v[0] - c[0], v[1] - c[1])))
    return np.array(pts, dtype=float).reshape(-1, 2)


def rng_build(
    buildings: Sequence[BuildingRecord],
    roads: Sequence[Polyline] = (),
    exact: bool = False,
    metric: str = "footprint",
    fr_combine: str = "max",
) -> list[ProximityEdge]:
    """Relative neighbourhood graph with edges across roads removed.

    ``(i, j)`` is kept iff no third building ``k`` has
    ``max(d(i,k), d(j,k)) < d(i,j)``. With ``exact=False`` candidate pairs come
    from the Delaunay triangulation of centroids widened by a distance
    heuristic, and witnesses are looked up through a KD-tree with a sound
    footprint-extent bound.
    """
    if metric not in RNG_METRICS:
        raise ValueError(f"unknown rng metric {metric!r}")
    n = len(buildings)
    if n == 0:
        raise EmptyDataset("no buildings")
    ids = [b.id for b in buildings]
    if len(set(ids)) != n:
        raise ValueError("building ids must be unique")
    kept: list[tuple[int, int]] = []
    if n >= 2:
        if exact:
            dm = distance_matrix(buildings, metric)
            for a in range(n):
                for b in range(a + 1, n):
                    d = dm[a, b]
                    if not np.any(np.maximum(dm[a], dm[b]) < d):
                        kept.append((a, b))
        else:
            kept = _rng_pruned(buildings, metric)
    edges = []
    for a, b in kept:
        ba, bb = buildings[a], buildings[b]
        if any(geo.segment_crosses_polyline(ba.centroid, bb.centroid, r) for r in roads):
            continue
        if ba.id > bb.id:
            ba, bb = bb, ba
        edges.append(
            ProximityEdge(
                i=ba.id,
                j=bb.id,
                le=geo.min_distance(ba.footprint, bb.footprint),
                e_ori=geo.direction_deg(ba.centroid, bb.centroid),
                fr=geo.facing_ratio(ba.sbr, bb.sbr, fr_combine),
            )
        )
    edges.sort(key=lambda e: (e.i, e.j))
    return edges


def _delaunay_pairs(cent: np.ndarray) -> set[tuple[int, int]]:
    n = len(cent)
    if n < 4:
        return {(a, b) for a in range(n) for b in range(a + 1, n)}
    try:
        tri = Delaunay(cent)
    except (QhullError, ValueError):
        return {(a, b) for a in range(n) for b in range(a + 1, n)}
    pairs: set[tuple[int, int]] = set()
    for s in tri.simplices:
        for u, v in ((s[0], s[1]), (s[1], s[2]), (s[0], s[2])):
            pairs.add((int(min(u, v)), int(max(u, v))))
    return pairs


def _rng_pruned(buildings: Sequence[BuildingRecord], metric: str) -> list[tuple[int, int]]:
    """RNG from a candidate set, with every candidate verified exactly.

    Candidates are the Delaunay edges of the centroids plus every pair within
    twice a building's reach. The reach is the building's longest Delaunay
    edge that cheap distance bounds cannot already rule out; long hull edges
    get ruled out and would otherwise inflate the search radius. Bounds:
    ``d >= |c_a - c_b| - r_a - r_b`` from the enclosing discs and
    ``d <= |p_a - p_b|`` for points ``p`` on the footprints.
    """
    n = len(buildings)
    cent = np.array([b.centroid for b in buildings], dtype=float).reshape(-1, 2)
    if metric == "centroid":
        rad = np.zeros(n)
        inner = cent
    else:
        rad = np.array([b.radius for b in buildings], dtype=float)
        inner = _inner_points(buildings)
    dist = _Distances(buildings, metric)
    tree = cKDTree(cent)
    rmax = float(rad.max())

    def lower(a: int, b: int) -> float:
        return math.hypot(cent[a, 0] - cent[b, 0], cent[a, 1] - cent[b, 1]) - rad[a] - rad[b]

    def upper(a: int, b: int) -> float:
        return math.hypot(inner[a, 0] - inner[b, 0], inner[a, 1] - inner[b, 1])

    delaunay = _delaunay_pairs(cent)
    nbrs: dict[int, set[int]] = {i: set() for i in range(n)}
    for a, b in delaunay:
        nbrs[a].add(b)
        nbrs[b].add(a)

    reach = np.zeros(n)
    for a, b in delaunay:
        lo = lower(a, b)
        if any(k != a and k != b and upper(a, k) < lo and upper(b, k) < lo for k in nbrs[a] | nbrs[b]):
            continue
        d = math.hypot(cent[a, 0] - cent[b, 0], cent[a, 1] - cent[b, 1])
        reach[a] = max(reach[a], d)
        reach[b] = max(reach[b], d)

    cands = set(delaunay)
    for a in range(n):
        for b in tree.query_ball_point(cent[a], 2.0 * reach[a] + rad[a] + rmax):
            if b != a:
                cands.add((min(a, b), max(a, b)))

    by_source: dict[int, list[int]] = {}
    for a, b in cands:
        by_source.setdefault(a, []).append(b)
    for a, bs in by_source.items():
        dist.row(a, sorted(bs))

    kept = []
    for a, b in sorted(cands):
        d = dist(a, b)
        pool = [k for k in tree.query_ball_point(cent[a], d + rad[a] + rmax) if k != a and k != b]
        # certain witnesses from the cheap bounds first, exact distances only when needed
        witnessed = any(upper(a, k) < d and upper(b, k) < d for k in pool)
        if not witnessed:
            for k in pool:
                if lower(a, k) >= d or lower(b, k) >= d:
                    continue
                if dist(a, k) < d and dist(b, k) < d:
                    witnessed = True
                    break
        if not witnessed:
            kept.append((a, b))
    return kept
