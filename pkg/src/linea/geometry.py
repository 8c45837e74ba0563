"""Planar computational-geometry kernel.

All lengths are meters in a projected coordinate system and all angles are
degrees. Polygons carry only an exterior ring; holes are not modelled.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence, Tuple

from .exceptions import DegeneratePolygon

Point = Tuple[float, float]

AREA_EPS = 1e-9
DUPLICATE_EPS = 1e-6
_ANGLE_SNAP = 1e-9


def fold_180(deg: float) -> float:
    """Fold an angle into ``[0, 180)``, snapping values within 1e-9 of 180 to 0."""
    a = deg % 180.0
    if a >= 180.0 - _ANGLE_SNAP:
        a = 0.0
    return a


def _cross(o: Point, a: Point, b: Point) -> float:
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])


def _signed_area(ring: Sequence[Point]) -> float:
    s = 0.0
    n = len(ring)
    for i in range(n):
        x0, y0 = ring[i]
        x1, y1 = ring[(i + 1) % n]
        s += x0 * y1 - x1 * y0
    return 0.5 * s


def _dedupe(coords: Sequence[Point], eps: float = DUPLICATE_EPS) -> list[Point]:
    out: list[Point] = []
    for x, y in coords:
        p = (float(x), float(y))
        if not (math.isfinite(p[0]) and math.isfinite(p[1])):
            raise DegeneratePolygon(f"non-finite coordinate {p!r}")
        if out and math.hypot(p[0] - out[-1][0], p[1] - out[-1][1]) <= eps:
            continue
        out.append(p)
    while len(out) > 1 and math.hypot(out[0][0] - out[-1][0], out[0][1] - out[-1][1]) <= eps:
        out.pop()
    return out


@dataclass(frozen=True)
class Polygon:
    """Simple polygon given by its exterior ring.

    The ring is normalized on construction: the closing vertex and consecutive
    duplicates are dropped and the winding is made counter-clockwise.
    """

    ring: Tuple[Point, ...]
    _bbox: Tuple[float, float, float, float] = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        ring = _dedupe(self.ring)
        if len(ring) < 3:
            raise DegeneratePolygon(f"polygon needs at least 3 distinct vertices, got {len(ring)}")
        area = _signed_area(ring)
        if abs(area) < AREA_EPS:
            raise DegeneratePolygon(f"polygon area {abs(area):.3g} m^2 is below {AREA_EPS}")
        if area < 0:
            ring.reverse()
        if not _is_simple(ring):
            raise DegeneratePolygon("polygon ring self-intersects")
        xs = [p[0] for p in ring]
        ys = [p[1] for p in ring]
        object.__setattr__(self, "ring", tuple(ring))
        object.__setattr__(self, "_bbox", (min(xs), min(ys), max(xs), max(ys)))

    @property
    def bbox(self) -> Tuple[float, float, float, float]:
        return self._bbox

    def segments(self) -> Iterable[Tuple[Point, Point]]:
        ring = self.ring
        n = len(ring)
        for i in range(n):
            yield ring[i], ring[(i + 1) % n]

    def translated(self, dx: float, dy: float) -> "Polygon":
        return Polygon(tuple((x + dx, y + dy) for x, y in self.ring))

    def rotated(self, deg: float, origin: Point = (0.0, 0.0)) -> "Polygon":
        return Polygon(tuple(rotate_point(p, deg, origin) for p in self.ring))

    def scaled(self, s: float, origin: Point = (0.0, 0.0)) -> "Polygon":
        ox, oy = origin
        return Polygon(tuple((ox + (x - ox) * s, oy + (y - oy) * s) for x, y in self.ring))


@dataclass(frozen=True)
class OrientedRect:
    center: Point
    axis_deg: float
    half_len: float
    half_wid: float

    @property
    def area(self) -> float:
        return 4.0 * self.half_len * self.half_wid

    def corners(self) -> list[Point]:
        ux, uy = math.cos(math.radians(self.axis_deg)), math.sin(math.radians(self.axis_deg))
        vx, vy = -uy, ux
        cx, cy = self.center
        out = []
        for a, b in ((1, 1), (-1, 1), (-1, -1), (1, -1)):
            out.append(
                (
                    cx + a * self.half_len * ux + b * self.half_wid * vx,
                    cy + a * self.half_len * uy + b * self.half_wid * vy,
                )
            )
        return out


@dataclass(frozen=True)
class Polyline:
    points: Tuple[Point, ...]

    def __post_init__(self) -> None:
        pts = tuple((float(x), float(y)) for x, y in self.points)
        if len(pts) < 2:
            raise ValueError("polyline needs at least 2 points")
        for a, b in zip(pts, pts[1:]):
            if a == b:
                raise ValueError("polyline has repeated consecutive points")
        object.__setattr__(self, "points", pts)

    def segments(self) -> Iterable[Tuple[Point, Point]]:
        return zip(self.points, self.points[1:])


def rotate_point(p: Point, deg: float, origin: Point = (0.0, 0.0)) -> Point:
    t = math.radians(deg)
    c, s = math.cos(t), math.sin(t)
    x, y = p[0] - origin[0], p[1] - origin[1]
    return (origin[0] + c * x - s * y, origin[1] + s * x + c * y)


# -- predicates ---------------------------------------------------------------


def _on_segment(p: Point, a: Point, b: Point) -> bool:
    return min(a[0], b[0]) <= p[0] <= max(a[0], b[0]) and min(a[1], b[1]) <= p[1] <= max(a[1], b[1])


def segments_intersect(a: Point, b: Point, c: Point, d: Point) -> bool:
    """Closed-segment intersection test (touching counts)."""
    d1 = _cross(c, d, a)
    d2 = _cross(c, d, b)
    d3 = _cross(a, b, c)
    d4 = _cross(a, b, d)
    if ((d1 > 0 and d2 < 0) or (d1 < 0 and d2 > 0)) and ((d3 > 0 and d4 < 0) or (d3 < 0 and d4 > 0)):
        return True
    if d1 == 0 and _on_segment(a, c, d):
        return True
    if d2 == 0 and _on_segment(b, c, d):
        return True
    if d3 == 0 and _on_segment(c, a, b):
        return True
    if d4 == 0 and _on_segment(d, a, b):
        return True
    return False


def segments_cross_properly(a: Point, b: Point, c: Point, d: Point) -> bool:
    """True iff the open segments cross at a single interior point."""
    d1 = _cross(c, d, a)
    d2 = _cross(c, d, b)
    d3 = _cross(a, b, c)
    d4 = _cross(a, b, d)
    return d1 * d2 < 0 and d3 * d4 < 0


def _is_simple(ring: Sequence[Point]) -> bool:
    n = len(ring)
    if n == 3:
        return True
    for i in range(n):
        a, b = ring[i], ring[(i + 1) % n]
        for j in range(i + 1, n):
            if j == i or (j + 1) % n == i or j == (i + 1) % n:
                continue
            if segments_intersect(a, b, ring[j], ring[(j + 1) % n]):
                return False
    return True


def point_in_polygon(p: Point, poly: Polygon) -> bool:
    """Even-odd ray casting; boundary points may go either way."""
    x, y = p
    inside = False
    ring = poly.ring
    n = len(ring)
    j = n - 1
    for i in range(n):
        xi, yi = ring[i]
        xj, yj = ring[j]
        if (yi > y) != (yj > y):
            xc = xi + (y - yi) * (xj - xi) / (yj - yi)
            if x < xc:
                inside = not inside
        j = i
    return inside


def point_segment_distance(p: Point, a: Point, b: Point) -> float:
    ax, ay = a
    dx, dy = b[0] - ax, b[1] - ay
    px, py = p[0] - ax, p[1] - ay
    l2 = dx * dx + dy * dy
    if l2 == 0.0:
        return math.hypot(px, py)
    t = (px * dx + py * dy) / l2
    if t <= 0.0:
        return math.hypot(px, py)
    if t >= 1.0:
        return math.hypot(p[0] - b[0], p[1] - b[1])
    return math.hypot(px - t * dx, py - t * dy)


# -- metrics ------------------------------------------------------------------


def polygon_area(p: Polygon) -> float:
    area = _signed_area(p.ring)
    if area < AREA_EPS:
        raise DegeneratePolygon("polygon area vanishes")
    return area


def centroid(p: Polygon) -> Point:
    ring = p.ring
    n = len(ring)
    # shift to the first vertex to limit cancellation for far-from-origin data
    ox, oy = ring[0]
    a = cx = cy = 0.0
    for i in range(n):
        x0, y0 = ring[i][0] - ox, ring[i][1] - oy
        x1, y1 = ring[(i + 1) % n][0] - ox, ring[(i + 1) % n][1] - oy
        w = x0 * y1 - x1 * y0
        a += w
        cx += (x0 + x1) * w
        cy += (y0 + y1) * w
    if abs(a) < 2 * AREA_EPS:
        raise DegeneratePolygon("centroid of a zero-area polygon")
    return (ox + cx / (3.0 * a), oy + cy / (3.0 * a))


def edge_count(p: Polygon, collinear_tol_deg: float = 1.0) -> int:
    """Number of edges after dropping near-straight vertices.

    A vertex is dropped while the turn it makes deviates from a straight
    continuation by less than ``collinear_tol_deg``.
    """
    ring = _dedupe(p.ring)
    changed = True
    while changed and len(ring) >= 3:
        changed = False
        n = len(ring)
        for i in range(n):
            prev, cur, nxt = ring[i - 1], ring[i], ring[(i + 1) % n]
            h1 = math.atan2(cur[1] - prev[1], cur[0] - prev[0])
            h2 = math.atan2(nxt[1] - cur[1], nxt[0] - cur[0])
            turn = abs(math.degrees((h2 - h1 + math.pi) % (2 * math.pi) - math.pi))
            if turn < collinear_tol_deg:
                del ring[i]
                changed = True
                break
        if changed:
            ring = _dedupe(ring)
    if len(ring) < 3:
        raise DegeneratePolygon("simplification left fewer than 3 vertices")
    return len(ring)


def convex_hull(points: Iterable[Point]) -> list[Point]:
    """Andrew's monotone chain; returns the hull counter-clockwise without repeats."""
    pts = sorted(set(points))
    if len(pts) <= 2:
        return pts
    lower: list[Point] = []
    for p in pts:
        while len(lower) >= 2 and _cross(lower[-2], lower[-1], p) <= 0:
            lower.pop()
        lower.append(p)
    upper: list[Point] = []
    for p in reversed(pts):
        while len(upper) >= 2 and _cross(upper[-2], upper[-1], p) <= 0:
            upper.pop()
        upper.append(p)
    return lower[:-1] + upper[:-1]


def min_bounding_rect(p: Polygon) -> OrientedRect:
    """Minimum-area enclosing rectangle by rotating calipers over the hull.

    Candidate orientations are the hull edge directions. Among equal-area
    candidates the one with the smallest axis angle wins, which also settles
    the square case.
    """
    hull = convex_hull(p.ring)
    if len(hull) < 3:
        raise DegeneratePolygon("convex hull is degenerate")
    best = None
    n = len(hull)
    for i in range(n):
        a, b = hull[i], hull[(i + 1) % n]
        ex, ey = b[0] - a[0], b[1] - a[1]
        norm = math.hypot(ex, ey)
        ux, uy = ex / norm, ey / norm
        vx, vy = -uy, ux
        us = [q[0] * ux + q[1] * uy for q in hull]
        vs = [q[0] * vx + q[1] * vy for q in hull]
        u0, u1, v0, v1 = min(us), max(us), min(vs), max(vs)
        lu, lv = u1 - u0, v1 - v0
        area = lu * lv
        um, vm = 0.5 * (u0 + u1), 0.5 * (v0 + v1)
        center = (um * ux + vm * vx, um * uy + vm * vy)
        ang_u = fold_180(math.degrees(math.atan2(uy, ux)))
        ang_v = fold_180(ang_u + 90.0)
        if abs(lu - lv) <= 1e-9 * max(lu, lv):
            axis, hl, hw = min(ang_u, ang_v), 0.5 * lu, 0.5 * lu
        elif lu > lv:
            axis, hl, hw = ang_u, 0.5 * lu, 0.5 * lv
        else:
            axis, hl, hw = ang_v, 0.5 * lv, 0.5 * lu
        cand = (area, axis, center, hl, hw)
        if best is None:
            best = cand
            continue
        tol = 1e-9 * max(area, best[0])
        if area < best[0] - tol or (abs(area - best[0]) <= tol and axis < best[1]):
            best = cand
    area, axis, center, hl, hw = best
    return OrientedRect(center=center, axis_deg=axis, half_len=hl, half_wid=hw)


def angle_diff_180(a: float, b: float) -> float:
    """Acute difference of two undirected orientations, in ``[0, 90]``."""
    d = abs(a - b) % 180.0
    return min(d, 180.0 - d)


def orientations_within(a: float, b: float, tol: float) -> bool:
    """``angle_diff_180(a, b) <= tol`` written as the rule scripts spell it.

    Both orientations must already lie in ``[0, 180)``; the two branches are
    the exact float expressions the rule engine evaluates.
    """
    d = abs(a - b)
    return d <= tol or (180 - d) <= tol


def min_distance(p: Polygon, q: Polygon) -> float:
    """Shortest distance between two footprints; 0 when they touch or nest."""
    pb, qb = p.bbox, q.bbox
    overlap = not (pb[2] < qb[0] or qb[2] < pb[0] or pb[3] < qb[1] or qb[3] < pb[1])
    if overlap:
        for a, b in p.segments():
            for c, d in q.segments():
                if segments_intersect(a, b, c, d):
                    return 0.0
        if point_in_polygon(p.ring[0], q) or point_in_polygon(q.ring[0], p):
            return 0.0
    best = math.inf
    qsegs = list(q.segments())
    for v in p.ring:
        for c, d in qsegs:
            dist = point_segment_distance(v, c, d)
            if dist < best:
                best = dist
    for v in q.ring:
        for a, b in p.segments():
            dist = point_segment_distance(v, a, b)
            if dist < best:
                best = dist
    return best


def _interval_ratio(a0: float, a1: float, b0: float, b1: float) -> float:
    overlap = max(0.0, min(a1, b1) - max(a0, b0))
    union = max(a1, b1) - min(a0, b0)
    if union <= 0.0:
        return 0.0
    return overlap / union


def _rect_key(r: OrientedRect) -> tuple:
    return (r.area, r.axis_deg, r.center, r.half_len, r.half_wid)


def facing_ratio(r1: OrientedRect, r2: OrientedRect, combine: str = "max") -> float:
    """Projection-overlap ratio of two bounding rectangles.

    Both rectangles are projected onto the main axis and the normal axis of
    the larger one; per axis the ratio is overlap length over union length.
    ``combine`` selects how the two per-axis ratios are merged.
    """
    if combine not in ("max", "min"):
        raise ValueError(f"combine must be 'max' or 'min', got {combine!r}")
    ref = r1 if _rect_key(r1) >= _rect_key(r2) else r2
    t = math.radians(ref.axis_deg)
    ux, uy = math.cos(t), math.sin(t)
    vx, vy = -uy, ux
    ratios = []
    for ax, ay in ((ux, uy), (vx, vy)):
        ivs = []
        for r in (r1, r2):
            cs = [x * ax + y * ay for x, y in r.corners()]
            ivs.append((min(cs), max(cs)))
        ratios.append(_interval_ratio(ivs[0][0], ivs[0][1], ivs[1][0], ivs[1][1]))
    return max(ratios) if combine == "max" else min(ratios)


def segment_crosses_polyline(a: Point, b: Point, road: Polyline) -> bool:
    """True iff segment ``ab`` properly crosses some segment of ``road``."""
    minx, maxx = min(a[0], b[0]), max(a[0], b[0])
    miny, maxy = min(a[1], b[1]), max(a[1], b[1])
    for c, d in road.segments():
        if max(c[0], d[0]) < minx or min(c[0], d[0]) > maxx:
            continue
        if max(c[1], d[1]) < miny or min(c[1], d[1]) > maxy:
            continue
        if segments_cross_properly(a, b, c, d):
            return True
    return False


def direction_deg(a: Point, b: Point) -> float:
    """Undirected direction of segment ``ab`` folded into ``[0, 180)``."""
    return fold_180(math.degrees(math.atan2(b[1] - a[1], b[0] - a[0])))
