"""Synthetic datasets with known linear patterns.

Each dataset is a set of rows of identical rectangles plus irregular decoy
buildings. Consecutive rows alternate between a near and a far pitch, so a
column of buildings never has two similar proximity edges and only the rows
are collinear patterns. Decoys have at least seven sides, which puts their
edge-count ratio to any rectangle above the default similarity threshold.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, fields
from typing import Any, Mapping

import numpy as np

from ..exceptions import InvalidSpec
from ..geometry import Polygon, edge_count, rotate_point
from ..proximity import BuildingRecord, make_buildings, rng_build
from ..relations import Thresholds, enumerate_adjacent_pairs, triple_pattern_passes

NEAR_PITCH = 1.5
FAR_PITCH = 6.0
WIDTH = 0.5
DEPTH = 0.4
DECOY_MIN_SIDES = 7
_MAX_DECOY_TRIES = 200


@dataclass(frozen=True)
class SyntheticSpec:
    rows: int = 1
    cols: int = 5
    spacing: float = 20.0
    jitter: float = 0.0
    rotation: float = 0.0
    decoys: int = 0
    seed: int = 0

    def __post_init__(self) -> None:
        for name in ("rows", "cols", "decoys", "seed"):
            v = getattr(self, name)
            if isinstance(v, bool) or not isinstance(v, int) or v < 0:
                raise InvalidSpec(f"{name} must be a non-negative integer, got {v!r}")
        for name in ("spacing", "jitter", "rotation"):
            v = getattr(self, name)
            if isinstance(v, bool) or not isinstance(v, (int, float)) or not math.isfinite(v):
                raise InvalidSpec(f"{name} must be a finite number, got {v!r}")
        if self.spacing <= 0:
            raise InvalidSpec("spacing must be positive")
        if self.jitter < 0:
            raise InvalidSpec("jitter must be non-negative")
        # two neighbours moving toward each other must not close the row gap
        if self.jitter >= (1 - WIDTH) * self.spacing / 2:
            raise InvalidSpec(f"jitter must stay below {(1 - WIDTH) * self.spacing / 2:g} m for spacing {self.spacing:g}")
        if self.rows * self.cols + self.decoys == 0:
            raise InvalidSpec("spec produces no buildings")

    @classmethod
    def from_dict(cls, d: Mapping[str, Any]) -> "SyntheticSpec":
        known = {f.name for f in fields(cls)}
        unknown = set(d) - known
        if unknown:
            raise InvalidSpec(f"unknown spec keys: {sorted(unknown)}")
        return cls(**d)

    def as_dict(self) -> dict:
        return asdict(self)


def scaling_spec(n: int, cols: int = 10, seed: int = 0, spacing: float = 20.0) -> SyntheticSpec:
    """A spec with exactly ``n`` buildings: full rows of ``cols`` plus 3+ decoys."""
    if n < 3:
        raise InvalidSpec("scaling datasets need at least 3 buildings")
    rows = (n - 3) // cols
    return SyntheticSpec(rows=rows, cols=cols, spacing=spacing, decoys=n - rows * cols, seed=seed)


def _row_offsets(rows: int, s: float) -> list[float]:
    ys, y = [], 0.0
    for r in range(rows):
        ys.append(y)
        y += (NEAR_PITCH if r % 2 == 0 else FAR_PITCH) * s
    return ys


def _rect(cx: float, cy: float, w: float, h: float) -> list[tuple[float, float]]:
    return [(cx - w / 2, cy - h / 2), (cx + w / 2, cy - h / 2), (cx + w / 2, cy + h / 2), (cx - w / 2, cy + h / 2)]


def _disc(rng: np.random.Generator, radius: float) -> tuple[float, float]:
    if radius == 0:
        return 0.0, 0.0
    r = radius * math.sqrt(rng.random())
    a = 2 * math.pi * rng.random()
    return r * math.cos(a), r * math.sin(a)


def _decoy_ring(rng: np.random.Generator, cx: float, cy: float, r: float) -> list[tuple[float, float]]:
    """Star-shaped polygon with 7 to 10 vertices and uneven radii."""
    n = int(rng.integers(DECOY_MIN_SIDES, 11))
    # evenly spread angles with a small wobble keep every vertex a real corner
    angles = np.linspace(0, 2 * math.pi, n, endpoint=False) + rng.uniform(-0.15, 0.15, n) * (2 * math.pi / n)
    radii = r * rng.uniform(0.55, 1.0, n)
    radii[::2] *= 0.7
    return [(cx + rr * math.cos(a), cy + rr * math.sin(a)) for a, rr in zip(angles, radii)]


def _decoy_zones(rows: int, cols: int, s: float) -> list[tuple[float, float]]:
    """Horizontal bands (y-centres) far enough from every row to leave row edges intact."""
    ys = _row_offsets(rows, s)
    zones = []
    for r in range(rows - 1):
        if r % 2 == 1:  # far gap between rows r and r+1
            zones.append((ys[r] + ys[r + 1]) / 2)
    top = ys[-1] if ys else 0.0
    zones.append(top + 3.0 * s)
    zones.append(-3.0 * s)
    return zones


def _decoys_inert(decoys: list[BuildingRecord], t: Thresholds) -> bool:
    """No decoy triple passes, checked on the decoy-only RNG.

    Adding buildings can only remove RNG edges, so the decoy-only graph has
    every decoy-decoy edge of the full dataset.
    """
    if len(decoys) < 3:
        return True
    edges = rng_build(decoys, exact=True)
    records = {b.id: b for b in decoys}
    return not any(triple_pattern_passes(records, p, t) for p in enumerate_adjacent_pairs(edges))


def generate_synthetic(
    spec: SyntheticSpec | Mapping[str, Any], t: Thresholds | None = None
) -> tuple[list[BuildingRecord], list[frozenset[int]]]:
    """Buildings plus ground-truth patterns (one per row of at least 3)."""
    if not isinstance(spec, SyntheticSpec):
        spec = SyntheticSpec.from_dict(spec)
    t = t or Thresholds()
    rng = np.random.default_rng(spec.seed)
    s = spec.spacing
    rings: list[list[tuple[float, float]]] = []
    truth: list[frozenset[int]] = []
    for r, y in enumerate(_row_offsets(spec.rows, s)):
        row_ids = []
        for c in range(spec.cols):
            dx, dy = _disc(rng, spec.jitter)
            row_ids.append(len(rings))
            rings.append(_rect(c * s + dx, y + dy, WIDTH * s, DEPTH * s))
        if spec.cols >= 3:
            truth.append(frozenset(row_ids))

    zones = _decoy_zones(spec.rows, spec.cols, s)
    x_lo, x_hi = -s, max(spec.cols, 1) * s
    first_decoy = len(rings)
    for _ in range(_MAX_DECOY_TRIES):
        placed: list[tuple[float, float, float]] = []
        decoy_rings = []
        attempts = 0
        while len(decoy_rings) < spec.decoys:
            attempts += 1
            if attempts > 1000 * spec.decoys:
                raise InvalidSpec("no room for the requested decoys")
            zy = zones[int(rng.integers(len(zones)))]
            radius = s * rng.uniform(0.2, 0.35)
            cx = rng.uniform(x_lo, x_hi)
            cy = zy + rng.uniform(-0.5, 0.5) * s
            if any(math.hypot(cx - px, cy - py) < radius + pr + 0.1 * s for px, py, pr in placed):
                continue
            ring = _decoy_ring(rng, cx, cy, radius)
            if edge_count(Polygon(tuple(ring))) < DECOY_MIN_SIDES:
                continue
            placed.append((cx, cy, radius))
            decoy_rings.append(ring)
        recs = make_buildings([Polygon(tuple(_rotate_ring(rg, spec.rotation))) for rg in decoy_rings],
                              ids=range(first_decoy, first_decoy + len(decoy_rings)))
        if _decoys_inert(recs, t):
            break
    else:
        raise InvalidSpec("could not place inert decoys; lower the decoy count")

    polys = [Polygon(tuple(_rotate_ring(rg, spec.rotation))) for rg in rings]
    buildings = make_buildings(polys, ids=range(len(polys))) + recs
    return buildings, truth


def _rotate_ring(ring, deg: float):
    if deg == 0:
        return ring
    return [rotate_point(p, deg) for p in ring]
