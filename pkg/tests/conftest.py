from __future__ import annotations

import math
import random

import pytest
from hypothesis import HealthCheck, settings

from linea.evaluation.synthetic import SyntheticSpec, generate_synthetic
from linea.geometry import Polygon
from linea.proximity import make_buildings

settings.register_profile(
    "default", max_examples=60, deadline=None, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("default")


def square(x: float, y: float, side: float = 10.0) -> Polygon:
    """Axis-aligned square with lower-left corner at (x, y)."""
    return Polygon(((x, y), (x + side, y), (x + side, y + side), (x, y + side)))


def rect(cx: float, cy: float, w: float, h: float, deg: float = 0.0) -> Polygon:
    c, s = math.cos(math.radians(deg)), math.sin(math.radians(deg))
    pts = []
    for dx, dy in ((-w / 2, -h / 2), (w / 2, -h / 2), (w / 2, h / 2), (-w / 2, h / 2)):
        pts.append((cx + dx * c - dy * s, cy + dx * s + dy * c))
    return Polygon(tuple(pts))


def row_of_squares(n: int, spacing: float = 20.0, side: float = 10.0, y: float = 0.0):
    return make_buildings([square(i * spacing, y, side) for i in range(n)])


def crossing_buildings():
    """Six buildings with three collinear triples, ids 1..6.

    B1-B2-B6 run vertically through B2 and B2-B3-B4-B5 run horizontally, so
    the triples in canonical order are 0=(1,2,6), 1=(2,3,4), 2=(3,4,5) and
    B3 belongs to triples 1 and 2.
    """
    polys = [
        square(0, -20),  # B1
        square(0, 0),  # B2
        square(20, 0),  # B3
        square(40, 0),  # B4
        square(60, 0),  # B5
        square(0, 20),  # B6
    ]
    return make_buildings(polys, ids=[1, 2, 3, 4, 5, 6])


@pytest.fixture
def crossing():
    return crossing_buildings()


@pytest.fixture
def row5():
    return row_of_squares(5)


def mixed_dataset(seed: int, n_max: int = 200):
    """A varied dataset of at most ``n_max`` buildings.

    Jittered, rotated synthetic rows (patterns, merges and near misses)
    plus, for half the seeds, a scatter of random rectangles off to the side.
    """
    rng = random.Random(seed)
    cols = rng.randint(3, 12)
    rows = rng.randint(1, max(1, min(6, (n_max - 8) // cols)))
    spacing = rng.uniform(10, 40)
    spec = SyntheticSpec(
        rows=rows,
        cols=cols,
        spacing=spacing,
        jitter=rng.choice([0.0, 0.05, 0.1, 0.2]) * spacing,
        rotation=rng.uniform(0, 180),
        decoys=rng.randint(0, 3),
        seed=seed,
    )
    buildings, truth = generate_synthetic(spec)
    if seed % 2 and len(buildings) < n_max:
        extra = rng.randint(1, min(40, n_max - len(buildings)))
        x0 = (cols + 3) * spacing
        polys = [
            rect(x0 + rng.uniform(0, 8 * spacing), rng.uniform(0, 8 * spacing),
                 rng.uniform(0.2, 0.6) * spacing, rng.uniform(0.2, 0.6) * spacing, rng.choice([0, 0, 90, rng.uniform(0, 180)]))
            for _ in range(extra)
        ]
        start = max(b.id for b in buildings) + 1
        buildings = buildings + make_buildings(polys, ids=range(start, start + extra))
    return buildings, truth


VERDICTS: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if VERDICTS:
        terminalreporter.section("acceptance criteria")
        for line in VERDICTS:
            terminalreporter.write_line(line)
