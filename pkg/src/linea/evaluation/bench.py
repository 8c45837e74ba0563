"""Timing harness comparing the rule engine with the traversal baseline."""

from __future__ import annotations

import csv
import gc
import statistics
import time
from dataclasses import asdict, dataclass
from typing import Iterable, Optional, Sequence, TextIO

from ..baseline import ProximityGraph, baseline_recognize_graph
from ..pipeline import build_kg, recognize_linear_patterns
from ..proximity import BuildingRecord, ProximityEdge, rng_build
from ..relations import Thresholds
from ..rules import DERIVATION, RECOGNITION, load_script
from .synthetic import generate_synthetic, scaling_spec

METHODS = ("engine", "baseline")
CSV_HEADER = ["dataset", "schema", "method", "v_count", "e_count", "runs", "min_t", "max_t", "ave_t", "std_t", "e_rate"]
REFERENCE_SIZES = (36, 241, 685, 1295, 3566)


@dataclass(frozen=True)
class BenchReport:
    method: str
    schema: str
    runs: int
    min_t: float
    max_t: float
    ave_t: float
    std_t: float
    v_count: int
    e_count: int
    dataset: str = ""
    patterns: int = 0

    @classmethod
    def from_samples(cls, samples: Sequence[float], **kw) -> "BenchReport":
        if not samples:
            raise ValueError("at least one timing sample is needed")
        std = statistics.stdev(samples) if len(samples) > 1 else 0.0
        ave = statistics.fmean(samples)
        # fmean can land a rounding step outside [min, max] for equal samples
        ave = min(max(ave, min(samples)), max(samples))
        return cls(runs=len(samples), min_t=min(samples), max_t=max(samples), ave_t=ave, std_t=std, **kw)

    def as_dict(self) -> dict:
        return asdict(self)


@dataclass
class Dataset:
    """Buildings plus their proximity edges, computed once and shared by both methods."""

    name: str
    buildings: list[BuildingRecord]
    edges: list[ProximityEdge]

    @classmethod
    def from_buildings(cls, name: str, buildings: Sequence[BuildingRecord], roads=(), **rng_kw) -> "Dataset":
        return cls(name, list(buildings), rng_build(buildings, roads, **rng_kw))


def benchmark(
    dataset: Dataset,
    method: str = "engine",
    runs: int = 10,
    schema: str = "A",
    t: Optional[Thresholds] = None,
    warmup: bool = True,
) -> BenchReport:
    """Time the recognition phase of one method.

    Graph construction is outside the timed region. Under schema B the
    relation-derivation rules run inside it, since that is where schema B
    computes its relations. Each engine run gets a fresh copy of the graph,
    made before the clock starts. Rule scripts are parsed (and cached) before
    timing too. The garbage collector is paused while sampling, as ``timeit``
    does, so collector pauses do not land on whichever method runs longest.
    """
    if method not in METHODS:
        raise ValueError(f"method must be one of {METHODS}, got {method!r}")
    if runs < 1:
        raise ValueError("runs must be >= 1")
    t = t or Thresholds()
    kg = build_kg(dataset.buildings, t=t, schema=schema, edges=dataset.edges)
    v_count, e_count = kg.graph.node_count, kg.graph.edge_count
    samples = []
    n_patterns = 0

    if method == "engine":
        load_script(RECOGNITION, t)
        load_script(DERIVATION, t)

        def one_run() -> float:
            nonlocal n_patterns
            work = kg.copy()
            start = time.perf_counter()
            found = recognize_linear_patterns(work, t, mode="engine", in_place=True)
            elapsed = time.perf_counter() - start
            n_patterns = len(found)
            return elapsed
    else:
        pg = ProximityGraph.build(dataset.buildings, dataset.edges, t, schema)

        def one_run() -> float:
            nonlocal n_patterns
            start = time.perf_counter()
            found = baseline_recognize_graph(pg, dataset.buildings, dataset.edges, t)
            elapsed = time.perf_counter() - start
            n_patterns = len(found)
            return elapsed

    if warmup:
        one_run()
    gc_was_on = gc.isenabled()
    gc.collect()
    gc.disable()
    try:
        samples = []
        for _ in range(runs):
            samples.append(one_run())
            gc.collect()  # outside the timed region
    finally:
        if gc_was_on:
            gc.enable()
    return BenchReport.from_samples(
        samples,
        method=method,
        schema=schema,
        v_count=v_count,
        e_count=e_count,
        dataset=dataset.name,
        patterns=n_patterns,
    )


def e_rate(baseline: BenchReport, engine: BenchReport) -> float:
    return baseline.ave_t / engine.ave_t if engine.ave_t > 0 else float("inf")


def compare(dataset: Dataset, runs: int = 10, schema: str = "A", t: Optional[Thresholds] = None):
    """Engine and baseline reports for one dataset plus their time ratio."""
    eng = benchmark(dataset, "engine", runs, schema, t)
    base = benchmark(dataset, "baseline", runs, schema, t)
    return eng, base, e_rate(base, eng)


def scaling_suite(
    sizes: Iterable[int] = REFERENCE_SIZES,
    runs: int = 3,
    schema: str = "A",
    seed: int = 0,
    cols: int = 10,
    t: Optional[Thresholds] = None,
):
    """``compare`` over generated datasets of the given building counts."""
    out = []
    for n in sizes:
        buildings, _ = generate_synthetic(scaling_spec(n, cols=cols, seed=seed), t)
        ds = Dataset.from_buildings(f"synthetic_{n}", buildings)
        out.append(compare(ds, runs, schema, t))
    return out


def write_csv(rows: Iterable[tuple[BenchReport, Optional[float]]], fp: TextIO) -> None:
    w = csv.writer(fp, lineterminator="\n")
    w.writerow(CSV_HEADER)
    for rep, rate in rows:
        w.writerow(
            [
                rep.dataset,
                rep.schema,
                rep.method,
                rep.v_count,
                rep.e_count,
                rep.runs,
                f"{rep.min_t:.6f}",
                f"{rep.max_t:.6f}",
                f"{rep.ave_t:.6f}",
                f"{rep.std_t:.6f}",
                "" if rate is None else f"{rate:.4f}",
            ]
        )
