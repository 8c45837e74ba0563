"""Pairwise similarity and three-building linear-arrangement predicates."""

from __future__ import annotations

from dataclasses import dataclass, fields, replace
from typing import NamedTuple, Sequence

from .exceptions import ConfigError, NotAdjacent
from .geometry import angle_diff_180, orientations_within
from .proximity import BuildingRecord, ProximityEdge

LEGIBILITY_MM = 0.2


@dataclass(frozen=True)
class Thresholds:
    """Recognition thresholds.

    ``delta*`` bound the similarity of two buildings (area ratio, orientation
    difference in degrees, edge-count ratio); ``eta*`` bound the arrangement
    of a triple (edge direction difference in degrees, length ratio, minimum
    facing ratio). ``td`` is the length clamp in meters.
    """

    delta1: float = 2.0
    delta2: float = 20.0
    delta3: float = 1.5
    eta1: float = 15.0
    eta2: float = 2.0
    eta3: float = 0.3
    td: float = 2.0

    def __post_init__(self) -> None:
        for f in fields(self):
            v = getattr(self, f.name)
            if isinstance(v, bool) or not isinstance(v, (int, float)):
                raise ConfigError(f"threshold {f.name} must be a number, got {v!r}")
            if not v > 0:
                raise ConfigError(f"threshold {f.name} must be strictly positive, got {v}")
        for name in ("delta1", "delta3", "eta2"):
            if getattr(self, name) < 1:
                raise ConfigError(f"threshold {name} is a ratio and must be >= 1")
        if self.eta3 > 1:
            raise ConfigError("eta3 is a facing ratio and must be <= 1")

    @classmethod
    def for_map_scale(cls, scale: float = 10_000, **overrides) -> "Thresholds":
        """Thresholds with ``td`` set to the 0.2 mm legibility distance at ``scale``."""
        overrides.setdefault("td", LEGIBILITY_MM * 1e-3 * scale)
        return cls(**overrides)

    def as_dict(self) -> dict[str, float]:
        return {f.name: getattr(self, f.name) for f in fields(self)}

    def with_(self, **kw) -> "Thresholds":
        return replace(self, **kw)


class SimilarityResult(NamedTuple):
    a_r: float
    o_r: float
    e_r: float
    passed: bool


class StrResult(NamedTuple):
    d_o: float
    d_l: float
    fr_ij: float
    fr_jk: float
    passed: bool


class AdjacentPair(NamedTuple):
    """Two proximity edges meeting at ``j``; the triple reads ``(i, j, k)`` with ``i < k``."""

    i: int
    j: int
    k: int
    e_ij: ProximityEdge
    e_jk: ProximityEdge


def _ratio(a: float, b: float) -> float:
    return max(a, b) / min(a, b)


def similarity(bi: BuildingRecord, bj: BuildingRecord, t: Thresholds) -> SimilarityResult:
    a_r = _ratio(bi.area, bj.area)
    o_r = angle_diff_180(bi.b_ori, bj.b_ori)
    e_r = _ratio(bi.edge_cnt, bj.edge_cnt)
    ok = a_r <= t.delta1 and orientations_within(bi.b_ori, bj.b_ori, t.delta2) and e_r <= t.delta3
    return SimilarityResult(a_r, o_r, e_r, ok)


def clamp_length(le: float, td: float) -> float:
    return max(le, td)


def linear_triple(e_ij: ProximityEdge, e_jk: ProximityEdge, t: Thresholds) -> StrResult:
    shared = {e_ij.i, e_ij.j} & {e_jk.i, e_jk.j}
    if len(shared) != 1:
        raise NotAdjacent(f"edges ({e_ij.i},{e_ij.j}) and ({e_jk.i},{e_jk.j}) do not share exactly one building")
    d_o = angle_diff_180(e_ij.e_ori, e_jk.e_ori)
    l1, l2 = clamp_length(e_ij.le, t.td), clamp_length(e_jk.le, t.td)
    d_l = _ratio(l1, l2)
    ok = (
        orientations_within(e_ij.e_ori, e_jk.e_ori, t.eta1)
        and d_l <= t.eta2
        and e_ij.fr >= t.eta3
        and e_jk.fr >= t.eta3
    )
    return StrResult(d_o, d_l, e_ij.fr, e_jk.fr, ok)


def enumerate_adjacent_pairs(edges: Sequence[ProximityEdge]) -> list[AdjacentPair]:
    incident: dict[int, list[ProximityEdge]] = {}
    for e in edges:
        incident.setdefault(e.i, []).append(e)
        incident.setdefault(e.j, []).append(e)
    out = []
    for j, inc in incident.items():
        for a in range(len(inc)):
            for b in range(a + 1, len(inc)):
                e1, e2 = inc[a], inc[b]
                i, k = e1.other(j), e2.other(j)
                if i == k:
                    continue
                if i > k:
                    i, k, e1, e2 = k, i, e2, e1
                out.append(AdjacentPair(i, j, k, e1, e2))
    out.sort(key=lambda p: (p.i, p.j, p.k))
    return out


def triple_pattern_passes(
    records: dict[int, BuildingRecord], pair: AdjacentPair, t: Thresholds
) -> bool:
    """Proximity (given), pairwise similarity along the chain and arrangement."""
    if not similarity(records[pair.i], records[pair.j], t).passed:
        return False
    if not similarity(records[pair.j], records[pair.k], t).passed:
        return False
    return linear_triple(pair.e_ij, pair.e_jk, t).passed
