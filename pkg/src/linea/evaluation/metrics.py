"""Precision and recall of detected patterns against ground-truth id sets."""

from __future__ import annotations

from dataclasses import asdict, dataclass
from typing import Iterable

CRITERIA = ("exact", "jaccard")


@dataclass(frozen=True)
class PRReport:
    tp: int
    fp: int
    fn: int
    precision: float
    recall: float

    @classmethod
    def from_counts(cls, tp: int, fp: int, fn: int) -> "PRReport":
        # an empty side is vacuously perfect only when the other side is empty too
        precision = tp / (tp + fp) if tp + fp else (1.0 if fn == 0 else 0.0)
        recall = tp / (tp + fn) if tp + fn else (1.0 if fp == 0 else 0.0)
        return cls(tp, fp, fn, precision, recall)

    def as_dict(self) -> dict:
        return asdict(self)


def _as_set(p) -> frozenset:
    ids = getattr(p, "building_ids", p)
    return frozenset(int(i) for i in ids)


def jaccard(a: frozenset, b: frozenset) -> float:
    union = len(a | b)
    return len(a & b) / union if union else 1.0


def precision_recall(
    detected: Iterable, truth: Iterable, match: str = "exact", tau: float = 0.8
) -> PRReport:
    """Greedy one-to-one matching of detected patterns to truth sets.

    ``match="exact"`` pairs equal sets. ``match="jaccard"`` pairs sets with
    Jaccard index at least ``tau``, best pairs first (ties by input order).
    """
    if match not in CRITERIA:
        raise ValueError(f"match must be one of {CRITERIA}, got {match!r}")
    det = [_as_set(p) for p in detected]
    tru = [_as_set(p) for p in truth]
    if match == "exact":
        threshold = 1.0
    else:
        if not 0 < tau <= 1:
            raise ValueError("tau must lie in (0, 1]")
        threshold = tau
    candidates = []
    for i, d in enumerate(det):
        for j, g in enumerate(tru):
            if match == "exact":
                if d == g:
                    candidates.append((-1.0, i, j))
            else:
                s = jaccard(d, g)
                if s >= threshold:
                    candidates.append((-s, i, j))
    candidates.sort()
    used_d, used_t = set(), set()
    for _, i, j in candidates:
        if i in used_d or j in used_t:
            continue
        used_d.add(i)
        used_t.add(j)
    tp = len(used_d)
    return PRReport.from_counts(tp, len(det) - tp, len(tru) - tp)
