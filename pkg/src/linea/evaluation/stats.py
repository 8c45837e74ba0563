"""Descriptive statistics of a building dataset."""

from __future__ import annotations

from dataclasses import asdict, dataclass
from typing import Sequence

from ..exceptions import EmptyDataset
from ..proximity import BuildingRecord

EDGE_LIMIT = 8


@dataclass(frozen=True)
class DatasetStats:
    b_count: int
    ave_a: float
    ave_e: float
    rate_e_le8: float

    def as_dict(self) -> dict:
        return asdict(self)


def dataset_stats(buildings: Sequence[BuildingRecord]) -> DatasetStats:
    """Count, mean area, mean edge count and share of buildings with at most 8 edges."""
    n = len(buildings)
    if n == 0:
        raise EmptyDataset("no buildings")
    return DatasetStats(
        b_count=n,
        ave_a=sum(b.area for b in buildings) / n,
        ave_e=sum(b.edge_cnt for b in buildings) / n,
        rate_e_le8=sum(1 for b in buildings if b.edge_cnt <= EDGE_LIMIT) / n,
    )
