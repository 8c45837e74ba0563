"""scikit-learn style front end for linear pattern recognition."""

from __future__ import annotations

from typing import Any, Optional

import numpy as np
from sklearn.base import BaseEstimator, ClusterMixin
from sklearn.utils.validation import check_is_fitted

from .config import Config
from .exceptions import ConfigError
from .pipeline import build_kg, recognize_linear_patterns
from .proximity import rng_build
from .relations import Thresholds
from .validation import check_buildings, check_roads


class LinearPatternRecognizer(BaseEstimator, ClusterMixin):
    """Group building footprints into linear (collinear) patterns.

    ``X`` is a sequence of footprints: vertex arrays of shape ``(n, 2)``,
    :class:`~linea.geometry.Polygon` objects, shapely polygons or
    :class:`~linea.proximity.BuildingRecord` objects. After ``fit``,
    ``labels_[i]`` is the index of the first pattern containing building
    ``i``, or ``-1``. ``memberships_[i]`` lists every pattern index of
    building ``i``, since a building can sit where two patterns cross.

    Recognition is transductive: a building's pattern depends on its
    neighbours, so ``predict(X)`` refits on ``X`` and returns its labels.
    """

    def __init__(
        self,
        delta1: float = 2.0,
        delta2: float = 20.0,
        delta3: float = 1.5,
        eta1: float = 15.0,
        eta2: float = 2.0,
        eta3: float = 0.3,
        td: Optional[float] = None,
        map_scale: int = 10_000,
        schema: str = "A",
        mode: str = "engine",
        align_rule: str = "listing",
        rng_metric: str = "footprint",
        fr_combine: str = "max",
        exact_rng: bool = False,
    ):
        self.delta1 = delta1
        self.delta2 = delta2
        self.delta3 = delta3
        self.eta1 = eta1
        self.eta2 = eta2
        self.eta3 = eta3
        self.td = td
        self.map_scale = map_scale
        self.schema = schema
        self.mode = mode
        self.align_rule = align_rule
        self.rng_metric = rng_metric
        self.fr_combine = fr_combine
        self.exact_rng = exact_rng

    @classmethod
    def from_config(cls, config: Config) -> "LinearPatternRecognizer":
        t = config.to_thresholds()
        kw = t.as_dict()
        if "td" not in config.thresholds:
            kw["td"] = None
        return cls(
            **kw,
            map_scale=config.map_scale,
            schema=config.schema,
            mode=config.mode,
            align_rule=config.align_rule,
            rng_metric=config.rng_metric,
            fr_combine=config.fr_combine,
            exact_rng=config.exact_rng,
        )

    def _config(self) -> Config:
        th = {k: getattr(self, k) for k in ("delta1", "delta2", "delta3", "eta1", "eta2", "eta3")}
        if self.td is not None:
            th["td"] = self.td
        try:
            return Config(
                thresholds=th,
                map_scale=self.map_scale,
                rng_metric=self.rng_metric,
                exact_rng=self.exact_rng,
                fr_combine=self.fr_combine,
                align_rule=self.align_rule,
                schema=self.schema,
                mode=self.mode,
            )
        except ConfigError as exc:
            raise ValueError(str(exc)) from exc

    @property
    def thresholds(self) -> Thresholds:
        return self._config().to_thresholds()

    def fit(self, X: Any, y: Any = None, roads: Any = None, ids: Any = None) -> "LinearPatternRecognizer":
        cfg = self._config()
        t = cfg.to_thresholds()
        buildings = check_buildings(X, ids)
        road_lines = check_roads(roads)
        edges = rng_build(
            buildings, road_lines, exact=cfg.exact_rng, metric=cfg.rng_metric, fr_combine=cfg.fr_combine
        )
        kg = build_kg(buildings, t=t, schema=cfg.schema, edges=edges)
        patterns = recognize_linear_patterns(kg, t, mode=cfg.mode, align_rule=cfg.align_rule)

        index = {b.id: n for n, b in enumerate(buildings)}
        memberships: list[list[int]] = [[] for _ in buildings]
        for k, p in enumerate(patterns):
            for bid in p.building_ids:
                memberships[index[bid]].append(k)
        self.buildings_ = buildings
        self.edges_ = edges
        self.thresholds_ = t
        self.patterns_ = patterns
        self.memberships_ = memberships
        self.labels_ = np.array([m[0] if m else -1 for m in memberships], dtype=int)
        self.n_patterns_ = len(patterns)
        return self

    def predict(self, X: Any, roads: Any = None, ids: Any = None) -> np.ndarray:
        return self.fit(X, roads=roads, ids=ids).labels_

    def fit_predict(self, X: Any, y: Any = None, roads: Any = None, ids: Any = None) -> np.ndarray:
        return self.fit(X, roads=roads, ids=ids).labels_

    def pattern_ids(self) -> list[tuple[int, ...]]:
        """Building ids of each recognized pattern, in chain order."""
        check_is_fitted(self, "patterns_")
        return [p.building_ids for p in self.patterns_]
