"""Run configuration: thresholds plus the method switches, loaded from JSON."""

from __future__ import annotations

import json
import os
from dataclasses import asdict, dataclass, field, fields, replace
from pathlib import Path
from typing import Any, Mapping, Optional

from .exceptions import ConfigError
from .evaluation.metrics import CRITERIA
from .pipeline import ALIGN_RULES, MODES, SCHEMAS
from .proximity import FR_COMBINE, RNG_METRICS
from .relations import Thresholds

ENV_VAR = "LINEA_CONFIG"
THRESHOLD_KEYS = tuple(f.name for f in fields(Thresholds))


@dataclass(frozen=True)
class Config:
    """All user-facing settings of a recognition run.

    ``thresholds`` holds explicit overrides only. ``td`` follows the map
    scale unless it is overridden.
    """

    thresholds: Mapping[str, float] = field(default_factory=dict)
    map_scale: int = 10_000
    rng_metric: str = "footprint"
    exact_rng: bool = False
    fr_combine: str = "max"
    align_rule: str = "listing"
    match_criterion: str = "exact"
    jaccard_tau: float = 0.8
    schema: str = "A"
    mode: str = "engine"

    def __post_init__(self) -> None:
        if not isinstance(self.thresholds, Mapping):
            raise ConfigError("thresholds must be an object")
        unknown = set(self.thresholds) - set(THRESHOLD_KEYS)
        if unknown:
            raise ConfigError(f"unknown threshold keys: {sorted(unknown)}")
        object.__setattr__(self, "thresholds", dict(self.thresholds))
        if isinstance(self.map_scale, bool) or not isinstance(self.map_scale, int) or self.map_scale <= 0:
            raise ConfigError(f"map_scale must be a positive integer, got {self.map_scale!r}")
        if not isinstance(self.exact_rng, bool):
            raise ConfigError("exact_rng must be true or false")
        for name, allowed in (
            ("rng_metric", RNG_METRICS),
            ("fr_combine", FR_COMBINE),
            ("align_rule", ALIGN_RULES),
            ("match_criterion", CRITERIA),
            ("schema", SCHEMAS),
            ("mode", MODES),
        ):
            if getattr(self, name) not in allowed:
                raise ConfigError(f"{name} must be one of {list(allowed)}, got {getattr(self, name)!r}")
        tau = self.jaccard_tau
        if isinstance(tau, bool) or not isinstance(tau, (int, float)) or not 0 < tau <= 1:
            raise ConfigError(f"jaccard_tau must lie in (0, 1], got {tau!r}")
        if self.mode == "engine" and self.align_rule != "listing":
            raise ConfigError("align_rule 'outer_edges' needs mode 'direct'")
        self.to_thresholds()  # validates the values

    def to_thresholds(self) -> Thresholds:
        return Thresholds.for_map_scale(self.map_scale, **self.thresholds)

    @classmethod
    def from_dict(cls, d: Mapping[str, Any]) -> "Config":
        if not isinstance(d, Mapping):
            raise ConfigError("config must be a JSON object")
        known = {f.name for f in fields(cls)}
        unknown = set(d) - known
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        return cls(**d)

    def with_overrides(self, **kw) -> "Config":
        """Copy with non-None keyword values applied; threshold names go into ``thresholds``."""
        th = dict(self.thresholds)
        top = {}
        for k, v in kw.items():
            if v is None:
                continue
            if k in THRESHOLD_KEYS:
                th[k] = v
            else:
                top[k] = v
        return replace(self, thresholds=th, **top)

    def as_dict(self) -> dict:
        return asdict(self)


def load_config(path: Optional[str | os.PathLike] = None) -> Config:
    """Read a JSON config from ``path``, else from ``$LINEA_CONFIG``, else defaults."""
    if path is None:
        path = os.environ.get(ENV_VAR) or None
    if path is None:
        return Config()
    try:
        text = Path(path).read_text(encoding="utf-8")
    except FileNotFoundError:
        raise ConfigError(f"config file not found: {path}") from None
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: invalid JSON ({exc.msg})") from exc
    return Config.from_dict(data)
