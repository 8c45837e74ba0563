"""Shipped rule scripts and threshold substitution.

Scripts are templates: ``${eta1}`` and friends are replaced by the numeric
threshold before parsing, since the grammar has no parameters.
"""

from __future__ import annotations

from importlib import resources
from pathlib import Path
from string import Template
from typing import Mapping, Union

from ..rule_engine import Script, parse_cached

RECOGNITION = "linear_pattern"
RECOGNITION_LISTING = "linear_pattern_listing"
DERIVATION = "derive_relations"
DERIVATION_LISTING = "derive_relations_listing"


def rule_text(name: str) -> str:
    """Raw template text of a shipped script, by stem name."""
    return resources.files(__name__).joinpath(f"{name}.cypher").read_text(encoding="utf-8")


def substitute(template: str, thresholds: Union[Mapping[str, float], object]) -> str:
    values = thresholds if isinstance(thresholds, Mapping) else thresholds.as_dict()
    return Template(template).substitute({k: repr(float(v)) for k, v in values.items()})


def load_script(source: Union[str, Path], thresholds) -> Script:
    """Parse a shipped script (by stem name) or a script file, thresholds filled in."""
    if isinstance(source, Path) or str(source).endswith(".cypher"):
        text = Path(source).read_text(encoding="utf-8")
    else:
        text = rule_text(str(source))
    return parse_cached(substitute(text, thresholds))
