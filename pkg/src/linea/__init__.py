"""Linear building pattern recognition with a spatial knowledge graph.

Building footprints are linked by a road-constrained relative neighbourhood
graph, annotated with similarity and linear-arrangement relations, and
grouped into linear patterns by rule scripts run on an embedded property
graph engine. A traversal baseline and a benchmark harness sit alongside.
"""

from __future__ import annotations

from .baseline import baseline_recognize
from .config import Config, load_config
from .estimator import LinearPatternRecognizer
from .exceptions import (
    ConfigError,
    DegeneratePolygon,
    EmptyDataset,
    FormatError,
    InvalidSpec,
    LineaError,
    ParseError,
)
from .geometry import Polygon, Polyline
from .pipeline import KnowledgeGraph, LinearPattern, TriplePattern, build_kg, recognize_linear_patterns
from .proximity import BuildingRecord, ProximityEdge, make_buildings, rng_build
from .relations import Thresholds, linear_triple, similarity

__version__ = "0.1.0"

__all__ = [
    "BuildingRecord",
    "Config",
    "ConfigError",
    "DegeneratePolygon",
    "EmptyDataset",
    "FormatError",
    "InvalidSpec",
    "KnowledgeGraph",
    "LineaError",
    "LinearPattern",
    "LinearPatternRecognizer",
    "ParseError",
    "Polygon",
    "Polyline",
    "ProximityEdge",
    "Thresholds",
    "TriplePattern",
    "baseline_recognize",
    "build_kg",
    "linear_triple",
    "load_config",
    "make_buildings",
    "recognize_linear_patterns",
    "rng_build",
    "similarity",
]
