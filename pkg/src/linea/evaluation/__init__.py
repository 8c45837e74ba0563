"""Dataset statistics, precision/recall, benchmarks and synthetic data."""

from .bench import BenchReport, Dataset, benchmark, compare, e_rate, scaling_suite, write_csv
from .metrics import PRReport, jaccard, precision_recall
from .stats import DatasetStats, dataset_stats
from .synthetic import SyntheticSpec, generate_synthetic, scaling_spec

__all__ = [
    "BenchReport",
    "Dataset",
    "DatasetStats",
    "PRReport",
    "SyntheticSpec",
    "benchmark",
    "compare",
    "dataset_stats",
    "e_rate",
    "generate_synthetic",
    "jaccard",
    "precision_recall",
    "scaling_spec",
    "scaling_suite",
    "write_csv",
]
