"""Balanced k-way entity partitioning and partition-quality metrics."""

from .graph import PartitionGraph, build_partition_graph
from .multilevel import (
    PartitionAssignment,
    coarsen,
    initial_partition,
    partition,
    refine,
)
from .metrics import (
    PartitionMetrics,
    SubGraph,
    compute_metrics,
    extract_subgraphs,
    shuffle_assignment,
)
from .files import (
    load_assignment,
    save_assignment,
    metrics_csv_header,
    metrics_csv_row,
)

__all__ = [
    "PartitionGraph",
    "build_partition_graph",
    "PartitionAssignment",
    "coarsen",
    "initial_partition",
    "refine",
    "partition",
    "PartitionMetrics",
    "SubGraph",
    "compute_metrics",
    "extract_subgraphs",
    "shuffle_assignment",
    "load_assignment",
    "save_assignment",
    "metrics_csv_header",
    "metrics_csv_row",
]
