"""On-disk formats for assignments and metrics rows."""

from __future__ import annotations

from pathlib import Path

import numpy as np

from ..errors import DataError, ParseError
from ..kg import KnowledgeGraph
from .metrics import PartitionMetrics
from .multilevel import PartitionAssignment

METRICS_COLUMNS = ("k", "seed", "shuffle_ratio", "retained", "retained_frac", "edge_cut", "balance")


def save_assignment(
    a: PartitionAssignment, g: KnowledgeGraph, path: str | Path, seed: int
) -> None:
    """Header ``k=<k> n=<n> epsilon=<eps> seed=<seed>`` then surface<TAB>part lines."""
    path = Path(path)
    with path.open("w", encoding="utf-8") as fh:
        fh.write(f"k={a.k} n={a.n} epsilon={a.epsilon!r} seed={seed}\n")
        for entity_id in range(a.n):
            fh.write(f"{g.entity_surface(entity_id)}\t{int(a.part[entity_id])}\n")


def load_assignment(path: str | Path, g: KnowledgeGraph) -> tuple[PartitionAssignment, int]:
    """Read an assignment file back against the graph it was written for."""
    path = Path(path)
    if not path.exists():
        raise DataError(f"assignment file not found: {path}")
    with path.open("r", encoding="utf-8") as fh:
        header = fh.readline().strip()
        try:
            fields = dict(item.split("=", 1) for item in header.split())
            k = int(fields["k"])
            n = int(fields["n"])
            epsilon = float(fields["epsilon"])
            seed = int(fields["seed"])
        except (KeyError, ValueError) as exc:
            raise ParseError(f"bad assignment header {header!r}", 1) from exc
        if n != g.num_entities:
            raise DataError(
                f"assignment is for {n} entities, graph has {g.num_entities}"
            )
        part = np.full(n, -1, dtype=np.int64)
        for lineno, line in enumerate(fh, start=2):
            if not line.strip():
                continue
            try:
                surface, pid = line.rstrip("\n").split("\t")
                part[g.entity_index[surface]] = int(pid)
            except (ValueError, KeyError) as exc:
                raise ParseError(f"bad assignment line {line!r}", lineno) from exc
    if (part < 0).any():
        raise DataError(f"assignment file {path} does not cover every entity")
    return PartitionAssignment(part, k, epsilon), seed


def metrics_csv_header() -> str:
    return ",".join(METRICS_COLUMNS)


def metrics_csv_row(
    m: PartitionMetrics, k: int, seed: int, shuffle_ratio: float
) -> str:
    return ",".join(
        [
            str(k),
            str(seed),
            repr(float(shuffle_ratio)),
            str(m.retained_triples),
            repr(float(m.retained_fraction)),
            str(m.edge_cut),
            repr(float(m.balance)),
        ]
    )
