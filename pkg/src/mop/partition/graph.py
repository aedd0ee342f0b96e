"""Undirected weighted projection of a knowledge graph for partitioning."""

from __future__ import annotations

import numpy as np

from ..errors import DataError
from ..kg import KnowledgeGraph


class PartitionGraph:
    """CSR adjacency with integer edge weights and per-node weights.

    Invariants: symmetric (both directions stored), no self-loops. Node
    weights count the original entities merged into a node; ``internal``
    accumulates edge weight absorbed by coarsening contractions so that
    total weight is conserved across levels.
    """

    def __init__(
        self,
        indptr: np.ndarray,
        indices: np.ndarray,
        weights: np.ndarray,
        node_weight: np.ndarray | None = None,
        internal: np.ndarray | None = None,
    ):
        self.indptr = np.asarray(indptr, dtype=np.int64)
        self.indices = np.asarray(indices, dtype=np.int64)
        self.weights = np.asarray(weights, dtype=np.int64)
        n = self.indptr.shape[0] - 1
        self.n = n
        if node_weight is None:
            node_weight = np.ones(n, dtype=np.int64)
        self.node_weight = np.asarray(node_weight, dtype=np.int64)
        if internal is None:
            internal = np.zeros(n, dtype=np.int64)
        self.internal = np.asarray(internal, dtype=np.int64)

    @property
    def num_edges(self) -> int:
        """Number of undirected edges."""
        return self.indices.shape[0] // 2

    def total_edge_weight(self) -> int:
        """Sum of undirected edge weights (each edge counted once)."""
        return int(self.weights.sum()) // 2

    def total_node_weight(self) -> int:
        return int(self.node_weight.sum())

    def neighbors(self, u: int) -> tuple[np.ndarray, np.ndarray]:
        lo, hi = self.indptr[u], self.indptr[u + 1]
        return self.indices[lo:hi], self.weights[lo:hi]

    def degree(self, u: int) -> int:
        return int(self.indptr[u + 1] - self.indptr[u])

    @classmethod
    def from_edge_list(
        cls,
        n: int,
        u: np.ndarray,
        v: np.ndarray,
        w: np.ndarray,
        node_weight: np.ndarray | None = None,
        internal: np.ndarray | None = None,
    ) -> "PartitionGraph":
        """Build CSR from unique undirected edges (u < v), weights w."""
        src = np.concatenate([u, v])
        dst = np.concatenate([v, u])
        ww = np.concatenate([w, w])
        order = np.lexsort((dst, src))
        src, dst, ww = src[order], dst[order], ww[order]
        indptr = np.zeros(n + 1, dtype=np.int64)
        np.add.at(indptr, src + 1, 1)
        np.cumsum(indptr, out=indptr)
        return cls(indptr, dst, ww, node_weight=node_weight, internal=internal)


def build_partition_graph(g: KnowledgeGraph) -> PartitionGraph:
    """Collapse the directed triple multiset into an undirected weighted graph.

    Edge weight between a pair of entities is the number of triples between
    them in either direction. Self-loop triples contribute no edge; isolated
    entities remain as degree-0 nodes.
    """
    if g.num_triples == 0:
        raise DataError("cannot build a partition graph from an empty graph")
    n = g.num_entities
    h = g.triples[:, 0]
    t = g.triples[:, 2]
    keep = h != t
    lo = np.minimum(h[keep], t[keep])
    hi = np.maximum(h[keep], t[keep])
    if lo.size == 0:
        return PartitionGraph.from_edge_list(
            n,
            np.empty(0, dtype=np.int64),
            np.empty(0, dtype=np.int64),
            np.empty(0, dtype=np.int64),
        )
    code = lo * np.int64(n) + hi
    uniq, counts = np.unique(code, return_counts=True)
    return PartitionGraph.from_edge_list(n, uniq // n, uniq % n, counts.astype(np.int64))
