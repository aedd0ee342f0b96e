"""Multilevel balanced k-way partitioning.

The classic three-phase scheme: heavy-edge matching coarsens the graph,
greedy graph growing partitions the coarsest level, and boundary
Kernighan-Lin/FM refinement runs while projecting the assignment back up.
Ties break toward the lowest node or part id everywhere so that a fixed
seed yields a bit-identical assignment.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..errors import BalanceInfeasibleError, ConfigError
from ..kg import KnowledgeGraph
from .graph import PartitionGraph, build_partition_graph

DEFAULT_EPSILON = 0.03
DEFAULT_REFINE_PASSES = 8


@dataclass
class PartitionAssignment:
    """Entity -> part labels for a k-way partition."""

    part: np.ndarray
    k: int
    epsilon: float

    def __post_init__(self):
        self.part = np.asarray(self.part, dtype=np.int64)

    @property
    def n(self) -> int:
        return self.part.shape[0]

    def part_sizes(self) -> np.ndarray:
        return np.bincount(self.part, minlength=self.k)

    def size_cap(self) -> float:
        return (1.0 + self.epsilon) * math.ceil(self.n / self.k)

    def is_balanced(self) -> bool:
        return bool(self.part_sizes().max() <= self.size_cap())

    def copy(self) -> "PartitionAssignment":
        return PartitionAssignment(self.part.copy(), self.k, self.epsilon)


def _weight_cap(total_weight: int, k: int, epsilon: float) -> float:
    return (1.0 + epsilon) * math.ceil(total_weight / k)


def coarsen(
    pg: PartitionGraph,
    seed: int,
    max_node_weight: int | None = None,
) -> tuple[PartitionGraph, np.ndarray]:
    """One level of heavy-edge matching.

    Nodes are visited in a seeded random order; each unmatched node pairs
    with its unmatched neighbor of maximum edge weight (ties -> lowest id).
    Matched pairs merge: node weights add, parallel edges sum, and the
    contracted edge weight moves into the merged node's internal weight.
    Returns the coarser graph and the fine->coarse node map. If no merge is
    possible (e.g. an edgeless graph) the input is returned unchanged with
    an identity map, which callers detect by the unchanged node count.
    """
    n = pg.n
    rng = np.random.default_rng(seed)
    order = rng.permutation(n)
    match = np.full(n, -1, dtype=np.int64)
    node_w = pg.node_weight

    for u in order:
        if match[u] >= 0:
            continue
        nbrs, ws = pg.neighbors(u)
        ok = match[nbrs] < 0
        if max_node_weight is not None:
            ok &= node_w[nbrs] + node_w[u] <= max_node_weight
        if ok.any():
            cand, cand_w = nbrs[ok], ws[ok]
            best = int(cand[cand_w == cand_w.max()].min())
            match[u] = best
            match[best] = u
        else:
            match[u] = u

    merges = int(np.count_nonzero(match != np.arange(n))) // 2
    if merges == 0:
        return pg, np.arange(n, dtype=np.int64)

    # Coarse ids in fine-id order: a pair takes the id slot of its lower member.
    cmap = np.full(n, -1, dtype=np.int64)
    next_id = 0
    for u in range(n):
        if cmap[u] >= 0:
            continue
        cmap[u] = next_id
        cmap[match[u]] = next_id
        next_id += 1
    cn = next_id

    coarse_nw = np.bincount(cmap, weights=node_w, minlength=cn).astype(np.int64)
    coarse_internal = np.bincount(cmap, weights=pg.internal, minlength=cn).astype(np.int64)

    src = np.repeat(np.arange(n, dtype=np.int64), np.diff(pg.indptr))
    upper = src < pg.indices
    fu, fv, fw = src[upper], pg.indices[upper], pg.weights[upper]
    cu, cv = cmap[fu], cmap[fv]
    same = cu == cv
    if same.any():
        coarse_internal += np.bincount(cu[same], weights=fw[same], minlength=cn).astype(np.int64)
    clo = np.minimum(cu[~same], cv[~same])
    chi = np.maximum(cu[~same], cv[~same])
    if clo.size:
        code = clo * np.int64(cn) + chi
        uniq, inv = np.unique(code, return_inverse=True)
        w = np.bincount(inv, weights=fw[~same]).astype(np.int64)
        coarse = PartitionGraph.from_edge_list(
            cn, uniq // cn, uniq % cn, w,
            node_weight=coarse_nw, internal=coarse_internal,
        )
    else:
        coarse = PartitionGraph(
            np.zeros(cn + 1, dtype=np.int64),
            np.empty(0, dtype=np.int64),
            np.empty(0, dtype=np.int64),
            node_weight=coarse_nw,
            internal=coarse_internal,
        )
    return coarse, cmap


def _connectivity(pg: PartitionGraph, part: np.ndarray, k: int) -> np.ndarray:
    """(n, k) matrix of edge weight from each node into each part."""
    conn = np.zeros((pg.n, k), dtype=np.int64)
    if pg.indices.size:
        src = np.repeat(np.arange(pg.n, dtype=np.int64), np.diff(pg.indptr))
        np.add.at(conn, (src, part[pg.indices]), pg.weights)
    return conn


def _edge_cut(pg: PartitionGraph, part: np.ndarray) -> int:
    if not pg.indices.size:
        return 0
    src = np.repeat(np.arange(pg.n, dtype=np.int64), np.diff(pg.indptr))
    cut2 = pg.weights[part[src] != part[pg.indices]].sum()
    return int(cut2) // 2


def initial_partition(
    pg: PartitionGraph, k: int, epsilon: float, seed: int
) -> PartitionAssignment:
    """Greedy graph growing on the coarsest graph.

    k-1 regions grow from seeded random start nodes, each absorbing the
    unassigned node with the highest connectivity to the region (ties ->
    lowest id; zero-connectivity nodes are eligible, which also covers
    disconnected graphs) until the region reaches its weight target. The
    remainder forms the last part, then a repair pass restores the balance
    cap if growing overshot it.
    """
    n = pg.n
    if k > n:
        raise ConfigError(f"k={k} exceeds node count {n}")
    if k < 1:
        raise ConfigError("k must be >= 1")
    part = np.full(n, -1, dtype=np.int64)
    if k == 1:
        part[:] = 0
        return PartitionAssignment(part, 1, epsilon)

    rng = np.random.default_rng(seed)
    node_w = pg.node_weight
    total_w = pg.total_node_weight()
    remaining_w = total_w
    unassigned_count = n
    conn = np.zeros(n, dtype=np.int64)

    for p in range(k - 1):
        parts_left = k - p
        target = remaining_w // parts_left
        conn[:] = 0
        cur = int(rng.choice(np.flatnonzero(part < 0)))
        region_w = 0
        while True:
            part[cur] = p
            region_w += int(node_w[cur])
            remaining_w -= int(node_w[cur])
            unassigned_count -= 1
            if region_w >= target:
                break
            if unassigned_count <= parts_left - 1:
                break  # keep one node for each remaining part
            nbrs, ws = pg.neighbors(cur)
            conn[nbrs] += ws
            masked = np.where(part < 0, conn, np.int64(-1))
            cur = int(np.argmax(masked))

    part[part < 0] = k - 1
    part = _rebalance(pg, part, k, epsilon, strict=True)
    return PartitionAssignment(part, k, epsilon)


def _rebalance(
    pg: PartitionGraph, part: np.ndarray, k: int, epsilon: float, strict: bool
) -> np.ndarray:
    """Move nodes out of over-cap parts, preferring cut-friendly moves.

    Unlike refinement this may increase the edge cut; it only runs when the
    balance cap is violated. With strict=True a residual violation raises
    BalanceInfeasibleError (always satisfiable when node weights are 1).
    """
    part = part.copy()
    node_w = pg.node_weight
    cap = _weight_cap(pg.total_node_weight(), k, epsilon)
    pw = np.bincount(part, weights=node_w, minlength=k)
    if pw.max() <= cap:
        return part
    conn = _connectivity(pg, part, k)
    pcount = np.bincount(part, minlength=k)

    while pw.max() > cap:
        src_part = int(np.argmax(pw))
        members = np.flatnonzero(part == src_part)
        if members.size <= 1:
            if strict:
                raise BalanceInfeasibleError(
                    f"single node heavier than balance cap {cap:.1f}"
                )
            break
        best_node, best_dest, best_score = -1, -1, None
        room = cap - pw  # weight each part can still take
        for u in members:
            dests = np.flatnonzero(room >= node_w[u])
            dests = dests[dests != src_part]
            if dests.size == 0:
                continue
            scores = conn[u, dests] - conn[u, src_part]
            j = int(np.argmax(scores))
            if best_score is None or scores[j] > best_score:
                best_score = int(scores[j])
                best_node, best_dest = int(u), int(dests[j])
        if best_node < 0:
            if strict:
                raise BalanceInfeasibleError(
                    f"cannot satisfy balance cap {cap:.1f} with k={k}"
                )
            break
        nbrs, ws = pg.neighbors(best_node)
        conn[nbrs, src_part] -= ws
        conn[nbrs, best_dest] += ws
        pw[src_part] -= node_w[best_node]
        pw[best_dest] += node_w[best_node]
        pcount[src_part] -= 1
        pcount[best_dest] += 1
        part[best_node] = best_dest
    return part


def _refine_inplace(
    pg: PartitionGraph,
    part: np.ndarray,
    k: int,
    epsilon: float,
    max_passes: int,
) -> np.ndarray:
    """Greedy boundary moves with recomputed gains; cut is non-increasing."""
    part = part.copy()
    if k == 1 or not pg.indices.size:
        return part
    n = pg.n
    node_w = pg.node_weight
    cap = _weight_cap(pg.total_node_weight(), k, epsilon)
    conn = _connectivity(pg, part, k)
    pw = np.bincount(part, weights=node_w, minlength=k)
    pcount = np.bincount(part, minlength=k)
    rows = np.arange(n)

    for _ in range(max_passes):
        moved = 0
        while True:
            ext = conn.astype(np.float64)
            ext[rows, part] = -1.0
            best_other = np.argmax(ext, axis=1)  # first max -> lowest part id
            gains = ext[rows, best_other] - conn[rows, part]
            feasible = (
                (gains > 0)
                & (pw[best_other] + node_w <= cap)
                & (pcount[part] >= 2)
            )
            if not feasible.any():
                break
            scores = np.where(feasible, gains, -np.inf)
            u = int(np.argmax(scores))  # ties -> lowest node id
            dest = int(best_other[u])
            src = int(part[u])
            nbrs, ws = pg.neighbors(u)
            conn[nbrs, src] -= ws
            conn[nbrs, dest] += ws
            pw[src] -= node_w[u]
            pw[dest] += node_w[u]
            pcount[src] -= 1
            pcount[dest] += 1
            part[u] = dest
            moved += 1
        if moved == 0:
            break
    return part


def refine(
    pg: PartitionGraph,
    a: PartitionAssignment,
    max_passes: int = DEFAULT_REFINE_PASSES,
) -> PartitionAssignment:
    """Boundary FM-style refinement; preserves balance, never raises the cut."""
    if a.part.shape[0] != pg.n:
        raise ConfigError("assignment length does not match graph")
    part = _refine_inplace(pg, a.part, a.k, a.epsilon, max_passes)
    return PartitionAssignment(part, a.k, a.epsilon)


def partition(
    g: KnowledgeGraph,
    k: int,
    epsilon: float = DEFAULT_EPSILON,
    seed: int = 0,
    max_passes: int = DEFAULT_REFINE_PASSES,
) -> PartitionAssignment:
    """Full multilevel pipeline over a knowledge graph's entity set.

    Coarsens with heavy-edge matching until max(40k, 200) nodes or no
    progress, partitions the coarsest graph by greedy growing, then
    alternates projection, rebalancing, and refinement back to the original
    graph. Deterministic per (g, k, epsilon, seed).
    """
    if k < 1:
        raise ConfigError("k must be >= 1")
    if epsilon < 0:
        raise ConfigError("epsilon must be >= 0")
    pg0 = build_partition_graph(g)
    if k > pg0.n:
        raise ConfigError(f"k={k} exceeds entity count {pg0.n}")

    rng = np.random.default_rng(seed)
    coarsen_to = max(40 * k, 200)
    max_vwgt = max(1, math.ceil(1.5 * pg0.total_node_weight() / coarsen_to))

    levels: list[PartitionGraph] = [pg0]
    maps: list[np.ndarray] = []
    while levels[-1].n > coarsen_to:
        cg, cmap = coarsen(
            levels[-1], seed=int(rng.integers(2**31)), max_node_weight=max_vwgt
        )
        if cg.n == levels[-1].n:
            break
        levels.append(cg)
        maps.append(cmap)

    init = initial_partition(levels[-1], k, epsilon, seed=int(rng.integers(2**31)))
    part = init.part
    for i in reversed(range(len(levels))):
        if i < len(levels) - 1:
            part = part[maps[i]]
        part = _rebalance(levels[i], part, k, epsilon, strict=(i == 0))
        part = _refine_inplace(levels[i], part, k, epsilon, max_passes)
    return PartitionAssignment(part, k, epsilon)
