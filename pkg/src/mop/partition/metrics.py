"""Partition quality metrics, the controlled shuffle, and subgraph extraction."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ..errors import ConfigError
from ..kg import KnowledgeGraph
from .multilevel import PartitionAssignment


@dataclass
class PartitionMetrics:
    retained_triples: int
    retained_fraction: float
    edge_cut: int
    balance: float
    per_part_entity_counts: np.ndarray
    per_part_triple_counts: np.ndarray


def compute_metrics(g: KnowledgeGraph, a: PartitionAssignment) -> PartitionMetrics:
    """Retention, cut, and balance of an assignment over a graph.

    A triple is retained when head and tail land in the same part, so
    self-loop triples always count as retained. Edge cut equals the total
    number of severed triples, the dual of retention.
    """
    if a.part.shape[0] != g.num_entities:
        raise ConfigError(
            f"assignment covers {a.part.shape[0]} entities, graph has {g.num_entities}"
        )
    hp = a.part[g.triples[:, 0]]
    tp = a.part[g.triples[:, 2]]
    retained_mask = hp == tp
    retained = int(retained_mask.sum())
    total = g.num_triples
    edge_cut = total - retained
    sizes = a.part_sizes()
    balance = float(sizes.max()) / math.ceil(g.num_entities / a.k)
    per_part_triples = np.bincount(hp[retained_mask], minlength=a.k)
    return PartitionMetrics(
        retained_triples=retained,
        retained_fraction=retained / total,
        edge_cut=edge_cut,
        balance=balance,
        per_part_entity_counts=sizes,
        per_part_triple_counts=per_part_triples,
    )


def shuffle_assignment(
    a: PartitionAssignment, ratio: float, seed: int
) -> PartitionAssignment:
    """Permute the part labels of a uniformly chosen fraction of entities.

    floor(ratio * n) entities are drawn without replacement and their labels
    are rearranged by a uniform permutation of the selected slots, so every
    per-part entity count is preserved exactly. Deterministic per seed.
    """
    if not 0.0 <= ratio <= 1.0:
        raise ConfigError(f"shuffle ratio must be in [0, 1], got {ratio}")
    out = a.copy()
    m = int(math.floor(ratio * a.n))
    if m == 0:
        return out
    rng = np.random.default_rng(seed)
    chosen = rng.choice(a.n, size=m, replace=False)
    perm = rng.permutation(m)
    out.part[chosen] = a.part[chosen][perm]
    return out


@dataclass
class SubGraph:
    """One partition's local view: entities, intra-part triples, tail vocab.

    Triples keep global ids; the local maps translate to dense part-local
    indices. ``tail_vocab`` lists the distinct tail entities (global ids,
    ascending), and ``tail_class`` maps a global tail id to its position in
    that list, which is the entity-prediction label space for this part.
    """

    part_id: int
    entities: np.ndarray
    triples: np.ndarray
    local_index: dict[int, int] = field(repr=False)
    tail_vocab: np.ndarray = field(default=None)
    tail_class: dict[int, int] = field(default=None, repr=False)

    @property
    def num_triples(self) -> int:
        return self.triples.shape[0]

    def tail_labels(self) -> np.ndarray:
        """Tail-class label per local triple."""
        return np.array(
            [self.tail_class[int(t)] for t in self.triples[:, 2]], dtype=np.int64
        )


def extract_subgraphs(
    g: KnowledgeGraph, a: PartitionAssignment
) -> list[SubGraph]:
    """Split the graph into one SubGraph per part; cross-part triples drop."""
    if a.part.shape[0] != g.num_entities:
        raise ConfigError("assignment length does not match the graph")
    hp = a.part[g.triples[:, 0]]
    tp = a.part[g.triples[:, 2]]
    retained = hp == tp
    subgraphs = []
    for p in range(a.k):
        entities = np.flatnonzero(a.part == p)
        triples = g.triples[retained & (hp == p)]
        tails = np.unique(triples[:, 2]) if triples.size else np.empty(0, dtype=np.int64)
        subgraphs.append(
            SubGraph(
                part_id=p,
                entities=entities,
                triples=triples,
                local_index={int(e): i for i, e in enumerate(entities)},
                tail_vocab=tails,
                tail_class={int(t): i for i, t in enumerate(tails)},
            )
        )
    return subgraphs
