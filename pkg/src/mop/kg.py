"""Knowledge graph ingestion, token vocabulary, and triple serialization.

A graph is a multiset of (head, relation, tail) integer triples over
entity and relation vocabularies that keep their textual surface forms.
Triples are directed and duplicates are retained: they count toward
training frequency.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import ConfigError, DataError, ParseError

logger = logging.getLogger(__name__)

# Reserved token ids. Specials always occupy ids 0-3 of a vocabulary.
CLS_ID = 0
SEP_ID = 1
PAD_ID = 2
UNK_ID = 3
SPECIAL_TOKENS = ("[CLS]", "[SEP]", "[PAD]", "[UNK]")


def normalize_surface(raw: str) -> str:
    """Trim, collapse internal whitespace runs to single spaces, lowercase."""
    out = " ".join(raw.split()).lower()
    if not out:
        raise DataError(f"surface form {raw!r} is empty after normalization")
    return out


@dataclass(frozen=True)
class EntityRecord:
    id: int
    surface: str


@dataclass(frozen=True)
class RelationRecord:
    id: int
    surface: str


class KnowledgeGraph:
    """Entities, relations, and a directed triple multiset.

    Immutable after construction; safe to share across worker threads.
    """

    def __init__(
        self,
        entity_surfaces: list[str],
        relation_surfaces: list[str],
        triples: np.ndarray,
    ):
        self.entities = [EntityRecord(i, s) for i, s in enumerate(entity_surfaces)]
        self.relations = [RelationRecord(i, s) for i, s in enumerate(relation_surfaces)]
        self.entity_index = {s: i for i, s in enumerate(entity_surfaces)}
        self.relation_index = {s: i for i, s in enumerate(relation_surfaces)}
        if len(self.entity_index) != len(entity_surfaces):
            raise DataError("duplicate entity surface forms after normalization")
        if len(self.relation_index) != len(relation_surfaces):
            raise DataError("duplicate relation surface forms after normalization")
        triples = np.asarray(triples, dtype=np.int64).reshape(-1, 3)
        n_e, n_r = len(entity_surfaces), len(relation_surfaces)
        if triples.size:
            if triples[:, [0, 2]].min() < 0 or triples[:, [0, 2]].max() >= n_e:
                raise DataError("triple references an entity id out of range")
            if triples[:, 1].min() < 0 or triples[:, 1].max() >= n_r:
                raise DataError("triple references a relation id out of range")
        self.triples = triples
        self.triples.setflags(write=False)

    @property
    def num_entities(self) -> int:
        return len(self.entities)

    @property
    def num_relations(self) -> int:
        return len(self.relations)

    @property
    def num_triples(self) -> int:
        return self.triples.shape[0]

    def stats(self) -> dict[str, int]:
        return {
            "entities": self.num_entities,
            "relations": self.num_relations,
            "triples": self.num_triples,
        }

    def entity_surface(self, entity_id: int) -> str:
        return self.entities[entity_id].surface

    def relation_surface(self, relation_id: int) -> str:
        return self.relations[relation_id].surface


def load_triples(path: str | Path, format: str = "tsv") -> KnowledgeGraph:
    """Load a TSV triple file: ``head<TAB>relation<TAB>tail``, one per line.

    Lines starting with ``#`` are comments, blank lines are skipped.
    Duplicate triples are kept as distinct multiset members; entity and
    relation vocabularies are deduplicated after surface normalization.
    """
    if format != "tsv":
        raise ConfigError(f"unsupported triple file format {format!r}")
    path = Path(path)
    if not path.exists():
        raise DataError(f"triple file not found: {path}")

    entity_ids: dict[str, int] = {}
    relation_ids: dict[str, int] = {}
    triples: list[tuple[int, int, int]] = []

    def intern(table: dict[str, int], surface: str) -> int:
        if surface not in table:
            table[surface] = len(table)
        return table[surface]

    with path.open("r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            stripped = line.strip()
            if not stripped or stripped.startswith("#"):
                continue
            fields = line.rstrip("\n").split("\t")
            if len(fields) != 3:
                raise ParseError(
                    f"expected 3 tab-separated fields, got {len(fields)}", lineno
                )
            try:
                h = intern(entity_ids, normalize_surface(fields[0]))
                r = intern(relation_ids, normalize_surface(fields[1]))
                t = intern(entity_ids, normalize_surface(fields[2]))
            except DataError as exc:
                raise ParseError(str(exc), lineno) from exc
            triples.append((h, r, t))

    if not triples:
        raise DataError(f"no triples found in {path}")

    kg = KnowledgeGraph(
        list(entity_ids), list(relation_ids), np.array(triples, dtype=np.int64)
    )
    logger.info(
        "loaded %s: %d entities, %d relations, %d triples",
        path, kg.num_entities, kg.num_relations, kg.num_triples,
    )
    return kg


def save_triples(kg: KnowledgeGraph, path: str | Path) -> None:
    """Write the graph back out in the TSV wire format."""
    path = Path(path)
    with path.open("w", encoding="utf-8") as fh:
        for h, r, t in kg.triples:
            fh.write(
                f"{kg.entity_surface(h)}\t{kg.relation_surface(r)}\t{kg.entity_surface(t)}\n"
            )


class TokenVocabulary:
    """Whitespace word-level token vocabulary with reserved specials at 0-3.

    Built from the entity and relation surface forms of a graph; lookups of
    unseen tokens fall back to UNK.
    """

    def __init__(self, tokens: list[str]):
        self.id_to_token = list(SPECIAL_TOKENS) + tokens
        self.token_to_id = {t: i for i, t in enumerate(self.id_to_token)}
        if len(self.token_to_id) != len(self.id_to_token):
            raise DataError("duplicate tokens in vocabulary")

    @classmethod
    def from_graph(cls, kg: KnowledgeGraph) -> "TokenVocabulary":
        seen: set[str] = set()
        for rec in kg.entities:
            seen.update(rec.surface.split())
        for rec in kg.relations:
            seen.update(rec.surface.split())
        seen.difference_update(SPECIAL_TOKENS)
        return cls(sorted(seen))

    def __len__(self) -> int:
        return len(self.id_to_token)

    def lookup(self, token: str) -> int:
        return self.token_to_id.get(token, UNK_ID)

    def encode_words(self, surface: str) -> list[int]:
        return [self.lookup(tok) for tok in surface.split()]

    def save(self, path: str | Path) -> None:
        """One token per line; the line number is the id, specials first."""
        with Path(path).open("w", encoding="utf-8") as fh:
            for token in self.id_to_token:
                fh.write(token + "\n")

    @classmethod
    def load(cls, path: str | Path) -> "TokenVocabulary":
        with Path(path).open("r", encoding="utf-8") as fh:
            tokens = [line.rstrip("\n") for line in fh]
        if tuple(tokens[:4]) != SPECIAL_TOKENS:
            raise DataError(f"vocabulary file {path} does not start with the specials")
        return cls(tokens[4:])


def serialize_triple(
    kg: KnowledgeGraph,
    vocab: TokenVocabulary,
    triple_index: int,
    max_len: int,
) -> np.ndarray:
    """Token ids for ``[CLS] head [SEP] relation [SEP]``, padded to max_len.

    The tail surface is deliberately excluded: it is the prediction target.
    Sequences longer than max_len are truncated; shorter ones are padded
    with PAD on the right.
    """
    if max_len < 4:
        raise ConfigError(f"max_len must be >= 4, got {max_len}")
    if not 0 <= triple_index < kg.num_triples:
        raise ConfigError(f"triple_index {triple_index} out of range")
    h, r, _ = kg.triples[triple_index]
    ids = [CLS_ID]
    ids.extend(vocab.encode_words(kg.entity_surface(int(h))))
    ids.append(SEP_ID)
    ids.extend(vocab.encode_words(kg.relation_surface(int(r))))
    ids.append(SEP_ID)
    ids = ids[:max_len]
    ids.extend([PAD_ID] * (max_len - len(ids)))
    return np.array(ids, dtype=np.int64)


def serialize_all(kg: KnowledgeGraph, vocab: TokenVocabulary, max_len: int) -> np.ndarray:
    """Serialize every triple; returns an (num_triples, max_len) id matrix."""
    return np.stack(
        [serialize_triple(kg, vocab, i, max_len) for i in range(kg.num_triples)]
    )


def generate_synthetic_kg(
    num_clusters: int,
    entities_per_cluster: int,
    intra_edge_prob: float,
    inter_edge_prob: float,
    num_relations: int,
    seed: int,
) -> KnowledgeGraph:
    """Planted-partition graph over ``num_clusters * entities_per_cluster`` entities.

    Every ordered pair (h, t), h != t, independently receives one triple with
    probability intra_edge_prob when both endpoints share a planted cluster
    and inter_edge_prob otherwise; relation ids are uniform. Entity i belongs
    to cluster ``i // entities_per_cluster``. Bit-deterministic per seed.
    """
    if num_clusters < 1 or entities_per_cluster < 1:
        raise ConfigError("num_clusters and entities_per_cluster must be >= 1")
    if num_relations < 1:
        raise ConfigError("num_relations must be >= 1")
    for name, p in (("intra_edge_prob", intra_edge_prob), ("inter_edge_prob", inter_edge_prob)):
        if not 0.0 <= p <= 1.0:
            raise ConfigError(f"{name} must be in [0, 1], got {p}")
    if not intra_edge_prob > inter_edge_prob:
        raise ConfigError("intra_edge_prob must exceed inter_edge_prob")

    n = num_clusters * entities_per_cluster
    rng = np.random.default_rng(seed)
    cluster = np.arange(n) // entities_per_cluster

    heads: list[np.ndarray] = []
    tails: list[np.ndarray] = []
    # Row-chunked Bernoulli sampling keeps memory flat on larger graphs while
    # staying bit-deterministic (fixed chunk size, fixed draw order).
    chunk = 512
    for start in range(0, n, chunk):
        stop = min(start + chunk, n)
        probs = np.where(
            cluster[start:stop, None] == cluster[None, :],
            intra_edge_prob,
            inter_edge_prob,
        )
        draws = rng.random((stop - start, n))
        hit = draws < probs
        rows = np.arange(start, stop)
        hit[rows - start, rows] = False  # no self-loops
        hh, tt = np.nonzero(hit)
        heads.append(hh + start)
        tails.append(tt)

    h = np.concatenate(heads)
    t = np.concatenate(tails)
    r = rng.integers(0, num_relations, size=h.shape[0])
    triples = np.stack([h, r, t], axis=1).astype(np.int64)
    if triples.shape[0] == 0:
        raise DataError("synthetic generation produced an empty graph")

    entity_surfaces = [f"e{i}" for i in range(n)]
    relation_surfaces = [f"r{j}" for j in range(num_relations)]
    return KnowledgeGraph(entity_surfaces, relation_surfaces, triples)


def planted_clusters(num_clusters: int, entities_per_cluster: int) -> np.ndarray:
    """Cluster label per entity id for a synthetic graph's construction."""
    return np.arange(num_clusters * entities_per_cluster) // entities_per_cluster
