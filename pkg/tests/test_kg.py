import numpy as np
import pytest

from mop.errors import ConfigError, DataError, ParseError
from mop.kg import (
    CLS_ID,
    PAD_ID,
    SEP_ID,
    UNK_ID,
    KnowledgeGraph,
    TokenVocabulary,
    generate_synthetic_kg,
    load_triples,
    normalize_surface,
    planted_clusters,
    save_triples,
    serialize_triple,
)


def write_tsv(tmp_path, lines, name="kg.tsv"):
    path = tmp_path / name
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return path


# ---------------------------------------------------------------- loading


def test_load_three_lines(tmp_path):
    path = write_tsv(tmp_path, ["A\tr\tB", "B\tr\tC", "A\ts\tC"])
    kg = load_triples(path)
    assert kg.num_entities == 3
    assert kg.num_relations == 2
    assert kg.num_triples == 3


def test_duplicate_lines_kept_as_multiset(tmp_path):
    path = write_tsv(tmp_path, ["A\tr\tB", "A\tr\tB"])
    kg = load_triples(path)
    assert kg.num_triples == 2
    assert kg.num_entities == 2
    assert kg.num_relations == 1


def test_comments_and_blank_lines_skipped(tmp_path):
    path = write_tsv(tmp_path, ["# a comment", "", "A\tr\tB"])
    kg = load_triples(path)
    assert kg.num_triples == 1


def test_malformed_line_reports_line_number(tmp_path):
    path = write_tsv(tmp_path, ["A\tr\tB", "broken line"])
    with pytest.raises(ParseError, match="line 2"):
        load_triples(path)


def test_empty_file_rejected(tmp_path):
    path = tmp_path / "empty.tsv"
    path.write_text("# only a comment\n", encoding="utf-8")
    with pytest.raises(DataError):
        load_triples(path)


def test_missing_file_rejected(tmp_path):
    with pytest.raises(DataError):
        load_triples(tmp_path / "nope.tsv")


def test_round_trip_preserves_triple_multiset(tmp_path):
    seed_kg = generate_synthetic_kg(3, 8, 0.3, 0.02, 3, seed=11)
    first = tmp_path / "first.tsv"
    save_triples(seed_kg, first)
    kg = load_triples(first)  # round-trip property is about loaded graphs
    out = tmp_path / "out.tsv"
    save_triples(kg, out)
    kg2 = load_triples(out)
    assert kg2.stats() == kg.stats()

    def surface_multiset(g):
        return sorted(
            (g.entity_surface(int(h)), g.relation_surface(int(r)), g.entity_surface(int(t)))
            for h, r, t in g.triples
        )

    assert surface_multiset(kg2) == surface_multiset(kg)


# ---------------------------------------------------------------- normalization


@pytest.mark.parametrize(
    "raw,expected",
    [
        ("  Has   Finding Site ", "has finding site"),
        ("fever", "fever"),
        ("SARS-CoV-2", "sars-cov-2"),
    ],
)
def test_normalize_surface(raw, expected):
    assert normalize_surface(raw) == expected


def test_normalize_empty_rejected():
    with pytest.raises(DataError):
        normalize_surface("   ")


# ---------------------------------------------------------------- serialization


@pytest.fixture
def tiny_kg():
    return KnowledgeGraph(
        ["fever", "head"],
        ["has finding site"],
        np.array([[0, 0, 1]], dtype=np.int64),
    )


def test_serialize_layout(tiny_kg):
    vocab = TokenVocabulary.from_graph(tiny_kg)
    ids = serialize_triple(tiny_kg, vocab, 0, max_len=8)
    expected = [
        CLS_ID,
        vocab.lookup("fever"),
        SEP_ID,
        vocab.lookup("has"),
        vocab.lookup("finding"),
        vocab.lookup("site"),
        SEP_ID,
        PAD_ID,
    ]
    assert ids.tolist() == expected


def test_serialize_truncates_to_max_len(tiny_kg):
    vocab = TokenVocabulary.from_graph(tiny_kg)
    ids = serialize_triple(tiny_kg, vocab, 0, max_len=5)
    assert ids.shape == (5,)
    assert ids[0] == CLS_ID
    # cut off mid-relation: the closing SEP is gone
    assert ids.tolist() == [CLS_ID, vocab.lookup("fever"), SEP_ID, vocab.lookup("has"), vocab.lookup("finding")]


def test_serialize_excludes_tail_tokens():
    kg = KnowledgeGraph(
        ["alpha", "omega"], ["rel"], np.array([[0, 0, 1]], dtype=np.int64)
    )
    vocab = TokenVocabulary.from_graph(kg)
    ids = serialize_triple(kg, vocab, 0, max_len=10)
    assert vocab.lookup("omega") not in ids.tolist()


def test_serialize_every_triple_starts_with_cls_and_has_exact_length():
    kg = generate_synthetic_kg(2, 10, 0.4, 0.05, 3, seed=5)
    vocab = TokenVocabulary.from_graph(kg)
    for i in range(min(kg.num_triples, 50)):
        ids = serialize_triple(kg, vocab, i, max_len=6)
        assert ids.shape == (6,)
        assert ids[0] == CLS_ID


def test_serialize_rejects_short_max_len(tiny_kg):
    vocab = TokenVocabulary.from_graph(tiny_kg)
    with pytest.raises(ConfigError):
        serialize_triple(tiny_kg, vocab, 0, max_len=3)


# ---------------------------------------------------------------- vocabulary


def test_vocabulary_specials_and_unk(tiny_kg):
    vocab = TokenVocabulary.from_graph(tiny_kg)
    assert vocab.id_to_token[:4] == ["[CLS]", "[SEP]", "[PAD]", "[UNK]"]
    assert vocab.lookup("definitely-not-a-token") == UNK_ID
    for token in ("fever", "head", "has", "finding", "site"):
        assert vocab.lookup(token) > UNK_ID


def test_vocabulary_dump_round_trip(tmp_path, tiny_kg):
    vocab = TokenVocabulary.from_graph(tiny_kg)
    path = tmp_path / "vocab.txt"
    vocab.save(path)
    lines = path.read_text(encoding="utf-8").splitlines()
    assert lines[:4] == ["[CLS]", "[SEP]", "[PAD]", "[UNK]"]
    assert lines == vocab.id_to_token
    loaded = TokenVocabulary.load(path)
    assert loaded.id_to_token == vocab.id_to_token


# ---------------------------------------------------------------- synthetic KGs


def test_single_cluster_full_density_is_complete_digraph():
    kg = generate_synthetic_kg(1, 10, 1.0, 0.0, 1, seed=123)
    assert kg.num_triples == 10 * 9


def test_intra_count_matches_binomial_oracle():
    # oracle: intra triple count ~ Binomial(C*m*(m-1), p_intra)
    clusters, per, p = 4, 50, 0.2
    kg = generate_synthetic_kg(clusters, per, p, 0.005, 5, seed=7)
    labels = planted_clusters(clusters, per)
    intra = int((labels[kg.triples[:, 0]] == labels[kg.triples[:, 2]]).sum())
    trials = clusters * per * (per - 1)
    mean = trials * p
    sigma = np.sqrt(trials * p * (1 - p))
    assert mean == 1960.0
    assert abs(intra - mean) <= 3 * sigma


def test_zero_inter_prob_keeps_triples_inside_clusters():
    kg = generate_synthetic_kg(3, 12, 0.5, 0.0, 2, seed=3)
    labels = planted_clusters(3, 12)
    assert (labels[kg.triples[:, 0]] == labels[kg.triples[:, 2]]).all()


def test_synthetic_generation_is_bit_deterministic():
    a = generate_synthetic_kg(4, 20, 0.2, 0.01, 3, seed=99)
    b = generate_synthetic_kg(4, 20, 0.2, 0.01, 3, seed=99)
    assert a.triples.tobytes() == b.triples.tobytes()
    assert [e.surface for e in a.entities] == [e.surface for e in b.entities]


def test_synthetic_parameter_validation():
    with pytest.raises(ConfigError):
        generate_synthetic_kg(2, 10, 1.2, 0.0, 1, seed=0)
    with pytest.raises(ConfigError):
        generate_synthetic_kg(2, 10, 0.1, 0.2, 1, seed=0)
