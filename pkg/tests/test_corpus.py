import json
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from helpers import bm25_oracle, independent_last_sentence, synthetic_sentences
from qanno import (
    DataError,
    QuerySpec,
    SentenceRecord,
    build_index,
    default_query,
    last_sentence,
    load_corpus,
    load_index,
    sample_questions,
    save_index,
    search,
    tokenize,
)
from qanno.corpus import dump_index, idf, stem


# -- tokenizer ----------------------------------------------------------------


def test_tokenize_basic():
    assert tokenize("Metals are SOLID at room temperatures.") == [
        "metals", "are", "solid", "at", "room", "temperatures",
    ]


def test_tokenize_empty():
    assert tokenize("") == []


def test_tokenize_splits_on_non_alphanumerics():
    assert tokenize("F=m·a") == ["f", "m", "a"]


def test_tokenize_unicode_and_underscore():
    assert tokenize("Héllo wörld") == ["héllo", "wörld"]
    assert tokenize("snake_case") == ["snake", "case"]
    assert tokenize("co2 levels rose 3x") == ["co2", "levels", "rose", "3x"]


def test_tokenize_toggles():
    assert tokenize("the cat and the hat", stopwords=True) == ["cat", "hat"]
    # the light stemmer only strips plural suffixes
    assert stem("rocks") == "rock"
    assert stem("properties") == "property"
    assert stem("glasses") == "glass"
    assert stem("gas") == "gas"


# -- index building -----------------------------------------------------------


def _records(texts):
    return [SentenceRecord(i, t) for i, t in enumerate(texts)]


def test_build_index_counts():
    idx = build_index(_records(["one two", "three four five six", "seven"]))
    assert idx.doc_count == 3


def test_avg_doc_length():
    idx = build_index(_records(["one two", "a b c d"]))
    assert idx.avg_doc_length == 3.0


def test_duplicate_sentence_id_rejected():
    records = [SentenceRecord(7, "one"), SentenceRecord(7, "two")]
    with pytest.raises(DataError, match="7"):
        build_index(records)


def test_index_invariants():
    idx = build_index(_records(["b a b", "a c", "c c c"]))
    for term, postings in idx.postings.items():
        ids = [sid for sid, _ in postings]
        assert ids == sorted(ids)
        for sid, tf in postings:
            assert sid in idx.doc_lengths
            assert tf >= 1
    assert idx.avg_doc_length == sum(idx.doc_lengths.values()) / idx.doc_count


def test_build_index_order_independent():
    records = _records(["alpha beta", "gamma delta", "epsilon"])
    shuffled = [records[2], records[0], records[1]]
    assert dump_index(build_index(records)) == dump_index(build_index(shuffled))


def test_reindex_is_byte_identical(tmp_path):
    path = tmp_path / "c.txt"
    path.write_text("the quick brown fox\n\njumps over the dog\n", encoding="utf-8")
    a = dump_index(build_index(load_corpus(path)))
    b = dump_index(build_index(load_corpus(path)))
    assert a == b


def test_load_corpus_skips_blank_lines_keeps_line_numbers(tmp_path):
    path = tmp_path / "c.txt"
    path.write_text("first\n\n  \nsecond\n", encoding="utf-8")
    records = load_corpus(path)
    assert [(r.sentence_id, r.text) for r in records] == [(0, "first"), (3, "second")]


def test_empty_sentence_rejected():
    with pytest.raises(DataError):
        SentenceRecord(0, "   ")


# -- search -------------------------------------------------------------------

FIXTURE_DOCS = [
    "the quick brown fox jumps over the lazy dog",
    "the lazy dog sleeps in the sun",
]


def test_bm25_matches_hand_computed_fixture():
    # Frozen values from a direct evaluation of the formula (k1=1.2, b=0.75)
    # outside the index code; see helpers.bm25_oracle.
    idx = build_index(_records(FIXTURE_DOCS))
    hits = search(idx, QuerySpec("lazy dog sun", top_k=10))
    assert [h.sentence_id for h in hits] == [1, 0]
    assert hits[0].score == pytest.approx(1.114796956706721, abs=1e-9)
    assert hits[1].score == pytest.approx(0.34690371887282173, abs=1e-9)

    hits = search(idx, QuerySpec("quick fox"))
    assert [h.sentence_id for h in hits] == [0]
    assert hits[0].score == pytest.approx(1.3188530138221661, abs=1e-9)


def test_bm25_matches_oracle_on_random_corpora():
    rng = random.Random(101)
    for _ in range(20):
        docs = synthetic_sentences(rng.randint(2, 30), rng, vocab_size=50, min_len=3, max_len=9)
        idx = build_index(_records(docs))
        probe = rng.choice(docs)
        query = " ".join(rng.sample(probe.split(), rng.randint(1, 3)))
        expected = bm25_oracle(docs, query)
        got = {h.sentence_id: h.score for h in search(idx, QuerySpec(query, top_k=len(docs)))}
        for i, exp in enumerate(expected):
            if exp > 0:
                assert got[i] == pytest.approx(exp, abs=1e-9)
            else:
                assert i not in got


def test_verbatim_query_is_rank_one_on_disjoint_corpus():
    docs = ["apples grow on trees", "rivers flow downhill", "magnets attract iron"]
    idx = build_index(_records(docs))
    for i, doc in enumerate(docs):
        hits = search(idx, QuerySpec(doc))
        assert hits[0].sentence_id == i


def test_absent_term_returns_empty():
    idx = build_index(_records(FIXTURE_DOCS))
    assert search(idx, QuerySpec("zebra")) == []


def test_empty_query_rejected():
    idx = build_index(_records(FIXTURE_DOCS))
    with pytest.raises(ValueError, match="empty query"):
        search(idx, QuerySpec("...!!!"))


def test_hits_share_a_term_with_query():
    rng = random.Random(7)
    docs = synthetic_sentences(40, rng, vocab_size=30, min_len=3, max_len=8)
    idx = build_index(_records(docs))
    query = " ".join(docs[0].split()[:3])
    for hit in search(idx, QuerySpec(query, top_k=40)):
        assert set(tokenize(hit.text)) & set(tokenize(query))
        assert hit.score > 0


def test_top_k_prefix_consistency():
    rng = random.Random(13)
    docs = synthetic_sentences(50, rng, vocab_size=20, min_len=4, max_len=9)
    idx = build_index(_records(docs))
    query = docs[10]
    for k in range(1, 12):
        small = search(idx, QuerySpec(query, top_k=k))
        big = search(idx, QuerySpec(query, top_k=k + 1))
        assert big[: len(small)] == small


def test_tie_break_ascending_sentence_id():
    docs = ["same words here", "same words here", "other thing entirely"]
    idx = build_index(_records(docs))
    hits = search(idx, QuerySpec("same words"))
    assert [h.sentence_id for h in hits] == [0, 1]


def test_search_is_deterministic():
    docs = synthetic_sentences(30, random.Random(3), vocab_size=25)
    idx = build_index(_records(docs))
    a = search(idx, QuerySpec(docs[5], top_k=20))
    b = search(build_index(_records(docs)), QuerySpec(docs[5], top_k=20))
    assert a == b


def test_tf_component_is_monotone_in_tf():
    # Saturation check with document and corpus statistics held fixed.
    k1, b = 1.2, 0.75
    dl, avgdl = 12, 9.0
    norm = k1 * (1 - b + b * dl / avgdl)
    values = [tf * (k1 + 1) / (tf + norm) for tf in range(1, 50)]
    assert all(later >= earlier for earlier, later in zip(values, values[1:]))


def test_single_term_score_monotone_under_duplication():
    # End to end: duplicating a query term inside one document (and
    # rebuilding) never decreases that document's single-term score.
    base = ["alpha beta gamma", "delta epsilon zeta eta", "theta iota"]
    for copies in range(1, 6):
        docs = list(base)
        docs[0] = "alpha " * copies + "beta gamma"
        idx_before = build_index(_records(base))
        idx_after = build_index(_records(docs))
        before = {h.sentence_id: h.score for h in search(idx_before, QuerySpec("alpha"))}
        after = {h.sentence_id: h.score for h in search(idx_after, QuerySpec("alpha"))}
        assert after[0] >= before[0] - 1e-12


def test_stopword_and_stemming_index_toggles():
    docs = ["the cats sat on the mats", "dogs and cats"]
    idx = build_index(_records(docs), stopwords=True, stemming=True)
    hits = search(idx, QuerySpec("cat"))
    assert {h.sentence_id for h in hits} == {0, 1}
    with pytest.raises(ValueError, match="empty query"):
        search(idx, QuerySpec("the"))  # query is analyzed with the same toggles


# -- serialization ------------------------------------------------------------


def test_index_round_trip(tmp_path):
    idx = build_index(_records(FIXTURE_DOCS))
    path = tmp_path / "fixture.idx"
    save_index(idx, path)
    loaded = load_index(path)
    assert dump_index(loaded) == dump_index(idx)
    assert search(loaded, QuerySpec("lazy dog sun")) == search(idx, QuerySpec("lazy dog sun"))


def test_index_save_is_deterministic(tmp_path):
    idx = build_index(_records(FIXTURE_DOCS))
    a, b = tmp_path / "a.idx", tmp_path / "b.idx"
    save_index(idx, a)
    save_index(idx, b)
    assert a.read_bytes() == b.read_bytes()


def test_load_index_rejects_bad_magic(tmp_path):
    path = tmp_path / "bogus.idx"
    path.write_text('{"magic": "other", "version": 1}\n', encoding="utf-8")
    with pytest.raises(DataError, match="magic"):
        load_index(path)


def test_load_index_rejects_future_version(tmp_path):
    idx = build_index(_records(FIXTURE_DOCS))
    path = tmp_path / "v.idx"
    save_index(idx, path)
    lines = path.read_text(encoding="utf-8").splitlines()
    header = json.loads(lines[0])
    header["version"] = 99
    lines[0] = json.dumps(header, sort_keys=True)
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    with pytest.raises(DataError, match="version"):
        load_index(path)


def test_load_index_rejects_truncation(tmp_path):
    idx = build_index(_records(FIXTURE_DOCS))
    path = tmp_path / "t.idx"
    save_index(idx, path)
    lines = path.read_text(encoding="utf-8").splitlines()
    path.write_text("\n".join(lines[:-1]) + "\n", encoding="utf-8")
    with pytest.raises(DataError, match="truncated"):
        load_index(path)


# -- default query rule ---------------------------------------------------------


def test_default_query_redwood_example():
    question = next(q for q in sample_questions() if q.id == "sample-energy-conversion")
    assert default_query(question, "B") == (
        "How is energy changed by the trees? They change solar energy into chemical energy."
    )


def test_default_query_single_sentence_stem(sample_by_id):
    q = sample_by_id["sample-definition"]
    assert default_query(q, "B") == "What is a worldwide increase in temperature called? global warming"


def test_default_query_unknown_choice(sample_by_id):
    with pytest.raises(DataError, match="'Z'"):
        default_query(sample_by_id["sample-definition"], "Z")


@pytest.mark.parametrize(
    "text,expected",
    [
        ("One. Two. Three?", "Three?"),
        ("Only sentence.", "Only sentence."),
        ("Ends without punctuation", "Ends without punctuation"),
        ("First part. trailing fragment", "trailing fragment"),
        ("Version 2.5 rocks. Really!", "Really!"),
        ("What happens? It breaks", "It breaks"),
    ],
)
def test_last_sentence_rules(text, expected):
    assert last_sentence(text) == expected


@given(st.text(min_size=1, max_size=120))
@settings(max_examples=200)
def test_last_sentence_matches_independent_splitter(text):
    assert last_sentence(text) == independent_last_sentence(text)


def test_idf_formula():
    idx = build_index(_records(FIXTURE_DOCS))
    import math

    # df(lazy) = 2, N = 2
    assert idf(idx, "lazy") == pytest.approx(math.log(1 + 0.5 / 2.5), abs=1e-12)
    assert idf(idx, "absent") == pytest.approx(math.log(1 + 2.5 / 0.5), abs=1e-12)
