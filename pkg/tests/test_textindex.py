import math
import random
from collections import Counter

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from convsearch.textindex import (
    DuplicatePassageError,
    InvertedIndex,
    PassageRecord,
    RetrievalParams,
    UnknownPassageError,
    analyze,
    build_index,
    lmd_score,
    load_index,
    retrieve,
    save_index,
    stem,
    tokenize,
)

# ---------------------------------------------------------------------------
# independent oracle: smoothed likelihood straight from raw token counts


def lmd_oracle(query_tokens, passage_tokens, all_passage_tokens, mu):
    collection = Counter()
    for tokens in all_passage_tokens:
        collection.update(tokens)
    total = sum(collection.values())
    tf = Counter(passage_tokens)
    dl = len(passage_tokens)
    score = 0.0
    for w in query_tokens:
        if collection[w] > 0:
            score += math.log((tf[w] + mu * collection[w] / total) / (dl + mu))
        else:
            score += math.log(mu * (1.0 / (total + 1)) / (dl + mu))
    return score


class TestTokenize:
    def test_basic(self):
        assert tokenize("The Avengers, 2012!") == ["the", "avengers", "2012"]

    def test_empty(self):
        assert tokenize("") == []

    def test_apostrophe_is_separator(self):
        assert tokenize("satellite's orbit") == ["satellite", "s", "orbit"]


class TestStem:
    # golden stems recorded from the shipped stemmer
    @pytest.mark.parametrize("token,expected", [
        ("satellites", "satellite"),
        ("orbit", "orbit"),
        ("launched", "launch"),
        ("stories", "story"),
        ("glasses", "glass"),
        ("running", "runn"),
    ])
    def test_golden(self, token, expected):
        assert stem(token) == expected

    @given(st.text(alphabet="abcdefgisy", min_size=1, max_size=12))
    def test_idempotent(self, token):
        assert stem(stem(token)) == stem(token)

    @given(st.text(alphabet="abcdefghijklmnopqrstuvwxyz0123456789",
                   min_size=1, max_size=15))
    def test_idempotent_full_alphabet(self, token):
        assert stem(stem(token)) == stem(token)


class TestBuildIndex:
    def test_two_passage_counts(self, toy_index):
        assert toy_index.total_tokens == 5
        assert toy_index.collection_frequency["banana"] == 2
        assert toy_index.passage_count == 2

    def test_empty_corpus(self):
        index = build_index([])
        assert index.passage_count == 0
        assert index.total_tokens == 0

    def test_repeated_token(self):
        index = build_index([PassageRecord("p", "a a a")])
        assert index.postings["a"] == [("p", 3)]
        assert index.doc_length["p"] == 3

    def test_duplicate_id_rejected(self):
        with pytest.raises(DuplicatePassageError) as exc:
            build_index([PassageRecord("p", "x"), PassageRecord("p", "y")])
        assert exc.value.passage_id == "p"

    def test_postings_sorted_and_consistent(self, sample_index):
        for term, plist in sample_index.postings.items():
            assert plist == sorted(plist)
            assert sum(tf for _, tf in plist) == \
                sample_index.collection_frequency[term]
        assert sum(sample_index.doc_length.values()) == sample_index.total_tokens


class TestLmdScore:
    def test_toy_example(self, toy_index):
        s1 = lmd_score(["apple"], "p1", toy_index, mu=1.0)
        s2 = lmd_score(["apple"], "p2", toy_index, mu=1.0)
        assert s1 == pytest.approx(math.log(0.6), abs=1e-12)
        assert s2 == pytest.approx(math.log(0.4 / 3), abs=1e-12)
        assert s1 > s2

    def test_empty_query(self, toy_index):
        assert lmd_score([], "p1", toy_index, mu=1.0) == 0.0

    def test_additivity(self, toy_index):
        single = lmd_score(["apple"], "p1", toy_index, mu=1.0)
        double = lmd_score(["apple", "apple"], "p1", toy_index, mu=1.0)
        assert double == pytest.approx(2 * single, abs=1e-12)

    def test_unknown_passage(self, toy_index):
        with pytest.raises(UnknownPassageError):
            lmd_score(["apple"], "nope", toy_index, mu=1.0)

    def test_matches_oracle_randomized(self):
        rng = random.Random(42)
        vocab = [f"w{i}" for i in range(30)]
        for _ in range(40):
            n_passages = rng.randint(1, 50)
            passages = []
            for i in range(n_passages):
                length = rng.randint(1, 25)
                passages.append([rng.choice(vocab) for _ in range(length)])
            records = [PassageRecord(f"p{i:03d}", " ".join(tokens))
                       for i, tokens in enumerate(passages)]
            index = build_index(records)
            query = [rng.choice(vocab + ["oov1", "oov2"])
                     for _ in range(rng.randint(1, 20))]
            mu = rng.choice([1.0, 10.0, 2500.0])
            pid = rng.randrange(n_passages)
            expected = lmd_oracle(query, passages[pid], passages, mu)
            got = lmd_score(query, f"p{pid:03d}", index, mu)
            assert got == pytest.approx(expected, abs=1e-12)


class TestRetrieve:
    def test_toy_ranking(self, toy_index):
        params = RetrievalParams(mu=1.0, k=10, rerank_depth=2)
        result = retrieve("apple", toy_index, params)
        assert [pid for pid, _ in result] == ["p1", "p2"]

    def test_oov_query_ties_by_id(self):
        # equal doc lengths so the floor gives identical scores everywhere
        index = build_index([PassageRecord("pB", "x y"),
                             PassageRecord("pA", "u v"),
                             PassageRecord("pC", "s t")])
        result = retrieve("zzz", index, RetrievalParams(mu=1.0, k=10,
                                                        rerank_depth=1))
        scores = {s for _, s in result}
        assert len(scores) == 1
        assert [pid for pid, _ in result] == ["pA", "pB", "pC"]

    def test_k_limits(self, toy_index):
        result = retrieve("apple", toy_index, RetrievalParams(mu=1.0, k=1,
                                                              rerank_depth=1))
        assert len(result) == 1
        assert result[0][0] == "p1"

    def test_empty_query_empty_list(self, toy_index):
        assert retrieve("!!!", toy_index, RetrievalParams()) == []

    def test_full_text_query_ranks_self_first(self):
        # disjoint vocabularies per passage
        records = [PassageRecord(f"p{i}", " ".join(f"tok{i}x{j}" for j in range(6)))
                   for i in range(8)]
        index = build_index(records)
        for record in records:
            top = retrieve(record.text, index, RetrievalParams())[0][0]
            assert top == record.id

    def test_ordering_invariant_to_constant_shift(self, sample_index):
        params = RetrievalParams(mu=500.0, k=10, rerank_depth=3)
        base = retrieve("satellite orbit", sample_index, params)
        ids = [pid for pid, _ in base]
        # argsort property: recompute with scores shifted by a constant
        shifted = sorted(((pid, s + 123.0) for pid, s in base),
                         key=lambda item: (-item[1], item[0]))
        assert [pid for pid, _ in shifted] == ids


class TestRetrievalParams:
    def test_validation(self):
        with pytest.raises(ValueError):
            RetrievalParams(mu=0)
        with pytest.raises(ValueError):
            RetrievalParams(rerank_depth=0)
        with pytest.raises(ValueError):
            RetrievalParams(k=5, rerank_depth=6)


class TestPersistence:
    def test_roundtrip(self, sample_index, tmp_path):
        manifest = save_index(sample_index, tmp_path / "idx")
        assert manifest["passage_count"] == sample_index.passage_count
        loaded = load_index(tmp_path / "idx")
        assert loaded.postings == sample_index.postings
        assert loaded.doc_length == sample_index.doc_length
        assert loaded.total_tokens == sample_index.total_tokens
        assert loaded.texts == sample_index.texts

    def test_rebuild_same_hash(self, sample_index, tmp_path):
        m1 = save_index(sample_index, tmp_path / "a")
        m2 = save_index(sample_index, tmp_path / "b")
        assert m1["content_sha256"] == m2["content_sha256"]

    def test_empty_text_rejected(self):
        with pytest.raises(ValueError):
            PassageRecord("p", "")
