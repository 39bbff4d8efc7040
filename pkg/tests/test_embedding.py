"""Tokenization, cosine similarity, the embedding store, and the bundled
deterministic text embedding provider."""

import io
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from distressgraph import (
    EmbeddingRecord,
    EmbeddingStore,
    HashedBagEmbedder,
    ParseError,
    ValidationError,
    cosine,
    is_word_char,
    normalized_score,
    read_embedding_records,
    tokenize,
)


class TestTokenize:
    def test_basic_words(self):
        assert tokenize("man ka bhoj") == ["man", "ka", "bhoj"]

    def test_casefolded(self):
        assert tokenize("Man KA Bhoj") == ["man", "ka", "bhoj"]

    def test_punctuation_splits(self):
        assert tokenize("neend nahi aati, raat bhar!") == [
            "neend",
            "nahi",
            "aati",
            "raat",
            "bhar",
        ]

    def test_devanagari_matras_stay_attached(self):
        # Vowel signs are combining marks; a word must not split at them.
        assert tokenize("मुझे घबराहट होती है") == ["मुझे", "घबराहट", "होती", "है"]

    def test_empty(self):
        assert tokenize("") == []
        assert tokenize("  ...  ") == []

    def test_digits_kept(self):
        assert tokenize("raat 3 baje") == ["raat", "3", "baje"]


class TestIsWordChar:
    def test_letters_and_digits(self):
        assert is_word_char("a")
        assert is_word_char("7")
        assert is_word_char("म")

    def test_combining_marks(self):
        assert is_word_char("ा")  # AA matra, category Mc
        assert is_word_char("ं")  # anusvara, category Mn

    def test_separators(self):
        assert not is_word_char(" ")
        assert not is_word_char("-")
        assert not is_word_char(",")


class TestCosine:
    def test_identical(self):
        assert cosine([1.0, 0.0], [1.0, 0.0]) == 1.0

    def test_orthogonal(self):
        assert cosine([1.0, 0.0], [0.0, 1.0]) == 0.0

    def test_forty_five_degrees(self):
        # Hand computation: dot=1, norms sqrt(2) and 1.
        assert cosine([1.0, 1.0], [1.0, 0.0]) == pytest.approx(
            1.0 / math.sqrt(2.0), abs=1e-9
        )

    def test_dim_mismatch(self):
        with pytest.raises(ValidationError):
            cosine([1.0, 0.0], [1.0, 0.0, 0.0])

    def test_zero_vector(self):
        with pytest.raises(ValidationError):
            cosine([0.0, 0.0], [1.0, 0.0])
        with pytest.raises(ValidationError):
            cosine([1.0, 0.0], [0.0, 0.0])

    @given(
        st.lists(
            st.floats(min_value=-100, max_value=100, allow_nan=False),
            min_size=1,
            max_size=16,
        ).filter(lambda xs: any(abs(x) > 1e-6 for x in xs))
    )
    @settings(max_examples=100, deadline=None)
    def test_self_and_negation(self, xs):
        assert cosine(xs, xs) == pytest.approx(1.0, abs=1e-9)
        assert cosine(xs, [-x for x in xs]) == pytest.approx(-1.0, abs=1e-9)

    @given(
        st.integers(min_value=1, max_value=8).flatmap(
            lambda n: st.tuples(
                st.lists(
                    st.floats(min_value=-50, max_value=50, allow_nan=False),
                    min_size=n,
                    max_size=n,
                ).filter(lambda xs: any(abs(x) > 1e-6 for x in xs)),
                st.lists(
                    st.floats(min_value=-50, max_value=50, allow_nan=False),
                    min_size=n,
                    max_size=n,
                ).filter(lambda xs: any(abs(x) > 1e-6 for x in xs)),
            )
        )
    )
    @settings(max_examples=100, deadline=None)
    def test_bounded_and_symmetric(self, pair):
        u, v = pair
        c = cosine(u, v)
        assert -1.0 - 1e-9 <= c <= 1.0 + 1e-9
        assert c == pytest.approx(cosine(v, u), abs=1e-12)


class TestNormalizedScore:
    def test_endpoints_and_midpoint(self):
        assert normalized_score(-1.0) == 0.0
        assert normalized_score(0.0) == 0.5
        assert normalized_score(1.0) == 1.0


class TestEmbeddingRecord:
    def test_round_trip(self):
        rec = EmbeddingRecord("expr-000001", (0.5, -0.5), 2, "p1")
        assert EmbeddingRecord.from_dict(rec.to_dict()) == rec

    def test_dim_defaults_to_length(self):
        rec = EmbeddingRecord.from_dict(
            {"node_id": "n", "vector": [1.0, 2.0, 3.0], "provider_id": "p"}
        )
        assert rec.dim == 3

    def test_bad_record(self):
        with pytest.raises(ValidationError):
            EmbeddingRecord.from_dict({"node_id": "n", "provider_id": "p"})
        with pytest.raises(ValidationError):
            EmbeddingRecord.from_dict(
                {"node_id": "n", "vector": ["x"], "provider_id": "p"}
            )


class TestReadEmbeddingRecords:
    def test_reads_and_skips_blanks(self):
        text = (
            '{"node_id": "a", "vector": [1.0, 0.0], "provider_id": "p"}\n'
            "\n"
            '{"node_id": "b", "vector": [0.0, 1.0], "provider_id": "p"}\n'
        )
        records = list(read_embedding_records(io.StringIO(text)))
        assert [r.node_id for r in records] == ["a", "b"]

    def test_invalid_json_names_line(self):
        text = '{"node_id": "a", "vector": [1.0], "provider_id": "p"}\nnot json\n'
        with pytest.raises(ParseError, match="line 2"):
            list(read_embedding_records(io.StringIO(text)))

    def test_bad_record_names_line(self):
        with pytest.raises(ParseError, match="line 1"):
            list(read_embedding_records(io.StringIO('{"vector": [1.0]}\n')))


class TestEmbeddingStore:
    def test_first_registration_fixes_dim(self):
        store = EmbeddingStore()
        store.register("n1", [0.0] * 63 + [1.0], "p")
        assert store.dim("p") == 64

    def test_dim_mismatch_rejected(self):
        store = EmbeddingStore()
        store.register("n1", [0.0] * 63 + [1.0], "p")
        with pytest.raises(ValidationError):
            store.register("n2", [1.0] * 32, "p")

    def test_zero_vector_rejected(self):
        store = EmbeddingStore()
        with pytest.raises(ValidationError):
            store.register("n1", [0.0, 0.0], "p")

    def test_non_finite_rejected(self):
        store = EmbeddingStore()
        with pytest.raises(ValidationError):
            store.register("n1", [1.0, float("nan")], "p")

    def test_reregistration_overwrites(self):
        store = EmbeddingStore()
        store.register("n1", [1.0, 0.0], "p")
        store.register("n1", [0.0, 2.0], "p")
        assert list(store.get("n1", "p")) == [0.0, 2.0]
        assert store.node_ids("p") == ["n1"]

    def test_providers_independent(self):
        store = EmbeddingStore()
        store.register("n1", [1.0, 0.0], "p1")
        store.register("n1", [1.0, 0.0, 0.0], "p2")
        assert store.dim("p1") == 2
        assert store.dim("p2") == 3
        assert store.get("n1", "missing") is None

    def test_matrix_unit_rows_and_skips_missing(self):
        store = EmbeddingStore()
        store.register("n1", [3.0, 0.0], "p")
        kept, mat = store.matrix("p", ["n1", "n-absent"])
        assert kept == ["n1"]
        assert np.allclose(mat, [[1.0, 0.0]])

    def test_records_sorted(self):
        store = EmbeddingStore()
        store.register("b", [1.0], "p")
        store.register("a", [2.0], "p")
        assert [r.node_id for r in store.records()] == ["a", "b"]


class TestHashedBagEmbedder:
    def test_unit_norm(self):
        emb = HashedBagEmbedder()
        vec = emb.embed("man ka bhoj")
        assert np.linalg.norm(vec) == pytest.approx(1.0, abs=1e-12)

    def test_deterministic_across_instances(self):
        a = HashedBagEmbedder().embed("mujhe ghabraahat mehsoos ho rhi hai")
        b = HashedBagEmbedder().embed("mujhe ghabraahat mehsoos ho rhi hai")
        assert np.array_equal(a, b)

    def test_identical_text_cosine_one(self):
        emb = HashedBagEmbedder()
        assert emb.similarity("man ka bhoj", "man ka bhoj") == pytest.approx(
            1.0, abs=1e-12
        )

    def test_disjoint_token_sets_exactly_orthogonal(self):
        emb = HashedBagEmbedder()
        s = emb.similarity("man ka bhoj bahut hai", "neend raat subah tak")
        assert abs(s) <= 1e-9

    def test_shared_token_positive_similarity(self):
        emb = HashedBagEmbedder()
        # One vector component per token, so overlap contributes w^2 > 0.
        assert emb.similarity("man ka bhoj", "bhoj uthana") > 0.0

    def test_word_order_irrelevant(self):
        emb = HashedBagEmbedder()
        assert emb.similarity("ka man bhoj", "man ka bhoj") == pytest.approx(
            1.0, abs=1e-12
        )

    def test_empty_text_rejected(self):
        emb = HashedBagEmbedder()
        with pytest.raises(ValidationError):
            emb.embed("...")

    def test_tiny_dim_rejected(self):
        with pytest.raises(ValidationError):
            HashedBagEmbedder(dim=1)

    def test_vocabulary_overflow(self):
        emb = HashedBagEmbedder(dim=3)
        emb.embed("a b c")
        with pytest.raises(ValidationError):
            emb.embed("d")

    def test_similarity_matches_closed_form_oracle(self):
        # Independent recomputation from per-token weights: each token owns
        # one component, so the cosine reduces to sums over token counts.
        emb = HashedBagEmbedder()
        text_a, text_b = "x x y", "x y z"
        sim = emb.similarity(text_a, text_b)
        w = {tok: emb._weights[tok] for tok in ("x", "y", "z")}
        dot = 2 * w["x"] ** 2 + w["y"] ** 2
        norm_a = math.sqrt(4 * w["x"] ** 2 + w["y"] ** 2)
        norm_b = math.sqrt(w["x"] ** 2 + w["y"] ** 2 + w["z"] ** 2)
        assert sim == pytest.approx(dot / (norm_a * norm_b), abs=1e-12)

    @given(
        st.lists(st.sampled_from("abcde"), min_size=1, max_size=6),
        st.lists(st.sampled_from("vwxyz"), min_size=1, max_size=6),
    )
    @settings(max_examples=50, deadline=None)
    def test_disjoint_alphabets_always_orthogonal(self, left, right):
        emb = HashedBagEmbedder()
        # Tokens drawn from disjoint alphabets never share a component.
        s = emb.similarity(" ".join(left), " ".join(right))
        assert abs(s) <= 1e-9
