"""Candidate generation: k-NN similarity proposals, the lexicon concept
proposer, and alignment planning for incoming text."""

import itertools

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from distressgraph import (
    AlignmentEngine,
    AlignmentOutcome,
    CandidateEdge,
    DEFAULT_CONCEPTS,
    EdgeType,
    EmbeddingStore,
    Framework,
    LexiconProposer,
    OntologyGraph,
    ProposerError,
    ValidationError,
    cosine,
    default_proposer,
    normalized_score,
)

from conftest import make_annotation, make_provenance


def engine_with_expressions(texts_by_language):
    """Graph + alignment engine; returns (engine, {label: node_id}).

    texts_by_language: list of (label, text, language).
    Embeddings are NOT registered; tests decide what goes in the store.
    """
    graph = OntologyGraph()
    engine = AlignmentEngine(graph, EmbeddingStore())
    ids = {}
    for label, text, language in texts_by_language:
        node, _ = graph.add_expression(text, language, make_annotation(), make_provenance())
        ids[label] = node.id
    return engine, ids


def brute_force_pairs(store, provider_id, node_ids, tau):
    """All unordered pairs with normalized cosine score >= tau."""
    out = {}
    for a, b in itertools.combinations(sorted(node_ids), 2):
        va = store.get(a, provider_id)
        vb = store.get(b, provider_id)
        score = normalized_score(cosine(va, vb))
        if score >= tau:
            out[(a, b)] = score
    return out


class TestProposeIntraLingual:
    def test_single_node_no_pairs(self):
        engine, ids = engine_with_expressions([("a", "akela vakya", "hi")])
        engine.store.register(ids["a"], [1.0, 0.0], engine.provider_id)
        assert engine.propose_intra_lingual("hi") == []

    def test_no_embeddings_is_empty_not_error(self):
        engine, _ = engine_with_expressions([("a", "akela vakya", "hi")])
        assert engine.propose_intra_lingual("hi") == []

    def test_identical_vectors_score_one(self):
        engine, ids = engine_with_expressions(
            [("a", "pehla", "hi"), ("b", "doosra", "hi")]
        )
        engine.store.register(ids["a"], [0.6, 0.8], engine.provider_id)
        engine.store.register(ids["b"], [0.6, 0.8], engine.provider_id)
        got = engine.propose_intra_lingual("hi", tau=0.9)
        assert len(got) == 1
        cand = got[0]
        assert cand.score == pytest.approx(1.0, abs=1e-9)
        assert cand.edge_type is EdgeType.INTRA_LINGUAL
        assert {cand.src, cand.dst} == {ids["a"], ids["b"]}

    def test_planted_clusters_match_brute_force(self):
        # Two clusters of three nearly-parallel vectors on disjoint axes.
        specs = [
            ("a1", [1.0, 0.1, 0, 0, 0, 0, 0, 0]),
            ("a2", [1.0, -0.1, 0, 0, 0, 0, 0, 0]),
            ("a3", [1.0, 0, 0.1, 0, 0, 0, 0, 0]),
            ("b1", [0, 0, 0, 0, 1.0, 0.1, 0, 0]),
            ("b2", [0, 0, 0, 0, 1.0, -0.1, 0, 0]),
            ("b3", [0, 0, 0, 0, 1.0, 0, 0.1, 0]),
        ]
        engine, ids = engine_with_expressions(
            [(label, f"vakya {label}", "hi") for label, _ in specs]
        )
        for label, vec in specs:
            engine.store.register(ids[label], vec, engine.provider_id)

        got = engine.propose_intra_lingual("hi", k=2, tau=0.8)
        expected = brute_force_pairs(
            engine.store, engine.provider_id, list(ids.values()), 0.8
        )
        assert len(got) == 6
        assert {(c.src, c.dst) for c in got} == set(expected)
        for cand in got:
            assert cand.score == pytest.approx(expected[(cand.src, cand.dst)], abs=1e-9)
        # All six surviving pairs live inside one cluster.
        back = {v: k for k, v in ids.items()}
        for cand in got:
            assert back[cand.src][0] == back[cand.dst][0]

    def test_sorted_by_score_then_ids(self):
        engine, ids = engine_with_expressions(
            [(l, f"vakya {l}", "hi") for l in ("a", "b", "c")]
        )
        engine.store.register(ids["a"], [1.0, 0.0], engine.provider_id)
        engine.store.register(ids["b"], [1.0, 0.0], engine.provider_id)
        engine.store.register(ids["c"], [1.0, 0.3], engine.provider_id)
        got = engine.propose_intra_lingual("hi", tau=0.5)
        scores = [c.score for c in got]
        assert scores == sorted(scores, reverse=True)
        assert got[0].score == pytest.approx(1.0, abs=1e-9)
        assert {got[0].src, got[0].dst} == {ids["a"], ids["b"]}

    def test_pairs_deduplicated(self):
        engine, ids = engine_with_expressions(
            [("a", "pehla", "hi"), ("b", "doosra", "hi")]
        )
        engine.store.register(ids["a"], [1.0, 0.0], engine.provider_id)
        engine.store.register(ids["b"], [1.0, 0.0], engine.provider_id)
        got = engine.propose_intra_lingual("hi", tau=0.5, k=5)
        assert len(got) == 1

    def test_deterministic(self):
        engine, ids = engine_with_expressions(
            [(l, f"vakya {l}", "hi") for l in ("a", "b", "c", "d")]
        )
        vecs = [[1.0, 0.2, 0], [1.0, -0.2, 0], [0.5, 1.0, 0], [0, 0.3, 1.0]]
        for label, vec in zip(("a", "b", "c", "d"), vecs):
            engine.store.register(ids[label], vec, engine.provider_id)
        first = engine.propose_intra_lingual("hi", tau=0.6)
        second = engine.propose_intra_lingual("hi", tau=0.6)
        assert first == second

    def test_bad_k(self):
        engine, _ = engine_with_expressions([("a", "akela", "hi")])
        with pytest.raises(ValidationError):
            engine.propose_intra_lingual("hi", k=0)


class TestProposeCrossLingual:
    def test_same_language_rejected(self):
        engine, _ = engine_with_expressions([("a", "vakya", "hi")])
        with pytest.raises(ValidationError):
            engine.propose_cross_lingual("hi", "hi")

    def test_identical_vectors_across_languages(self):
        engine, ids = engine_with_expressions(
            [("hi", "man ka bhoj", "hi"), ("kn", "manassige bhaara", "kn")]
        )
        engine.store.register(ids["hi"], [1.0, 1.0], engine.provider_id)
        engine.store.register(ids["kn"], [1.0, 1.0], engine.provider_id)
        got = engine.propose_cross_lingual("hi", "kn", tau=0.9)
        assert len(got) == 1
        assert got[0].edge_type is EdgeType.CROSS_LINGUAL
        assert got[0].score == pytest.approx(1.0, abs=1e-9)

    def test_disjoint_support_below_threshold(self):
        # Orthogonal vectors: every pairwise score is exactly 0.5 < 0.6.
        engine, ids = engine_with_expressions(
            [("hi", "ek", "hi"), ("kn", "ondu", "kn"), ("mr", "ek mr", "mr")]
        )
        engine.store.register(ids["hi"], [1.0, 0, 0], engine.provider_id)
        engine.store.register(ids["kn"], [0, 1.0, 0], engine.provider_id)
        engine.store.register(ids["mr"], [0, 0, 1.0], engine.provider_id)
        assert (
            brute_force_pairs(engine.store, engine.provider_id, list(ids.values()), 0.6)
            == {}
        )
        assert engine.propose_cross_lingual("hi", "kn", tau=0.6) == []

    def test_never_emits_same_language_pair(self):
        engine, ids = engine_with_expressions(
            [
                ("h1", "pehla", "hi"),
                ("h2", "doosra", "hi"),
                ("k1", "ondu", "kn"),
                ("k2", "eradu", "kn"),
            ]
        )
        for node_id in ids.values():
            engine.store.register(node_id, [1.0, 1.0], engine.provider_id)
        got = engine.propose_cross_lingual("hi", "kn", tau=0.5)
        languages = {
            node.language for cand in got for node in
            (engine.graph.expression(cand.src), engine.graph.expression(cand.dst))
        }
        for cand in got:
            a = engine.graph.expression(cand.src).language
            b = engine.graph.expression(cand.dst).language
            assert {a, b} == {"hi", "kn"}
        assert languages == {"hi", "kn"}
        # 2x2 bipartite complete at this threshold.
        assert len(got) == 4


@settings(max_examples=40, deadline=None)
@given(
    vectors=st.lists(
        st.tuples(
            st.floats(min_value=-1, max_value=1, allow_nan=False),
            st.floats(min_value=-1, max_value=1, allow_nan=False),
            st.floats(min_value=-1, max_value=1, allow_nan=False),
        ).filter(lambda v: any(abs(x) > 1e-3 for x in v)),
        min_size=2,
        max_size=6,
    ),
    taus=st.tuples(
        st.floats(min_value=0.0, max_value=1.0, allow_nan=False),
        st.floats(min_value=0.0, max_value=1.0, allow_nan=False),
    ),
)
def test_raising_tau_never_adds_candidates(vectors, taus):
    lo, hi = sorted(taus)
    engine, ids = engine_with_expressions(
        [(f"n{i}", f"vakya {i}", "hi") for i in range(len(vectors))]
    )
    for i, vec in enumerate(vectors):
        engine.store.register(ids[f"n{i}"], list(vec), engine.provider_id)
    loose = {(c.src, c.dst) for c in engine.propose_intra_lingual("hi", tau=lo)}
    strict = {(c.src, c.dst) for c in engine.propose_intra_lingual("hi", tau=hi)}
    assert strict <= loose


class TestProposeExpressionConcept:
    def seeded(self, text="mujhe ghabraahat mehsoos ho rhi hai", language="hi"):
        graph = OntologyGraph()
        for item in DEFAULT_CONCEPTS:
            graph.add_concept(item["code"], Framework(item["framework"]), item["label"])
        engine = AlignmentEngine(graph, EmbeddingStore())
        node, _ = graph.add_expression(text, language, make_annotation(), make_provenance())
        return engine, node

    def test_anxiety_cue_ranks_first(self):
        engine, node = self.seeded()
        got = engine.propose_expression_concept(node.id, default_proposer())
        assert got
        top = got[0]
        concept = engine.graph.concept(top.dst)
        assert concept.code == "MB24.3"
        assert "ghabraahat" in top.rationale
        assert "not diagnostic in isolation" in top.rationale
        assert 0.0 <= top.score <= 1.0
        assert top.proposer_id == "lexicon-proposer-v1"

    def test_no_cue_matches(self):
        engine, node = self.seeded(text="aaj mausam accha hai")
        assert engine.propose_expression_concept(node.id, default_proposer()) == []

    def test_deterministic(self):
        engine, node = self.seeded()
        proposer = default_proposer()
        assert engine.propose_expression_concept(
            node.id, proposer
        ) == engine.propose_expression_concept(node.id, proposer)

    def test_strongest_cue_per_concept_wins(self):
        engine, node = self.seeded(text="stress aur ghabraahat dono mehsoos ho rahe hain")
        got = engine.propose_expression_concept(node.id, default_proposer())
        anxiety = [c for c in got if engine.graph.concept(c.dst).code == "MB24.3"]
        assert len(anxiety) == 1
        assert anxiety[0].score == pytest.approx(0.72)
        assert "ghabraahat" in anxiety[0].rationale

    def test_native_script_cue(self):
        engine, node = self.seeded(text="मन का बोझ बहुत है")
        got = engine.propose_expression_concept(node.id, default_proposer())
        assert [engine.graph.concept(c.dst).code for c in got] == ["MIND-BURDEN"]

    def test_cue_needs_word_boundary(self):
        # "stressed" must not fire the "stress" cue.
        engine, node = self.seeded(text="main bahut stressed hoon")
        assert engine.propose_expression_concept(node.id, default_proposer()) == []

    def test_failing_proposer_wraps_node_id(self):
        engine, node = self.seeded()

        class Exploding:
            proposer_id = "exploding"

            def propose(self, node, concepts):
                raise RuntimeError("backend down")

        with pytest.raises(ProposerError) as excinfo:
            engine.propose_expression_concept(node.id, Exploding())
        assert excinfo.value.node_id == node.id

    def test_failure_isolated_per_node(self):
        engine, node = self.seeded()
        other, _ = engine.graph.add_expression(
            "neend nahi aati", "hi", make_annotation(), make_provenance()
        )

        class FailsForOne:
            proposer_id = "selective"

            def propose(self, n, concepts):
                if n.id == node.id:
                    raise RuntimeError("boom")
                return default_proposer().propose(n, concepts)

        proposer = FailsForOne()
        with pytest.raises(ProposerError):
            engine.propose_expression_concept(node.id, proposer)
        assert engine.propose_expression_concept(other.id, proposer)

    @pytest.mark.parametrize(
        "field,value",
        [("score", 1.5), ("rationale", "  "), ("edge_type", EdgeType.INTRA_LINGUAL)],
    )
    def test_malformed_candidates_rejected(self, field, value):
        engine, node = self.seeded()
        concept = engine.graph.concepts()[0]

        class Sloppy:
            proposer_id = "sloppy"

            def propose(self, n, concepts):
                base = dict(
                    src=n.id,
                    dst=concept.id,
                    edge_type=EdgeType.EXPRESSION_CONCEPT,
                    score=0.5,
                    rationale="fine",
                    proposer_id="sloppy",
                )
                base[field] = value
                return [CandidateEdge(**base)]

        with pytest.raises(ProposerError):
            engine.propose_expression_concept(node.id, Sloppy())

    def test_wrong_src_rejected(self):
        engine, node = self.seeded()
        concept = engine.graph.concepts()[0]

        class WrongSrc:
            proposer_id = "wrong-src"

            def propose(self, n, concepts):
                return [
                    CandidateEdge(
                        src="expr-999999",
                        dst=concept.id,
                        edge_type=EdgeType.EXPRESSION_CONCEPT,
                        score=0.5,
                        rationale="fine",
                        proposer_id="wrong-src",
                    )
                ]

        with pytest.raises(ProposerError):
            engine.propose_expression_concept(node.id, WrongSrc())

    def test_concept_node_rejected_as_input(self):
        engine, _ = self.seeded()
        concept = engine.graph.concepts()[0]
        with pytest.raises(ValidationError):
            engine.propose_expression_concept(concept.id, default_proposer())


class TestPlanAlignment:
    def seeded(self):
        graph = OntologyGraph()
        engine = AlignmentEngine(graph, EmbeddingStore())
        node, _ = graph.add_expression(
            "neend nahi aati raat bhar", "hi", make_annotation(), make_provenance()
        )
        engine.ensure_embedding(node)
        return engine, node

    def test_exact_text_matches_without_new_node(self):
        engine, node = self.seeded()
        plan = engine.plan_alignment("neend nahi aati raat bhar", "hi")
        assert plan.outcome is AlignmentOutcome.EXACT
        assert plan.existing_node_id == node.id
        assert plan.similarity is None

    def test_exact_match_is_normalization_aware(self):
        engine, node = self.seeded()
        plan = engine.plan_alignment("  Neend Nahi Aati Raat Bhar " , "hi")
        # Case differs, so this is not an exact key match; whitespace alone is.
        plan2 = engine.plan_alignment("  neend nahi aati raat bhar ", "hi")
        assert plan2.outcome is AlignmentOutcome.EXACT

    def test_near_match_aligns_to_best_node(self):
        engine, node = self.seeded()
        sim = normalized_score(
            engine.embedder.similarity(
                "neend nahi aati raat ko", "neend nahi aati raat bhar"
            )
        )
        assert sim >= 0.85  # fixture sanity: four of five tokens shared
        plan = engine.plan_alignment("neend nahi aati raat ko", "hi")
        assert plan.outcome is AlignmentOutcome.ALIGNED
        assert plan.existing_node_id == node.id
        assert plan.similarity == pytest.approx(sim, abs=1e-9)
        assert plan.edge_type is EdgeType.INTRA_LINGUAL

    def test_cross_language_alignment_marks_cross_lingual(self):
        engine, node = self.seeded()
        plan = engine.plan_alignment("neend nahi aati raat ko", "kn")
        assert plan.outcome is AlignmentOutcome.ALIGNED
        assert plan.edge_type is EdgeType.CROSS_LINGUAL

    def test_disjoint_tokens_provisional(self):
        engine, _ = self.seeded()
        plan = engine.plan_alignment("mausam aaj accha lag raha", "hi")
        assert plan.outcome is AlignmentOutcome.PROVISIONAL
        assert plan.existing_node_id is None

    def test_tau_align_override(self):
        engine, _ = self.seeded()
        plan = engine.plan_alignment("neend nahi aati raat ko", "hi", tau_align=0.9999)
        assert plan.outcome is AlignmentOutcome.PROVISIONAL

    def test_match_and_provisional_mutually_exclusive(self):
        engine, _ = self.seeded()
        for text in (
            "neend nahi aati raat bhar",
            "neend nahi aati raat ko",
            "bilkul alag shabd yahan",
        ):
            plan = engine.plan_alignment(text, "hi")
            if plan.outcome is AlignmentOutcome.PROVISIONAL:
                assert plan.existing_node_id is None
            else:
                assert plan.existing_node_id is not None

    def test_empty_graph_is_provisional(self):
        engine = AlignmentEngine(OntologyGraph(), EmbeddingStore())
        plan = engine.plan_alignment("koi bhi vakya", "hi")
        assert plan.outcome is AlignmentOutcome.PROVISIONAL


class TestEnsureEmbedding:
    def test_registers_once(self):
        graph = OntologyGraph()
        engine = AlignmentEngine(graph, EmbeddingStore())
        node, _ = graph.add_expression("vakya", "hi", make_annotation(), make_provenance())
        engine.ensure_embedding(node)
        first = engine.store.get(node.id, engine.provider_id)
        engine.ensure_embedding(node)
        assert engine.store.get(node.id, engine.provider_id) is first
