"""Graph connectivity metrics, semantic coherence, review-efficiency
accounting, and the seeded validator simulator."""

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from distressgraph import (
    CandidateEdge,
    EdgeStatus,
    EdgeType,
    EmbeddingStore,
    Engine,
    Framework,
    OntologyGraph,
    SimulationConfig,
    ValidationError,
    canonical_json_bytes,
    connectivity_metrics,
    cosine,
    hitl_efficiency,
    semantic_coherence,
    simulate_validation,
)
from distressgraph.fixtures import (
    SIMULATION_SEEDS,
    coherence_fixture,
    simulation_fixture,
)
from distressgraph.metrics import (
    candidate_key,
    edge_key,
    efficiency_report,
    precision_recall_f1,
)
from distressgraph.simulate import run_simulation

from conftest import make_annotation, make_provenance


def add_expr(graph, text, language="hi"):
    node, _ = graph.add_expression(text, language, make_annotation(), make_provenance())
    return node


def accept(graph, edge_id):
    graph.set_edge_status(edge_id, EdgeStatus.UNDER_VALIDATION)
    graph.set_edge_status(edge_id, EdgeStatus.ACCEPTED)


class TestConnectivityMetrics:
    def test_empty_graph(self):
        m = connectivity_metrics(OntologyGraph())
        assert m.weakly_connected_components == 0
        assert m.concept_coverage == 0.0
        assert m.isolated_expression_ratio == 0.0
        assert m.mean_degree == 0.0

    def test_three_node_fixture(self):
        # Nodes: e1, e2, c.  One Accepted e1-c edge.  Components by hand:
        # {e1, c} and {e2}.  Covered: e1 only.  Isolated: e2 only.
        graph = OntologyGraph()
        e1 = add_expr(graph, "pehla vakya")
        add_expr(graph, "doosra vakya")
        concept, _ = graph.add_concept("MB24.3", Framework.ICD11, "Anxiety")
        edge, _ = graph.add_edge(
            e1.id, concept.id, EdgeType.EXPRESSION_CONCEPT, 0.8, "r", make_provenance()
        )
        accept(graph, edge.id)
        m = connectivity_metrics(graph)
        assert m.weakly_connected_components == 2
        assert m.concept_coverage == pytest.approx(0.5)
        assert m.isolated_expression_ratio == pytest.approx(0.5)
        assert m.mean_degree == pytest.approx(2.0 * 1 / 3)
        assert m.node_counts == {"expression": 2, "concept": 1}
        assert m.edge_counts_by_status["Accepted"] == 1

    def test_chain_coverage_through_accepted_path(self):
        # e1 -(intra)- e2 -(concept)- c: e1 is covered via the chain.
        graph = OntologyGraph()
        e1 = add_expr(graph, "pehla vakya")
        e2 = add_expr(graph, "doosra vakya")
        concept, _ = graph.add_concept("MB24.3", Framework.ICD11, "Anxiety")
        intra, _ = graph.add_edge(
            e1.id, e2.id, EdgeType.INTRA_LINGUAL, 0.8, "r", make_provenance()
        )
        link, _ = graph.add_edge(
            e2.id, concept.id, EdgeType.EXPRESSION_CONCEPT, 0.8, "r", make_provenance()
        )
        accept(graph, intra.id)
        accept(graph, link.id)
        m = connectivity_metrics(graph)
        assert m.concept_coverage == pytest.approx(1.0)
        assert m.weakly_connected_components == 1
        assert m.isolated_expression_ratio == 0.0

    def test_rejected_edges_carry_no_structure(self):
        graph = OntologyGraph()
        e1 = add_expr(graph, "pehla vakya")
        concept, _ = graph.add_concept("MB24.3", Framework.ICD11, "Anxiety")
        edge, _ = graph.add_edge(
            e1.id, concept.id, EdgeType.EXPRESSION_CONCEPT, 0.8, "r", make_provenance()
        )
        graph.set_edge_status(edge.id, EdgeStatus.UNDER_VALIDATION)
        graph.set_edge_status(edge.id, EdgeStatus.REJECTED)
        m = connectivity_metrics(graph)
        assert m.weakly_connected_components == 2
        assert m.isolated_expression_ratio == 1.0
        assert m.concept_coverage == 0.0
        assert m.mean_degree == 0.0
        assert m.edge_counts_by_status["Rejected"] == 1

    def test_proposed_edge_connects_but_does_not_cover(self):
        graph = OntologyGraph()
        e1 = add_expr(graph, "pehla vakya")
        concept, _ = graph.add_concept("MB24.3", Framework.ICD11, "Anxiety")
        graph.add_edge(
            e1.id, concept.id, EdgeType.EXPRESSION_CONCEPT, 0.8, "r", make_provenance()
        )
        m = connectivity_metrics(graph)
        assert m.weakly_connected_components == 1
        assert m.isolated_expression_ratio == 0.0
        assert m.concept_coverage == 0.0

    def test_repeated_computation_identical(self):
        graph, _, _ = coherence_fixture()
        assert connectivity_metrics(graph) == connectivity_metrics(graph)

    @given(
        n=st.integers(min_value=1, max_value=10),
        raw_edges=st.lists(
            st.tuples(st.integers(0, 9), st.integers(0, 9)), max_size=25
        ),
    )
    @settings(max_examples=50, deadline=None)
    def test_component_count_matches_union_find_oracle(self, n, raw_edges):
        pairs = sorted(
            {(min(a, b), max(a, b)) for a, b in raw_edges if a != b and a < n and b < n}
        )
        graph = OntologyGraph()
        nodes = [add_expr(graph, f"vakya number {i}") for i in range(n)]
        for a, b in pairs:
            graph.add_edge(
                nodes[a].id,
                nodes[b].id,
                EdgeType.INTRA_LINGUAL,
                0.5,
                "r",
                make_provenance(),
            )
        m = connectivity_metrics(graph)

        parent = list(range(n))

        def find(x):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        for a, b in pairs:
            parent[find(a)] = find(b)
        assert m.weakly_connected_components == len({find(i) for i in range(n)})
        assert m.mean_degree == pytest.approx(2.0 * len(pairs) / n)

    @given(
        data=st.tuples(
            st.sets(st.integers(0, 5), max_size=6),
            st.sets(st.integers(0, 5), max_size=6),
        )
    )
    @settings(max_examples=40, deadline=None)
    def test_coverage_monotone_in_accepted_edges(self, data):
        smaller, extra = data
        larger = smaller | extra

        def coverage(accepted_indices):
            graph = OntologyGraph()
            concepts = [
                graph.add_concept("MB24.3", Framework.ICD11, "Anxiety")[0],
                graph.add_concept("ANHEDONIA", Framework.DSM5, "Loss of pleasure")[0],
            ]
            for i in range(6):
                node = add_expr(graph, f"vakya number {i}")
                edge, _ = graph.add_edge(
                    node.id,
                    concepts[i % 2].id,
                    EdgeType.EXPRESSION_CONCEPT,
                    0.5,
                    "r",
                    make_provenance(),
                )
                if i in accepted_indices:
                    accept(graph, edge.id)
            return connectivity_metrics(graph).concept_coverage

        assert coverage(smaller) <= coverage(larger)


class TestSemanticCoherence:
    def test_identical_vectors_score_zero(self):
        graph = OntologyGraph()
        store = EmbeddingStore()
        vec = [1.0, 2.0, 3.0]
        for c_idx, code in enumerate(("MB24.3", "ANHEDONIA")):
            concept, _ = graph.add_concept(
                code, Framework.ICD11 if c_idx == 0 else Framework.DSM5, f"c{c_idx}"
            )
            for i in range(2):
                node = add_expr(graph, f"same vector text {c_idx} {i}")
                store.register(node.id, vec, "p")
                edge, _ = graph.add_edge(
                    node.id,
                    concept.id,
                    EdgeType.EXPRESSION_CONCEPT,
                    0.9,
                    "r",
                    make_provenance(),
                )
                accept(graph, edge.id)
        assert semantic_coherence(graph, store, "p") == pytest.approx(0.0, abs=1e-12)

    def test_planted_clusters_match_brute_force_oracle(self):
        graph, store, provider = coherence_fixture()
        value = semantic_coherence(graph, store, provider)

        groups = {}
        for edge in graph.edges():
            if edge.status is EdgeStatus.ACCEPTED:
                groups.setdefault(edge.dst, set()).add(edge.src)
        vectors = {
            nid: store.get(nid, provider)
            for members in groups.values()
            for nid in members
        }
        intra, inter = [], []
        concept_ids = sorted(groups)
        for cid in concept_ids:
            members = sorted(groups[cid])
            for i in range(len(members)):
                for j in range(i + 1, len(members)):
                    intra.append(cosine(vectors[members[i]], vectors[members[j]]))
        for i in range(len(concept_ids)):
            for j in range(i + 1, len(concept_ids)):
                for a in sorted(groups[concept_ids[i]]):
                    for b in sorted(groups[concept_ids[j]]):
                        inter.append(cosine(vectors[a], vectors[b]))
        oracle = sum(intra) / len(intra) - sum(inter) / len(inter)

        assert value == pytest.approx(oracle, abs=1e-9)
        assert value > 0.5

    def test_single_concept_undefined(self):
        graph = OntologyGraph()
        store = EmbeddingStore()
        concept, _ = graph.add_concept("MB24.3", Framework.ICD11, "Anxiety")
        for i in range(2):
            node = add_expr(graph, f"akela samooh {i}")
            store.register(node.id, [float(i + 1), 1.0], "p")
            edge, _ = graph.add_edge(
                node.id, concept.id, EdgeType.EXPRESSION_CONCEPT, 0.9, "r", make_provenance()
            )
            accept(graph, edge.id)
        assert semantic_coherence(graph, store, "p") is None

    def test_no_concept_with_two_members_undefined(self):
        graph = OntologyGraph()
        store = EmbeddingStore()
        for c_idx, code in enumerate(("MB24.3", "ANHEDONIA")):
            concept, _ = graph.add_concept(
                code, Framework.ICD11 if c_idx == 0 else Framework.DSM5, f"c{c_idx}"
            )
            node = add_expr(graph, f"ikloute sadasya {c_idx}")
            store.register(node.id, [1.0, float(c_idx)], "p")
            edge, _ = graph.add_edge(
                node.id, concept.id, EdgeType.EXPRESSION_CONCEPT, 0.9, "r", make_provenance()
            )
            accept(graph, edge.id)
        assert semantic_coherence(graph, store, "p") is None

    def test_proposed_edges_do_not_count(self):
        graph = OntologyGraph()
        store = EmbeddingStore()
        concept, _ = graph.add_concept("MB24.3", Framework.ICD11, "Anxiety")
        for i in range(2):
            node = add_expr(graph, f"prastavit jod {i}")
            store.register(node.id, [1.0, float(i)], "p")
            graph.add_edge(
                node.id, concept.id, EdgeType.EXPRESSION_CONCEPT, 0.9, "r", make_provenance()
            )
        assert semantic_coherence(graph, store, "p") is None


class TestPrecisionRecallConventions:
    def test_plain_case(self):
        p, r, f1 = precision_recall_f1({"a", "b", "c"}, {"b", "c", "d"})
        assert p == pytest.approx(2 / 3)
        assert r == pytest.approx(2 / 3)
        assert f1 == pytest.approx(2 / 3)

    def test_zero_accepted_precision_one(self):
        p, r, f1 = precision_recall_f1(set(), {"a"})
        assert p == 1.0
        assert r == 0.0
        assert f1 == 0.0

    def test_empty_truth_recall_one(self):
        p, r, f1 = precision_recall_f1(set(), set())
        assert (p, r, f1) == (1.0, 1.0, 1.0)

    def test_report_per_edge_counts(self):
        rep = efficiency_report(9, {"a", "b", "c"}, {"a", "b", "c"})
        assert rep.decisions_per_accepted_edge == pytest.approx(3.0)
        rep = efficiency_report(5, set(), None)
        assert rep.decisions_per_accepted_edge == 0.0
        assert rep.accepted_edge_precision == 1.0

    def test_candidate_key_format(self):
        assert (
            candidate_key("expr-000001", "conc-000001", EdgeType.EXPRESSION_CONCEPT)
            == "expr-000001|conc-000001|ExpressionConcept"
        )


class TestHitlEfficiency:
    def accepted_run(self):
        engine = Engine()
        concept, _ = engine.add_concept("MB24.3", Framework.ICD11, "Anxiety")
        expr, _ = engine.add_expression(
            "mujhe ghabraahat mehsoos ho rhi hai",
            "hi",
            make_annotation(),
            make_provenance(),
        )
        edge, _ = engine.add_edge(
            expr.id, concept.id, EdgeType.EXPRESSION_CONCEPT, 0.8, "r"
        )
        engine.enqueue(edge.id)
        for role in ("linguistic", "clinical", "cultural"):
            engine.submit_decision(
                {
                    "edge_id": edge.id,
                    "validator_id": f"{role}-1",
                    "role": role,
                    "verdict": "accept",
                }
            )
        return engine, edge

    def test_three_decisions_one_edge(self):
        engine, _ = self.accepted_run()
        rep = hitl_efficiency(engine.log.records)
        assert rep.decisions_used == 3
        assert rep.decisions_per_accepted_edge == pytest.approx(3.0)
        assert rep.accepted_edge_precision == 1.0

    def test_empty_log_zeros(self):
        rep = hitl_efficiency([])
        assert rep.decisions_used == 0
        assert rep.decisions_per_accepted_edge == 0.0

    def test_with_ground_truth(self):
        engine, edge = self.accepted_run()
        truth = {edge_key(engine.graph.edge(edge.id)), "expr-x|conc-y|ExpressionConcept"}
        rep = hitl_efficiency(engine.log.records, truth)
        assert rep.accepted_edge_precision == 1.0
        assert rep.accepted_edge_recall == pytest.approx(0.5)
        assert rep.f1 == pytest.approx(2 / 3)

    def test_replayed_log_matches_live(self):
        engine, _ = self.accepted_run()
        replayed = Engine.from_events(engine.log.records)
        assert hitl_efficiency(replayed.log.records) == hitl_efficiency(engine.log.records)


def tiny_candidates(n=3):
    graph = OntologyGraph()
    concept, _ = graph.add_concept("MB24.3", Framework.ICD11, "Anxiety")
    candidates = []
    for i in range(n):
        node = add_expr(graph, f"chhota udaaharan {i}")
        candidates.append(
            CandidateEdge(
                src=node.id,
                dst=concept.id,
                edge_type=EdgeType.EXPRESSION_CONCEPT,
                score=0.4 + 0.1 * i,
                rationale="r",
                proposer_id="t",
            )
        )
    return graph.export_document(), candidates


class TestSimulateValidation:
    def test_perfect_validators_all_true(self):
        doc, candidates = tiny_candidates()
        truth = frozenset(candidate_key(c.src, c.dst, c.edge_type) for c in candidates)
        rep = simulate_validation(
            SimulationConfig(seed=3, true_edge_keys=truth, validator_accuracy=1.0, policy="random"),
            candidates,
            doc,
        )
        assert rep.accepted_edge_precision == 1.0
        assert rep.accepted_edge_recall == 1.0
        assert rep.f1 == 1.0
        assert rep.decisions_used == 9
        assert rep.decisions_per_accepted_edge == pytest.approx(3.0)

    def test_perfect_validators_empty_truth(self):
        doc, candidates = tiny_candidates()
        rep = simulate_validation(
            SimulationConfig(seed=3, true_edge_keys=frozenset(), validator_accuracy=1.0),
            candidates,
            doc,
        )
        assert rep.decisions_used == 9
        assert rep.accepted_edge_precision == 1.0
        assert rep.accepted_edge_recall == 1.0
        assert rep.decisions_per_accepted_edge == 0.0

    def test_empty_candidates(self):
        doc, _ = tiny_candidates()
        rep = simulate_validation(
            SimulationConfig(seed=3, true_edge_keys=frozenset(), validator_accuracy=1.0),
            [],
            doc,
        )
        assert rep.decisions_used == 0
        assert rep.decisions_per_accepted_edge == 0.0

    def test_truth_must_be_subset_of_candidates(self):
        doc, candidates = tiny_candidates()
        with pytest.raises(ValidationError):
            simulate_validation(
                SimulationConfig(
                    seed=3,
                    true_edge_keys=frozenset({"ghost|conc-000001|ExpressionConcept"}),
                    validator_accuracy=1.0,
                ),
                candidates,
                doc,
            )

    def test_config_validation(self):
        with pytest.raises(ValidationError):
            SimulationConfig(seed=1, true_edge_keys=frozenset(), validator_accuracy=1.5).check()
        with pytest.raises(ValidationError):
            SimulationConfig(
                seed=1, true_edge_keys=frozenset(), validator_accuracy=0.5, policy="greedy"
            ).check()
        with pytest.raises(ValidationError):
            SimulationConfig(
                seed=1, true_edge_keys=frozenset(), validator_accuracy=0.5, target_f1=1.1
            ).check()

    def test_fixed_seed_reproducible(self):
        doc, candidates, truth = simulation_fixture()
        config = SimulationConfig(
            seed=11, true_edge_keys=truth, validator_accuracy=0.8, policy="random",
            target_f1=0.9,
        )
        first = run_simulation(config, candidates, doc)
        second = run_simulation(config, candidates, doc)
        assert canonical_json_bytes(first.report.to_dict()) == canonical_json_bytes(
            second.report.to_dict()
        )
        assert first.curve == second.curve

    def test_fixture_shape(self):
        doc, candidates, truth = simulation_fixture()
        assert len(candidates) == 200
        assert len(truth) == 40
        keys = {candidate_key(c.src, c.dst, c.edge_type) for c in candidates}
        assert truth <= keys
        # Rebuilding gives the identical fixture.
        doc2, candidates2, truth2 = simulation_fixture()
        assert canonical_json_bytes(doc) == canonical_json_bytes(doc2)
        assert candidates == candidates2
        assert truth == truth2

    def test_active_policy_beats_random_on_planted_fixture(self):
        doc, candidates, truth = simulation_fixture()
        active_costs, random_costs = [], []
        for seed in SIMULATION_SEEDS[:5]:
            for policy, bucket in (("active", active_costs), ("random", random_costs)):
                rep = simulate_validation(
                    SimulationConfig(
                        seed=seed,
                        true_edge_keys=truth,
                        validator_accuracy=1.0,
                        policy=policy,
                        target_f1=0.9,
                    ),
                    candidates,
                    doc,
                )
                assert rep.f1 >= 0.9
                bucket.append(rep.decisions_used)
        assert sum(active_costs) / len(active_costs) < sum(random_costs) / len(random_costs)
