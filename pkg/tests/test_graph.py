"""Graph store behavior: node and edge insertion, invariants, status
transitions, parallel retention, and document round-trips."""

import unicodedata

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from distressgraph import (
    ALLOWED_TRANSITIONS,
    ConflictError,
    Edge,
    EdgeKindError,
    EdgeStatus,
    EdgeType,
    Framework,
    NodeStatus,
    NotFoundError,
    OntologyGraph,
    ParseError,
    PolicyError,
    Provenance,
    SourceKind,
    StateError,
    ValidationError,
    canonical_json_bytes,
)

from conftest import make_annotation, make_provenance


def graph_with_pair():
    g = OntologyGraph()
    a, _ = g.add_expression(
        "man ka bhoj", "hi", make_annotation(), make_provenance()
    )
    b, _ = g.add_expression(
        "dil pe bhaari", "hi", make_annotation(), make_provenance()
    )
    return g, a, b


class TestAddExpression:
    def test_creates_node(self):
        g = OntologyGraph()
        node, created = g.add_expression(
            "man ka bhoj",
            "hi",
            make_annotation(),
            make_provenance(),
            gloss="burden on the mind/heart",
        )
        assert created
        assert node.surface_text == "man ka bhoj"
        assert node.language == "hi"
        assert node.gloss == "burden on the mind/heart"
        assert node.status is NodeStatus.ACTIVE
        assert node.id.startswith("expr-")

    def test_idempotent(self):
        g = OntologyGraph()
        first, _ = g.add_expression("man ka bhoj", "hi", make_annotation(), make_provenance())
        second, created = g.add_expression(
            "man ka bhoj", "hi", make_annotation(), make_provenance()
        )
        assert not created
        assert second.id == first.id
        assert len(g.expressions()) == 1

    def test_empty_text_rejected(self):
        g = OntologyGraph()
        with pytest.raises(ValidationError):
            g.add_expression("", "hi", make_annotation(), make_provenance())
        with pytest.raises(ValidationError):
            g.add_expression("   \t ", "hi", make_annotation(), make_provenance())

    def test_empty_language_rejected(self):
        g = OntologyGraph()
        with pytest.raises(ValidationError):
            g.add_expression("man ka bhoj", "  ", make_annotation(), make_provenance())

    def test_language_lowercased(self):
        g = OntologyGraph()
        first, _ = g.add_expression("man ka bhoj", "HI", make_annotation(), make_provenance())
        assert first.language == "hi"
        second, created = g.add_expression(
            "man ka bhoj", "hi", make_annotation(), make_provenance()
        )
        assert not created and second.id == first.id

    def test_nfc_normalization_deduplicates(self):
        # Same Devanagari letter written precomposed (U+0958) and decomposed.
        composed = "क़abar"
        decomposed = unicodedata.normalize("NFD", composed)
        assert composed != decomposed
        g = OntologyGraph()
        first, _ = g.add_expression(composed, "hi", make_annotation(), make_provenance())
        second, created = g.add_expression(
            decomposed, "hi", make_annotation(), make_provenance()
        )
        assert not created and second.id == first.id

    def test_romanized_and_native_script_stay_distinct(self):
        g = OntologyGraph()
        a, _ = g.add_expression("man ka bhoj", "hi", make_annotation(), make_provenance())
        b, created = g.add_expression("मन का बोझ", "hi", make_annotation(), make_provenance())
        assert created and b.id != a.id

    def test_non_anonymized_real_source_rejected(self):
        g = OntologyGraph()
        raw = make_provenance(anonymized=False)
        with pytest.raises(PolicyError):
            g.add_expression("man ka bhoj", "hi", make_annotation(), raw)
        assert g.expressions() == []

    def test_synthetic_source_may_skip_anonymization(self):
        g = OntologyGraph()
        synthetic = make_provenance(
            source_kind=SourceKind.SYNTHETIC, anonymized=False
        )
        node, created = g.add_expression(
            "simulated phrase", "hi", make_annotation(), synthetic
        )
        assert created

    def test_provisional_status_kept(self):
        g = OntologyGraph()
        node, _ = g.add_expression(
            "naya vakya",
            "hi",
            make_annotation(),
            make_provenance(),
            status=NodeStatus.PROVISIONAL,
        )
        assert node.status is NodeStatus.PROVISIONAL
        assert node.provenance is not None


class TestAddConcept:
    def test_creates_node(self):
        g = OntologyGraph()
        node, created = g.add_concept("6B00", Framework.ICD11, "Generalised anxiety disorder")
        assert created
        assert node.code == "6B00"
        assert node.framework is Framework.ICD11
        assert node.id.startswith("conc-")

    def test_idempotent(self):
        g = OntologyGraph()
        first, _ = g.add_concept("6B00", Framework.ICD11, "Generalised anxiety disorder")
        second, created = g.add_concept(
            "6B00", Framework.ICD11, "Generalised anxiety disorder"
        )
        assert not created and second.id == first.id
        assert len(g.concepts()) == 1

    def test_same_code_different_label_conflicts(self):
        g = OntologyGraph()
        g.add_concept("6B00", Framework.ICD11, "Generalised anxiety disorder")
        with pytest.raises(ConflictError):
            g.add_concept("6B00", Framework.ICD11, "Different label")

    def test_same_code_different_framework_is_distinct(self):
        g = OntologyGraph()
        a, _ = g.add_concept("6B00", Framework.ICD11, "Generalised anxiety disorder")
        b, created = g.add_concept("6B00", Framework.CULTURAL, "Some cultural concept")
        assert created and b.id != a.id

    def test_empty_fields_rejected(self):
        g = OntologyGraph()
        with pytest.raises(ValidationError):
            g.add_concept("", Framework.ICD11, "label")
        with pytest.raises(ValidationError):
            g.add_concept("6B00", Framework.ICD11, "   ")

    def test_framework_coerced_from_string(self):
        g = OntologyGraph()
        node, _ = g.add_concept("6B00", "ICD11", "Generalised anxiety disorder")
        assert node.framework is Framework.ICD11


class TestAddEdge:
    def test_intra_lingual_accepted(self):
        g, a, b = graph_with_pair()
        edge, created = g.add_edge(
            a.id, b.id, EdgeType.INTRA_LINGUAL, 0.8, "related idioms", make_provenance()
        )
        assert created
        assert edge.status is EdgeStatus.PROPOSED
        assert edge.model_confidence == 0.8

    def test_cross_lingual_same_language_rejected(self):
        g, a, b = graph_with_pair()
        with pytest.raises(EdgeKindError):
            g.add_edge(a.id, b.id, EdgeType.CROSS_LINGUAL, 0.8, "r", make_provenance())

    def test_cross_lingual_different_language_accepted(self):
        g, a, _ = graph_with_pair()
        kn, _ = g.add_expression(
            "manasinalli bhara", "kn", make_annotation(), make_provenance()
        )
        edge, created = g.add_edge(
            a.id, kn.id, EdgeType.CROSS_LINGUAL, 0.7, "parallel idiom", make_provenance()
        )
        assert created

    def test_expression_concept_edge(self):
        g = OntologyGraph()
        expr, _ = g.add_expression(
            "mujhe ghabraahat mehsoos ho rhi hai",
            "hi",
            make_annotation(),
            make_provenance(),
        )
        concept, _ = g.add_concept("6B00", Framework.ICD11, "Generalised anxiety disorder")
        edge, created = g.add_edge(
            expr.id,
            concept.id,
            EdgeType.EXPRESSION_CONCEPT,
            0.75,
            "anxiety-related symptom expression",
            make_provenance(),
        )
        assert created and edge.status is EdgeStatus.PROPOSED

    def test_concept_as_source_rejected(self):
        g = OntologyGraph()
        expr, _ = g.add_expression("kuch", "hi", make_annotation(), make_provenance())
        concept, _ = g.add_concept("6B00", Framework.ICD11, "Generalised anxiety disorder")
        with pytest.raises(EdgeKindError):
            g.add_edge(
                concept.id, expr.id, EdgeType.EXPRESSION_CONCEPT, 0.5, "r", make_provenance()
            )

    def test_expression_pair_cannot_be_concept_edge(self):
        g, a, b = graph_with_pair()
        with pytest.raises(EdgeKindError):
            g.add_edge(a.id, b.id, EdgeType.EXPRESSION_CONCEPT, 0.5, "r", make_provenance())

    def test_concept_endpoints_cannot_be_intra_lingual(self):
        g = OntologyGraph()
        expr, _ = g.add_expression("kuch", "hi", make_annotation(), make_provenance())
        concept, _ = g.add_concept("6B00", Framework.ICD11, "Generalised anxiety disorder")
        with pytest.raises(EdgeKindError):
            g.add_edge(
                expr.id, concept.id, EdgeType.INTRA_LINGUAL, 0.5, "r", make_provenance()
            )

    @pytest.mark.parametrize("value", [-0.1, 1.2, 7.0])
    def test_confidence_out_of_range(self, value):
        g, a, b = graph_with_pair()
        with pytest.raises(ValidationError):
            g.add_edge(a.id, b.id, EdgeType.INTRA_LINGUAL, value, "r", make_provenance())

    def test_unknown_endpoint(self):
        g, a, _ = graph_with_pair()
        with pytest.raises(NotFoundError):
            g.add_edge(a.id, "expr-999999", EdgeType.INTRA_LINGUAL, 0.5, "r", make_provenance())

    def test_idempotent_on_src_dst_type(self):
        g, a, b = graph_with_pair()
        first, _ = g.add_edge(a.id, b.id, EdgeType.INTRA_LINGUAL, 0.8, "r1", make_provenance())
        second, created = g.add_edge(
            a.id, b.id, EdgeType.INTRA_LINGUAL, 0.9, "r2", make_provenance()
        )
        assert not created and second.id == first.id
        assert len(g.edges()) == 1


class TestStatusTransitions:
    def seeded_edge(self, status=EdgeStatus.PROPOSED):
        g, a, b = graph_with_pair()
        edge, _ = g.add_edge(a.id, b.id, EdgeType.INTRA_LINGUAL, 0.8, "r", make_provenance())
        if status is not EdgeStatus.PROPOSED:
            g.insert_edge(
                Edge(
                    id="edge-990001",
                    src=a.id,
                    dst=b.id,
                    edge_type=EdgeType.CROSS_LINGUAL if False else EdgeType.INTRA_LINGUAL,
                    status=status,
                    model_confidence=0.8,
                    rationale="seeded",
                    provenance=make_provenance(),
                )
            )
            return g, "edge-990001"
        return g, edge.id

    def test_validation_chain(self):
        g, edge_id = self.seeded_edge()
        g.set_edge_status(edge_id, EdgeStatus.UNDER_VALIDATION)
        updated = g.set_edge_status(edge_id, EdgeStatus.ACCEPTED)
        assert updated.status is EdgeStatus.ACCEPTED

    def test_illegal_jump_rejected(self):
        g, edge_id = self.seeded_edge()
        with pytest.raises(StateError):
            g.set_edge_status(edge_id, EdgeStatus.ACCEPTED)
        assert g.edge(edge_id).status is EdgeStatus.PROPOSED

    def test_transition_log_records_moves(self):
        g, edge_id = self.seeded_edge()
        g.set_edge_status(edge_id, EdgeStatus.UNDER_VALIDATION)
        g.set_edge_status(edge_id, EdgeStatus.REJECTED)
        assert g.transition_log == [
            (edge_id, EdgeStatus.PROPOSED, EdgeStatus.UNDER_VALIDATION),
            (edge_id, EdgeStatus.UNDER_VALIDATION, EdgeStatus.REJECTED),
        ]

    def test_exhaustive_against_transition_table(self):
        # Every (from, to) pair behaves exactly as the table says.
        for start in EdgeStatus:
            for target in EdgeStatus:
                g, edge_id = self.seeded_edge(start)
                if (start, target) in ALLOWED_TRANSITIONS:
                    assert g.set_edge_status(edge_id, target).status is target
                else:
                    with pytest.raises(StateError):
                        g.set_edge_status(edge_id, target)

    def test_update_edge_refuses_status(self):
        g, edge_id = self.seeded_edge()
        with pytest.raises(ValidationError):
            g.update_edge(edge_id, status=EdgeStatus.ACCEPTED)


class TestRetainParallel:
    def adjudicated_pair(self):
        g = OntologyGraph()
        expr, _ = g.add_expression(
            "dil bhaari hai", "hi", make_annotation(), make_provenance()
        )
        c1, _ = g.add_concept("6B00", Framework.ICD11, "Generalised anxiety disorder")
        c2, _ = g.add_concept("CCS-01", Framework.CULTURAL, "Idioms of distress")
        ids = []
        for concept in (c1, c2):
            edge, _ = g.add_edge(
                expr.id, concept.id, EdgeType.EXPRESSION_CONCEPT, 0.6, "r", make_provenance()
            )
            g.set_edge_status(edge.id, EdgeStatus.UNDER_VALIDATION)
            g.set_edge_status(edge.id, EdgeStatus.ADJUDICATION)
            ids.append(edge.id)
        return g, ids

    def test_two_interpretations_retained(self):
        g, ids = self.adjudicated_pair()
        group = g.retain_parallel(ids, ["clinical reading", "cultural reading"])
        first, second = (g.edge(i) for i in ids)
        assert first.status is EdgeStatus.PARALLEL_RETAINED
        assert second.status is EdgeStatus.PARALLEL_RETAINED
        assert first.parallel_group == second.parallel_group == group
        assert first.parallel_reason == "clinical reading"
        assert second.parallel_reason == "cultural reading"

    def test_single_edge_rejected(self):
        g, ids = self.adjudicated_pair()
        with pytest.raises(ValidationError):
            g.retain_parallel(ids[:1], ["only one"])

    def test_reason_count_must_match(self):
        g, ids = self.adjudicated_pair()
        with pytest.raises(ValidationError):
            g.retain_parallel(ids, ["just one reason"])

    def test_mixed_sources_rejected(self):
        g, ids = self.adjudicated_pair()
        other, _ = g.add_expression("alag baat", "hi", make_annotation(), make_provenance())
        c3, _ = g.add_concept("6A70", Framework.ICD11, "Single episode depressive disorder")
        edge, _ = g.add_edge(
            other.id, c3.id, EdgeType.EXPRESSION_CONCEPT, 0.6, "r", make_provenance()
        )
        g.set_edge_status(edge.id, EdgeStatus.UNDER_VALIDATION)
        g.set_edge_status(edge.id, EdgeStatus.ADJUDICATION)
        with pytest.raises(ValidationError):
            g.retain_parallel(ids + [edge.id], ["a", "b", "c"])

    def test_non_adjudicated_edge_rejected(self):
        g, ids = self.adjudicated_pair()
        expr = g.edge(ids[0]).src
        c3, _ = g.add_concept("6A70", Framework.ICD11, "Single episode depressive disorder")
        fresh, _ = g.add_edge(
            expr, c3.id, EdgeType.EXPRESSION_CONCEPT, 0.6, "r", make_provenance()
        )
        with pytest.raises(StateError):
            g.retain_parallel(ids + [fresh.id], ["a", "b", "c"])


class TestNeighbors:
    def test_isolated_node(self):
        g, a, _ = graph_with_pair()
        assert g.neighbors(a.id) == []

    def test_type_filter(self):
        g, a, b = graph_with_pair()
        concept, _ = g.add_concept("6B00", Framework.ICD11, "Generalised anxiety disorder")
        g.add_edge(a.id, b.id, EdgeType.INTRA_LINGUAL, 0.8, "r", make_provenance())
        concept_edge, _ = g.add_edge(
            a.id, concept.id, EdgeType.EXPRESSION_CONCEPT, 0.7, "r", make_provenance()
        )
        got = g.neighbors(a.id, edge_type=EdgeType.EXPRESSION_CONCEPT)
        assert [(e.id, n.id) for e, n in got] == [(concept_edge.id, concept.id)]

    def test_status_filter_excludes_proposed(self):
        g, a, b = graph_with_pair()
        g.add_edge(a.id, b.id, EdgeType.INTRA_LINGUAL, 0.8, "r", make_provenance())
        assert g.neighbors(a.id, statuses={EdgeStatus.ACCEPTED}) == []

    def test_symmetric_visibility(self):
        g, a, b = graph_with_pair()
        edge, _ = g.add_edge(a.id, b.id, EdgeType.INTRA_LINGUAL, 0.8, "r", make_provenance())
        assert [n.id for _, n in g.neighbors(b.id)] == [a.id]

    def test_unknown_node(self):
        g = OntologyGraph()
        with pytest.raises(NotFoundError):
            g.neighbors("expr-000404")

    def test_ordered_by_edge_id(self):
        g, a, b = graph_with_pair()
        c, _ = g.add_expression("teesri baat", "hi", make_annotation(), make_provenance())
        e1, _ = g.add_edge(a.id, b.id, EdgeType.INTRA_LINGUAL, 0.8, "r", make_provenance())
        e2, _ = g.add_edge(a.id, c.id, EdgeType.INTRA_LINGUAL, 0.8, "r", make_provenance())
        assert [e.id for e, _ in g.neighbors(a.id)] == sorted([e1.id, e2.id])


class TestDocumentRoundTrip:
    def test_empty_graph(self):
        g = OntologyGraph()
        doc = g.export_document()
        assert doc == {"expressions": [], "concepts": [], "edges": []}
        again = OntologyGraph.from_document(doc).export_document()
        assert again == doc

    def test_three_nodes_two_edges(self):
        g, a, b = graph_with_pair()
        concept, _ = g.add_concept("6B00", Framework.ICD11, "Generalised anxiety disorder")
        g.add_edge(a.id, b.id, EdgeType.INTRA_LINGUAL, 0.8, "related", make_provenance())
        g.add_edge(
            a.id, concept.id, EdgeType.EXPRESSION_CONCEPT, 0.7, "maps", make_provenance()
        )
        doc = g.export_document()
        restored = OntologyGraph.from_document(doc)
        assert restored.export_document() == doc
        assert [n.id for n in restored.expressions()] == [a.id, b.id]
        assert len(restored.edges()) == 2

    def test_byte_stable_round_trip(self):
        g, a, b = graph_with_pair()
        g.add_edge(a.id, b.id, EdgeType.INTRA_LINGUAL, 0.8, "related", make_provenance())
        first = canonical_json_bytes(g.export_document())
        second = canonical_json_bytes(
            OntologyGraph.from_document(g.export_document()).export_document()
        )
        assert first == second

    def test_dangling_endpoint_named(self):
        g, a, b = graph_with_pair()
        edge, _ = g.add_edge(a.id, b.id, EdgeType.INTRA_LINGUAL, 0.8, "r", make_provenance())
        doc = g.export_document()
        doc["expressions"] = doc["expressions"][:1]
        with pytest.raises(ParseError) as excinfo:
            OntologyGraph.from_document(doc)
        assert edge.id in str(excinfo.value)
        assert b.id in str(excinfo.value)

    def test_missing_section(self):
        with pytest.raises(ParseError):
            OntologyGraph.from_document({"expressions": [], "concepts": []})

    def test_non_object_document(self):
        with pytest.raises(ParseError):
            OntologyGraph.from_document([1, 2, 3])

    def test_integrity_scan_clean_after_operations(self):
        g, ids = TestRetainParallel().adjudicated_pair()
        g.retain_parallel(ids, ["a", "b"])
        assert g.integrity_problems() == []


# Random operation sequences: whatever we do, referential integrity and
# idempotency must survive, and the export must round-trip byte-stably.

op_strategy = st.lists(
    st.tuples(
        st.sampled_from(["expr", "concept", "edge", "advance"]),
        st.integers(min_value=0, max_value=5),
        st.integers(min_value=0, max_value=5),
    ),
    min_size=1,
    max_size=30,
)


@settings(max_examples=60, deadline=None)
@given(ops=op_strategy)
def test_random_operation_sequences_preserve_invariants(ops):
    g = OntologyGraph()
    languages = ["hi", "kn", "mr"]
    forward = [
        EdgeStatus.UNDER_VALIDATION,
        EdgeStatus.ADJUDICATION,
        EdgeStatus.PARALLEL_RETAINED,
    ]
    for kind, i, j in ops:
        if kind == "expr":
            g.add_expression(
                f"vakya {i}", languages[i % 3], make_annotation(), make_provenance()
            )
        elif kind == "concept":
            g.add_concept(f"C{i:02d}", Framework.ICD11, f"Concept {i}")
        elif kind == "edge":
            exprs = g.expressions()
            concepts = g.concepts()
            if exprs and concepts:
                src = exprs[i % len(exprs)]
                dst = concepts[j % len(concepts)]
                g.add_edge(
                    src.id,
                    dst.id,
                    EdgeType.EXPRESSION_CONCEPT,
                    (i + 1) / 6,
                    "generated",
                    make_provenance(),
                )
        elif kind == "advance":
            edges = g.edges()
            if edges:
                edge = edges[i % len(edges)]
                for target in forward:
                    if (edge.status, target) in ALLOWED_TRANSITIONS:
                        g.set_edge_status(edge.id, target)
                        break

    assert g.integrity_problems() == []

    # Idempotency: replaying identical node inserts never grows the graph.
    n_expr, n_conc, n_edge = len(g.expressions()), len(g.concepts()), len(g.edges())
    for node in g.expressions():
        g.add_expression(node.surface_text, node.language, node.annotation, node.provenance)
    for node in g.concepts():
        g.add_concept(node.code, node.framework, node.label)
    assert (len(g.expressions()), len(g.concepts()), len(g.edges())) == (
        n_expr,
        n_conc,
        n_edge,
    )

    doc = g.export_document()
    assert canonical_json_bytes(OntologyGraph.from_document(doc).export_document()) == (
        canonical_json_bytes(doc)
    )
