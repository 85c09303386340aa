from __future__ import annotations

import io
import itertools
import random

import networkx as nx
import pytest
from conftest import random_graph
from hypothesis import given, settings
from hypothesis import strategies as st

from hetqa.graph import (
    ContextGraph,
    Edge,
    EdgeKind,
    GraphError,
    NodeKind,
    Source,
    edge_cost,
    graph_stats,
    graph_to_dot,
    largest_connected_component,
    mean_stats,
)
from hetqa.ingest.kg import KGFact, Qualifier, TripleStore
from hetqa.xg import wire_fact


def test_entity_weight_is_mean_of_evidences():
    g = ContextGraph()
    a = g.upsert_node("Revenant", NodeKind.ENTITY, 0.4, {"e1"})
    b = g.upsert_node("Revenant", NodeKind.ENTITY, 0.8, {"e2"})
    assert a == b
    assert g.nodes[a].weight == pytest.approx(0.6)
    assert g.nodes[a].provenance == {"e1", "e2"}


def test_predicates_never_merge_across_evidences():
    g = ContextGraph()
    a = g.upsert_node("married", NodeKind.PREDICATE, 0.5, {"e1"})
    b = g.upsert_node("married", NodeKind.PREDICATE, 0.5, {"e2"})
    assert a != b


def test_reinsert_same_evidence_is_idempotent():
    g = ContextGraph()
    a = g.upsert_node("X", NodeKind.ENTITY, 1.0, {"e1"})
    assert g.upsert_node("X", NodeKind.ENTITY, 1.0, {"e1"}) == a
    assert len(g) == 1 and g.nodes[a].weight == 1.0


def test_edge_weight_is_mean():
    g = ContextGraph()
    a = g.upsert_node("A", NodeKind.ENTITY, 1.0)
    b = g.upsert_node("B", NodeKind.ENTITY, 1.0)
    g.upsert_edge(a, b, EdgeKind.TRIPLE, 0.2, {"e1"})
    e = g.upsert_edge(a, b, EdgeKind.TRIPLE, 0.6, {"e2"})
    assert e.weight == pytest.approx(0.4)
    assert len(g.edges) == 1


def test_single_edge_weight_identity():
    g = ContextGraph()
    a = g.upsert_node("A", NodeKind.ENTITY, 1.0)
    b = g.upsert_node("B", NodeKind.ENTITY, 1.0)
    assert g.upsert_edge(a, b, EdgeKind.TRIPLE, 0.9, {"e"}).weight == 0.9


def test_alignment_across_kinds_rejected():
    g = ContextGraph()
    a = g.upsert_node("director", NodeKind.ENTITY, 1.0)
    p = g.upsert_node("director", NodeKind.PREDICATE, 1.0, {"e"})
    with pytest.raises(GraphError):
        g.upsert_edge(a, p, EdgeKind.ALIGNMENT, 0.9)


def test_entity_literal_alignment_allowed():
    g = ContextGraph()
    a = g.upsert_node("2015", NodeKind.ENTITY, 1.0)
    b = g.upsert_node("2015", NodeKind.LITERAL, 1.0)
    assert g.upsert_edge(a, b, EdgeKind.ALIGNMENT, 1.0).kind is EdgeKind.ALIGNMENT


@pytest.mark.parametrize("bad", [-0.1, 1.5, float("nan")])
def test_weight_range_checked(bad):
    g = ContextGraph()
    with pytest.raises(GraphError):
        g.upsert_node("A", NodeKind.ENTITY, bad)


def test_self_loop_and_unknown_node_rejected():
    g = ContextGraph()
    a = g.upsert_node("A", NodeKind.ENTITY, 1.0)
    with pytest.raises(GraphError):
        g.upsert_edge(a, a, EdgeKind.TRIPLE, 1.0)
    with pytest.raises(GraphError):
        g.upsert_edge(a, 99, EdgeKind.TRIPLE, 1.0)


def test_frozen_graph_is_read_only():
    g = ContextGraph().freeze()
    with pytest.raises(GraphError):
        g.upsert_node("A", NodeKind.ENTITY, 1.0)


@pytest.mark.parametrize("w,c", [(1.0, 0.0), (0.3, 0.7), (0.0, 1.0)])
def test_edge_cost(w, c):
    e = Edge(0, 1, EdgeKind.TRIPLE, w, Source.KG)
    assert edge_cost(e) == pytest.approx(c)
    assert e.cost == edge_cost(e)


@given(st.floats(0.0, 1.0))
def test_cost_plus_weight_is_one(w):
    assert Edge(0, 1, EdgeKind.TRIPLE, w, Source.KG).cost + w == pytest.approx(1.0, abs=1e-15)


def _path(g: ContextGraph, labels: list[str]) -> list[int]:
    ids = [g.upsert_node(lbl, NodeKind.ENTITY, 1.0) for lbl in labels]
    for a, b in itertools.pairwise(ids):
        g.upsert_edge(a, b, EdgeKind.TRIPLE, 1.0)
    return ids


def test_lcc_picks_largest():
    g = ContextGraph()
    big = _path(g, list("abcde"))
    _path(g, ["x", "y"])
    assert set(largest_connected_component(g).nodes) == set(big)


def test_lcc_identity_on_connected():
    g = ContextGraph()
    _path(g, list("abc"))
    lcc = largest_connected_component(g)
    assert lcc.to_records() == g.to_records()


def test_lcc_tie_break_smallest_label():
    g = ContextGraph()
    _path(g, ["m", "n", "o"])
    ids = _path(g, ["b", "z", "y"])
    assert set(largest_connected_component(g).nodes) == set(ids)


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 10_000))
def test_lcc_is_a_largest_component(seed):
    rng = random.Random(seed)
    g = ContextGraph()
    n = rng.randint(1, 15)
    ids = [g.upsert_node(f"n{i}", NodeKind.ENTITY, 1.0) for i in range(n)]
    for _ in range(rng.randint(0, n)):
        a, b = rng.sample(ids, 2) if n > 1 else (ids[0], ids[0])
        if a != b:
            g.upsert_edge(a, b, EdgeKind.TRIPLE, 1.0)
    ref = nx.Graph()
    ref.add_nodes_from(ids)
    ref.add_edges_from((e.a, e.b) for e in g.edges.values())
    lcc = largest_connected_component(g)
    sizes = [len(c) for c in nx.connected_components(ref)]
    assert len(lcc) == max(sizes)
    assert nx.is_connected(ref.subgraph(lcc.nodes))


def test_stats_empty_and_single_triple():
    assert graph_stats(ContextGraph()).n_nodes == 0
    assert graph_stats(ContextGraph()).n_edges == 0
    store = TripleStore()
    store.add(KGFact("A", "p", "B"))
    g = ContextGraph()
    wire_fact(g, store, 0, 1.0)
    s = graph_stats(g)
    assert s.nodes["Entity"] == 2 and s.nodes["Predicate"] == 1
    assert s.edges["Triple"] == 2


def test_stats_fact_with_qualifier():
    # S - P - O plus P - qp - qo
    store = TripleStore()
    store.add(KGFact("S", "p", "O", qualifiers=(Qualifier("qp", "QO"),)))
    g = ContextGraph()
    wire_fact(g, store, 0, 1.0)
    s = graph_stats(g)
    assert (s.n_nodes, s.n_edges) == (5, 4)


def test_mean_stats():
    g = ContextGraph()
    _path(g, list("abc"))
    out = mean_stats([graph_stats(g), graph_stats(ContextGraph())])
    assert out["nodes"]["Entity"] == 1.5 and out["edges"]["Triple"] == 1.0


def test_predicate_count_equals_occurrences():
    store = TripleStore()
    facts = [
        KGFact("A", "p", "B"),
        KGFact("A", "p", "C"),
        KGFact("B", "q", "C", qualifiers=(Qualifier("p", "D"), Qualifier("r", "E"))),
    ]
    g = ContextGraph()
    for f in facts:
        wire_fact(g, store, store.add(f), 1.0)
    occurrences = sum(1 + len(f.qualifiers) for f in facts)
    assert graph_stats(g).nodes["Predicate"] == occurrences


def test_union_renumbers_and_keeps_weights():
    g1, g2 = ContextGraph(), ContextGraph()
    _path(g1, ["a", "b"])
    _path(g2, ["a", "c"])
    u, mapping = g1.union(g2)
    assert len(u) == 4
    assert sorted(mapping.values()) == [2, 3]
    assert len(u.edges) == 2


def test_jsonl_round_trip():
    rng = random.Random(3)
    g = random_graph(rng, 8, 4)
    g.add_evidence_score("e1", 0.5)
    buf = io.StringIO()
    g.dump_jsonl(buf)
    buf.seek(0)
    h = ContextGraph.load_jsonl(buf)
    assert h.to_records() == g.to_records()
    assert h.frozen


def test_dot_is_deterministic():
    g = ContextGraph()
    _path(g, ["a", 'b "quoted"', "c"])
    assert graph_to_dot(g) == graph_to_dot(g)
    assert graph_to_dot(g).startswith("graph")
