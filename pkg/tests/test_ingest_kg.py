from __future__ import annotations

import io
import json
from collections import deque

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hetqa.graph import NodeKind
from hetqa.ingest.kg import (
    FormatError,
    KGFact,
    Qualifier,
    TripleStore,
    kg_shortest_path,
    load_kg_facts,
    one_hop_facts,
    type_facts,
    verbalize_fact,
)

names = st.sampled_from(["A", "B", "C", "D", "E", "F"])


@st.composite
def facts(draw):
    quals = draw(st.lists(st.tuples(st.sampled_from(["q1", "q2"]), names), max_size=2))
    return KGFact(
        draw(names), draw(st.sampled_from(["p", "r"])), draw(names),
        qualifiers=tuple(Qualifier(p, o) for p, o in quals),
    )


def _store(fs) -> TripleStore:
    store = TripleStore()
    for f in fs:
        store.add(f)
    return store


def test_empty_input_gives_empty_store():
    assert len(load_kg_facts([])) == 0


def test_one_fact_one_hop():
    store = load_kg_facts([json.dumps({"s": "A", "p": "p", "o": "B"})])
    assert one_hop_facts(store, "A") == [KGFact("A", "p", "B")]


def test_round_trip_with_two_qualifiers():
    f = KGFact(
        "The Revenant", "award received", "Academy Award", NodeKind.ENTITY,
        (Qualifier("point in time", "2016", NodeKind.LITERAL), Qualifier("winner", "Leonardo DiCaprio")),
    )
    store = _store([f])
    store.add_aliases("Academy Award", ["Oscar"])
    buf = io.StringIO()
    store.dump_jsonl(buf)
    again = load_kg_facts(buf.getvalue().splitlines())
    assert again.facts == [f]
    assert again.aliases == {"Academy Award": frozenset({"Oscar"})}


@pytest.mark.parametrize(
    "line,lineno",
    [("not json", 2), (json.dumps({"s": "A"}), 2), (json.dumps([1, 2]), 2), (json.dumps({"s": "", "p": "p", "o": "B"}), 2)],
)
def test_malformed_lines_report_line_number(line, lineno):
    with pytest.raises(FormatError) as err:
        load_kg_facts([json.dumps({"s": "A", "p": "p", "o": "B"}), line])
    assert err.value.lineno == lineno


def test_unknown_entity_and_qualifier_object():
    store = _store([KGFact("A", "p", "B", qualifiers=(Qualifier("q", "Z"),))])
    assert one_hop_facts(store, "nobody") == []
    assert len(one_hop_facts(store, "Z")) == 1


def test_self_loop_returned_once():
    store = _store([KGFact("A", "same as", "A")])
    assert len(one_hop_facts(store, "A")) == 1


@settings(max_examples=60)
@given(st.lists(facts(), max_size=8), names)
def test_one_hop_equals_brute_force(fs, ent):
    store = _store(fs)
    expect = [
        f for f in fs if ent in (f.subject, f.object) or any(q.object == ent for q in f.qualifiers)
    ]
    assert one_hop_facts(store, ent) == expect


def test_type_facts_rule():
    store = _store([
        KGFact("The Revenant", "instanceOf", "film", NodeKind.TYPE),
        KGFact("Tom", "occupation", "actor", NodeKind.TYPE),
        KGFact("Leo", "instanceOf", "human", NodeKind.TYPE),
        KGFact("Leo", "occupation", "actor", NodeKind.TYPE),
        KGFact("Leo", "award received", "Oscar"),
    ])
    assert [f.object for f in type_facts(store, "The Revenant")] == ["film"]
    assert type_facts(store, "Tom") == []
    assert [f.object for f in type_facts(store, "Leo")] == ["human", "actor"]
    assert type_facts(store, "Oscar") == []


def _bfs_hops(fs, a, b):
    """Reference fewest-fact distance over the subject/object/qualifier-object hypergraph."""
    dist = {a: 0}
    queue = deque([a])
    while queue:
        cur = queue.popleft()
        for f in fs:
            members = f.entity_members()
            if cur in members:
                for m in members:
                    if m not in dist:
                        dist[m] = dist[cur] + 1
                        queue.append(m)
    return dist.get(b)


def test_shortest_path_examples():
    store = _store([KGFact("A", "p", "B"), KGFact("B", "p", "C"), KGFact("A", "r", "X")])
    assert kg_shortest_path(store, "A", "A") == []
    assert kg_shortest_path(store, "A", "B") == [KGFact("A", "p", "B")]
    assert kg_shortest_path(store, "A", "C") == [KGFact("A", "p", "B"), KGFact("B", "p", "C")]
    assert kg_shortest_path(store, "A", "nowhere") == []


@settings(max_examples=80)
@given(st.lists(facts(), max_size=10), names, names)
def test_shortest_path_is_minimal(fs, a, b):
    store = _store(fs)
    path = kg_shortest_path(store, a, b)
    hops = _bfs_hops(fs, a, b) if a != b else 0
    if a == b or hops is None:
        assert path == []
        return
    assert len(path) == hops
    # consecutive facts chain from a to b
    cur = {a}
    for f in path:
        members = set(f.entity_members())
        assert cur & members
        cur = members
    assert b in cur


def test_verbalize_examples():
    f = KGFact(
        "The Revenant", "nominated for", "Academy Award for Best Director",
        qualifiers=(Qualifier("nominee", "Alejandro González Iñárritu"),),
    )
    assert verbalize_fact(f) == (
        "The Revenant nominated for Academy Award for Best Director"
        " and nominee Alejandro González Iñárritu."
    )
    assert verbalize_fact(KGFact("S", "P", "O")) == "S P O."
    two = KGFact("S", "P", "O", qualifiers=(Qualifier("q1", "x"), Qualifier("q2", "y")))
    assert verbalize_fact(two) == "S P O and q1 x and q2 y."


word = st.from_regex(r"[A-Za-z]{1,6}", fullmatch=True)


@given(
    st.tuples(word, word, word, st.lists(st.tuples(word, word), max_size=2)),
    st.tuples(word, word, word, st.lists(st.tuples(word, word), max_size=2)),
)
def test_verbalize_injective_on_tokenized_inputs(x, y):
    def fact(t):
        return KGFact(t[0], t[1], t[2], qualifiers=tuple(Qualifier(p, o) for p, o in t[3]))

    # single-word fields: token positions identify every field
    fx, fy = fact(x), fact(y)
    assert (fx == fy) == (verbalize_fact(fx) == verbalize_fact(fy))
