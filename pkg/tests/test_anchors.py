from __future__ import annotations

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hetqa.anchors import (
    AnchorGroup,
    NoAnchorsError,
    cap_groups,
    detect_anchors,
    node_matches,
    unmatched_tokens,
)
from hetqa.graph import ContextGraph, NodeKind
from hetqa.lexicon import content_words, stem
from hetqa.question import tokenize_question


def _graph() -> ContextGraph:
    g = ContextGraph()
    g.upsert_node("cast member", NodeKind.PREDICATE, 0.9, {"e1"}, aliases=["starring", "actor"])
    g.upsert_node("2015 American western film", NodeKind.TYPE, 0.5, {"e2"})
    g.upsert_node("Leonardo DiCaprio", NodeKind.ENTITY, 0.7, {"e1"})
    g.upsert_node("type", NodeKind.PREDICATE, 0.5, {"e2"})
    return g


def test_label_and_alias_matching():
    assert node_matches("cast member", ["starring"], "cast")
    assert node_matches("cast member", ["starring"], "starring")
    assert node_matches("cast member", ["starring"], "starred")
    assert not node_matches("cast member", ["starring"], "director")


def test_groups_per_token():
    g = _graph()
    q = tokenize_question(
        "Who was starring in the western with Leo?", [{"mention": "Leo", "entity": "Leonardo DiCaprio"}]
    )
    groups = detect_anchors(g, q)
    by_token = {grp.token: grp.members for grp in groups}
    assert by_token == {"starring": (0,), "western": (1,), "Leo": (2,)}
    assert unmatched_tokens(q, groups) == []


def test_unmatched_token_dropped():
    q = tokenize_question("western zebra")
    groups = detect_anchors(_graph(), q)
    assert [grp.token for grp in groups] == ["western"]
    assert unmatched_tokens(q, groups) == ["zebra"]


def test_no_anchor_raises():
    with pytest.raises(NoAnchorsError):
        detect_anchors(_graph(), tokenize_question("zebra"))


def test_reserved_predicates_never_anchor():
    groups = detect_anchors(_graph(), tokenize_question("type western"))
    assert [grp.token for grp in groups] == ["western"]


def test_node_in_two_groups():
    g = ContextGraph()
    g.upsert_node("western film", NodeKind.TYPE, 1.0)
    groups = detect_anchors(g, tokenize_question("western film"))
    assert [grp.members for grp in groups] == [(0,), (0,)]


def test_cap_keeps_heaviest_groups_in_token_order():
    g = ContextGraph()
    ids = [g.upsert_node(f"n{i}", NodeKind.ENTITY, w) for i, w in enumerate([0.1, 0.9, 0.5, 0.7])]
    groups = [AnchorGroup(i, f"t{i}", (nid,)) for i, nid in enumerate(ids)]
    kept = cap_groups(g, groups, 2)
    assert [grp.token_index for grp in kept] == [1, 3]
    assert cap_groups(g, groups, 10) == groups


def test_group_record_round_trip():
    grp = AnchorGroup(2, "western", (4, 7))
    assert AnchorGroup.from_record(grp.to_record()) == grp


vocab = ["film", "western", "cast", "member", "director", "award", "star", "won"]


@settings(max_examples=60)
@given(
    st.lists(st.lists(st.sampled_from(vocab), min_size=1, max_size=3), min_size=1, max_size=6),
    st.lists(st.sampled_from(vocab), min_size=1, max_size=4),
)
def test_members_genuinely_match_and_are_deterministic(labels, qwords):
    g = ContextGraph()
    for i, ws in enumerate(labels):
        g.upsert_node(" ".join(ws), NodeKind.ENTITY, 1.0, {f"e{i}"})
    q = tokenize_question(" ".join(qwords))
    try:
        groups = detect_anchors(g, q)
    except NoAnchorsError:
        groups = []
    for grp in groups:
        tok = {stem(w) for w in content_words(grp.token)}
        for m in grp.members:
            assert tok <= {stem(w) for w in content_words(g.nodes[m].label)}
    for i, t in enumerate(q.tokens):
        matching = [n for n in sorted(g.nodes) if node_matches(g.nodes[n].label, [], t.text)]
        grp = [x for x in groups if x.token_index == i]
        assert (grp[0].members if grp else ()) == tuple(matching)
    if groups:
        assert detect_anchors(g, q) == groups
