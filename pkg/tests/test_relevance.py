from __future__ import annotations

import io
import itertools
import json

import pytest
from hypothesis import given
from hypothesis import strategies as st

from hetqa.graph import Source
from hetqa.ingest.evidence import Evidence
from hetqa.ingest.kg import KGFact
from hetqa.ingest.text import Snippet
from hetqa.question import EmptyQuestionError, tokenize_question
from hetqa.relevance import (
    EXTERNAL,
    MissingScoreError,
    ScorerSpec,
    lexical_score,
    load_external_scores,
    score_all,
    score_evidence,
    select_top_evidences,
)


def kg_ev(i: int, score: float | None = None) -> Evidence:
    return Evidence(f"kg:{i}", Source.KG, KGFact("A", "p", "B"), "A p B.", score)


def text_ev(i: int, score: float | None = None) -> Evidence:
    return Evidence(f"d:{i}-{i + 1}", Source.TEXT, Snippet("d", i, i + 1), "x", score)


# -- question tokens ----------------------------------------------------------------


def test_question_stopwords_removed():
    q = tokenize_question("director of the western")
    assert q.surfaces == ["director", "western"]


def test_question_mentions_kept_whole():
    q = tokenize_question("Leo won an Oscar", [{"mention": "Leo", "entity": "Leonardo DiCaprio"}])
    assert q.surfaces == ["Leo", "won", "oscar"]
    assert q.tokens[0].entity == "Leonardo DiCaprio" and q.tokens[0].is_mention
    assert q.nerd_entities == ("Leonardo DiCaprio",)


def test_all_stopword_question_rejected():
    with pytest.raises(EmptyQuestionError):
        tokenize_question("what is the")


# -- scoring ------------------------------------------------------------------


def test_lexical_score_examples():
    q = tokenize_question("director western film award")
    assert lexical_score(q, "award director film western extra") == 1.0
    assert lexical_score(q, "nothing relevant") == 0.0
    assert lexical_score(q, "the directors of films") == 0.5


def test_mention_contributes_entity_label():
    q = tokenize_question("Leo won", [{"mention": "Leo", "entity": "Leonardo DiCaprio"}])
    # stems {leo, leonardo, dicaprio, won}
    assert lexical_score(q, "Leonardo DiCaprio won") == 0.75
    assert lexical_score(q, "Leo won") == 0.5


words = st.lists(st.sampled_from(["director", "western", "film", "oscar", "won", "actor"]), min_size=1, max_size=5)


@given(words, st.randoms(use_true_random=False), st.text(max_size=40))
def test_lexical_symmetric_under_reordering_and_stopwords(ws, rnd, text):
    q1 = tokenize_question(" ".join(ws))
    shuffled = list(ws)
    rnd.shuffle(shuffled)
    q2 = tokenize_question("the " + " of ".join(shuffled) + " a")
    s = lexical_score(q1, text)
    assert s == lexical_score(q2, text)
    assert 0.0 <= s <= 1.0


def test_external_scores():
    q = tokenize_question("film")
    spec = ScorerSpec(EXTERNAL, {"kg:0": 0.25})
    assert score_evidence(q, kg_ev(0), spec) == 0.25
    with pytest.raises(MissingScoreError):
        score_evidence(q, kg_ev(1), spec)
    assert [e.score for e in score_all(q, [kg_ev(0)], spec)] == [0.25]


def test_load_external_scores():
    fh = io.StringIO(json.dumps({"evidence_id": "kg:3", "score": 0.5}) + "\n\n")
    assert load_external_scores(fh) == {"kg:3": 0.5}
    with pytest.raises(ValueError):
        load_external_scores([json.dumps({"evidence_id": "x", "score": 2})])


def test_unknown_scorer_kind():
    with pytest.raises(ValueError):
        ScorerSpec("bert")


# -- selection ----------------------------------------------------------------


def test_select_keeps_all_when_few():
    evs = [kg_ev(i, 0.1 * i) for i in range(3)]
    assert len(select_top_evidences(evs, 5)) == 3


def test_select_tie_broken_by_id():
    evs = [kg_ev(0, 0.9), kg_ev(10, 0.5), kg_ev(2, 0.5), kg_ev(3, 0.1)]
    assert [e.id for e in select_top_evidences(evs, 2)] == ["kg:0", "kg:2"]


def test_select_per_source():
    evs = [kg_ev(i, 0.5) for i in range(8)] + [text_ev(i, 0.4) for i in range(8)]
    out = select_top_evidences(evs, 5)
    assert len(out) == 10
    assert sum(e.source is Source.KG for e in out) == 5


@given(st.lists(st.floats(0, 1), max_size=20), st.integers(1, 6))
def test_select_sorted_and_bounded(scores, eps):
    evs = [kg_ev(i, s) if i % 2 else text_ev(i, s) for i, s in enumerate(scores)]
    out = select_top_evidences(evs, eps)
    assert len(out) <= 2 * eps
    assert all(a.score >= b.score for a, b in itertools.pairwise(out))
    for source in Source:
        pool = sorted((e.score for e in evs if e.source is source), reverse=True)
        picked = sorted((e.score for e in out if e.source is source), reverse=True)
        assert picked == pool[:eps]


def test_with_score_range():
    with pytest.raises(ValueError):
        kg_ev(0).with_score(1.5)
