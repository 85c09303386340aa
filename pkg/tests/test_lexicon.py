from __future__ import annotations

from hypothesis import given
from hypothesis import strategies as st

from hetqa.lexicon import (
    content_words,
    jaccard,
    normalize,
    stem,
    stems,
    stopwords,
    trigrams,
)

text = st.text(alphabet=st.characters(codec="utf-8", categories=("L", "Zs")), max_size=30)


def test_stopwords_loaded():
    sw = stopwords()
    assert {"the", "of", "a"} <= sw
    assert "director" not in sw


def test_content_words_drop_stopwords():
    assert content_words("director of the western") == ["director", "western"]


def test_stem_examples():
    assert stem("films") == "film"
    assert stem("directed") == "direct"
    assert stem("movies") == stem("movie")
    assert stem("starring") == stem("starred") == "star"
    assert stem("is") == "is"


def test_stems_are_casefolded():
    assert stems("Directed FILMS") == {"direct", "film"}


def test_trigrams_spec_example():
    assert trigrams("Leo") == {"leo"}
    assert trigrams("Leonardo") == {"leo", "eon", "ona", "nar", "ard", "rdo"}
    assert jaccard(trigrams("Leo"), trigrams("Leonardo")) == 1 / 6


def test_trigrams_short_and_empty():
    assert trigrams("ab") == {"ab"}
    assert trigrams("   ") == frozenset()


@given(text, text)
def test_jaccard_symmetric_and_bounded(a, b):
    ta, tb = trigrams(a), trigrams(b)
    j = jaccard(ta, tb)
    assert j == jaccard(tb, ta)
    assert 0.0 <= j <= 1.0
    assert (j == 1.0) == (ta == tb)


@given(text)
def test_normalize_idempotent(s):
    assert normalize(normalize(s)) == normalize(s)


@given(st.from_regex(r"[a-z]{1,12}", fullmatch=True))
def test_stem_idempotent_on_stems_prefix(w):
    s = stem(w)
    assert s and len(s) <= len(w) + 1
