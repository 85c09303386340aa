"""Word-level normalization shared by scoring, anchoring and alignment.

Everything here is deterministic and dependency-free: a fixed stopword list
shipped with the package, a small suffix-stripping stemmer and character
trigram sets.
"""

from __future__ import annotations

import re
from functools import lru_cache
from importlib import resources

_WORD_RE = re.compile(r"[^\W_]+(?:['’][^\W_]+)*", re.UNICODE)


@lru_cache(maxsize=1)
def stopwords() -> frozenset[str]:
    text = resources.files("hetqa").joinpath("data/stopwords.txt").read_text("utf-8")
    return frozenset(w.strip() for w in text.splitlines() if w.strip())


def normalize(text: str) -> str:
    """Casefold and collapse whitespace."""
    return " ".join(text.casefold().split())


def words(text: str) -> list[str]:
    return [w.casefold() for w in _WORD_RE.findall(text)]


def content_words(text: str) -> list[str]:
    sw = stopwords()
    return [w for w in words(text) if w not in sw]


@lru_cache(maxsize=65536)
def stem(word: str) -> str:
    """Strip common English inflectional suffixes.

    Only needs to be consistent, not linguistically right:
    ``films -> film``, ``directed -> direct``, ``movies -> movy``, ``movie -> movy``.
    """
    w = word.casefold()
    if len(w) <= 3:
        return w
    if w.endswith("ies") and len(w) > 4:
        w = w[:-3] + "y"
    elif w.endswith("ie") and len(w) > 4:
        w = w[:-2] + "y"
    elif w.endswith("s") and not w.endswith(("ss", "us", "is")):
        w = w[:-1]
    for suffix in ("ing", "ed"):
        if w.endswith(suffix) and len(w) - len(suffix) >= 3:
            w = w[: -len(suffix)]
            if len(w) > 3 and w[-1] == w[-2] and w[-1] not in "aeiouls":
                w = w[:-1]
            break
    return w


def stems(text: str) -> set[str]:
    return {stem(w) for w in content_words(text)}


def trigrams(text: str) -> frozenset[str]:
    """Character trigrams of the casefolded string; shorter strings map to themselves."""
    s = normalize(text)
    if not s:
        return frozenset()
    if len(s) < 3:
        return frozenset([s])
    return frozenset(s[i : i + 3] for i in range(len(s) - 2))


def jaccard(a: frozenset[str] | set[str], b: frozenset[str] | set[str]) -> float:
    if not a and not b:
        return 1.0
    union = len(a | b)
    return len(a & b) / union if union else 0.0

