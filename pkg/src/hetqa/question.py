"""Questions as sequences of content tokens and entity-mention phrases."""

from __future__ import annotations

import re
from collections.abc import Iterable, Mapping
from dataclasses import dataclass

from hetqa.lexicon import stopwords as default_stopwords
from hetqa.lexicon import words


class EmptyQuestionError(ValueError):
    pass


@dataclass(frozen=True)
class QuestionToken:
    text: str
    entity: str | None = None  # KG entity from NERD, for mention tokens

    @property
    def is_mention(self) -> bool:
        return self.entity is not None


@dataclass(frozen=True)
class Question:
    raw: str
    tokens: tuple[QuestionToken, ...]
    nerd_entities: tuple[str, ...] = ()
    id: str = ""

    @property
    def surfaces(self) -> list[str]:
        return [t.text for t in self.tokens]


def tokenize_question(
    raw: str,
    nerd: Iterable[Mapping[str, str]] = (),
    stopwords: frozenset[str] | None = None,
    *,
    qid: str = "",
) -> Question:
    """Mention spans become single tokens; other words are lowercased, stopwords dropped."""
    sw = default_stopwords() if stopwords is None else stopwords
    spans: list[tuple[int, int, QuestionToken]] = []
    entities: list[str] = []
    lowered = raw.casefold()
    for ann in nerd:
        mention, entity = ann["mention"], ann.get("entity") or ann["mention"]
        entities.append(entity)
        m = re.search(r"(?<!\w)" + re.escape(mention.casefold()) + r"(?!\w)", lowered)
        if m is None or any(s < m.end() and m.start() < e for s, e, _ in spans):
            continue
        spans.append((m.start(), m.end(), QuestionToken(raw[m.start() : m.end()], entity)))
    cursor = 0
    pieces: list[tuple[int, QuestionToken]] = []
    for s, e, tok in sorted(spans, key=lambda x: x[0]):
        pieces += _plain_tokens(raw[cursor:s], cursor, sw)
        pieces.append((s, tok))
        cursor = e
    pieces += _plain_tokens(raw[cursor:], cursor, sw)
    tokens = tuple(tok for _, tok in sorted(pieces, key=lambda x: x[0]))
    if not tokens:
        raise EmptyQuestionError(f"no content tokens in question {raw!r}")
    return Question(raw, tokens, tuple(dict.fromkeys(entities)), qid)


def _plain_tokens(text: str, offset: int, sw: frozenset[str]) -> list[tuple[int, QuestionToken]]:
    out = []
    pos = 0
    for w in words(text):
        idx = text.casefold().find(w, pos)
        pos = idx + len(w)
        if w not in sw:
            out.append((offset + idx, QuestionToken(w)))
    return out
