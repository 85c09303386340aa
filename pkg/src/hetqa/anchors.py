"""Anchor detection: graph nodes matching question tokens, grouped per token."""

from __future__ import annotations

from collections.abc import Sequence
from dataclasses import dataclass

from hetqa.graph import ContextGraph
from hetqa.lexicon import content_words, stem, words
from hetqa.question import Question, tokenize_question
from hetqa.xg import RESERVED_PREDICATES


class NoAnchorsError(ValueError):
    """No question token matched any node of the graph."""


@dataclass(frozen=True)
class AnchorGroup:
    token_index: int
    token: str
    members: tuple[int, ...]

    def to_record(self) -> dict:
        return {"token_index": self.token_index, "token": self.token, "members": list(self.members)}

    @classmethod
    def from_record(cls, rec: dict) -> AnchorGroup:
        return cls(rec["token_index"], rec["token"], tuple(rec["members"]))


def _stem_set(text: str) -> frozenset[str]:
    return frozenset(stem(w) for w in words(text))


def token_stems(token: str) -> frozenset[str]:
    return frozenset(stem(w) for w in (content_words(token) or words(token)))


def node_matches(label: str, aliases: Sequence[str], token: str) -> bool:
    """True if all content words of ``token`` occur in the label or in one alias."""
    q = token_stems(token)
    if not q:
        return False
    return any(q <= _stem_set(s) for s in (label, *aliases))


def detect_anchors(graph: ContextGraph, question: Question) -> list[AnchorGroup]:
    """One group per question token with at least one matching node.

    Mention tokens also match nodes labelled with their NERD entity exactly.
    Tokens without matches are dropped; if nothing matches at all,
    :class:`NoAnchorsError` is raised.
    """
    index = []
    for nid in sorted(graph.nodes):
        node = graph.nodes[nid]
        if node.label.casefold() in RESERVED_PREDICATES:
            continue
        sets = [_stem_set(node.label)] + [_stem_set(a) for a in sorted(node.aliases)]
        index.append((nid, node.label, sets))

    groups = []
    for i, tok in enumerate(question.tokens):
        q = token_stems(tok.text)
        members = []
        for nid, label, sets in index:
            if tok.entity is not None and label == tok.entity or q and any(q <= s for s in sets):
                members.append(nid)
        if members:
            groups.append(AnchorGroup(i, tok.text, tuple(members)))
    if not groups:
        raise NoAnchorsError(f"no anchors for question {question.raw!r}")
    return groups


def unmatched_tokens(question: Question, groups: Sequence[AnchorGroup]) -> list[str]:
    hit = {g.token_index for g in groups}
    return [t.text for i, t in enumerate(question.tokens) if i not in hit]


def cap_groups(graph: ContextGraph, groups: Sequence[AnchorGroup], cap: int) -> list[AnchorGroup]:
    """Keep the ``cap`` groups whose best anchor weighs most, in token order."""
    if len(groups) <= cap:
        return list(groups)
    ranked = sorted(
        groups,
        key=lambda g: (-max(graph.nodes[m].weight for m in g.members), g.token_index),
    )
    return sorted(ranked[:cap], key=lambda g: g.token_index)


__all__ = [
    "AnchorGroup",
    "NoAnchorsError",
    "cap_groups",
    "detect_anchors",
    "node_matches",
    "tokenize_question",
    "unmatched_tokens",
]
