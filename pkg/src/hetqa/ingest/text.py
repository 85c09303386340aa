"""Tagged documents, snippet windows and pattern-based triple extraction."""

from __future__ import annotations

import json
import re
from collections.abc import Iterable, Sequence
from dataclasses import dataclass, field, replace
from itertools import combinations, pairwise

from hetqa.lexicon import stem, words

POS_TAGS = frozenset({"NOUN", "VERB", "ADJ", "ADP", "NUM", "PRON", "DET", "OTHER"})
ENTITY_POS = frozenset({"NOUN", "ADJ", "NUM"})
PRONOUNS = frozenset({"he", "him", "his", "she", "her", "hers"})
COOCCURS = "cooccurs"
TYPE = "type"
# quantifier-like adjectives that never start or extend an entity phrase
_NON_ENTITY_WORDS = frozenset({"other", "such", "many", "several", "some", "various"})


@dataclass(frozen=True)
class Token:
    surface: str
    pos: str = "OTHER"
    ner: str | None = None

    def __post_init__(self) -> None:
        if self.pos not in POS_TAGS:
            object.__setattr__(self, "pos", _map_pos(self.pos))


_POS_MAP = {
    "PROPN": "NOUN",
    "AUX": "VERB",
    "NUM": "NUM",
    "CONJ": "OTHER",
    "CCONJ": "OTHER",
    "SCONJ": "OTHER",
    "ADV": "OTHER",
    "PRT": "OTHER",
    "PART": "OTHER",
    "PUNCT": "OTHER",
    "SYM": "OTHER",
    "X": "OTHER",
    ".": "OTHER",
    "INTJ": "OTHER",
}


def _map_pos(tag: str) -> str:
    tag = (tag or "").upper()
    return tag if tag in POS_TAGS else _POS_MAP.get(tag, "OTHER")


@dataclass(frozen=True)
class AnnotatedDocument:
    doc_id: str
    tokens: tuple[Token, ...]
    sentence_starts: tuple[int, ...] = (0,)

    def sentence_spans(self, start: int = 0, end: int | None = None) -> list[tuple[int, int]]:
        """Sentence spans clipped to [start, end)."""
        end = len(self.tokens) if end is None else end
        bounds = list(self.sentence_starts) + [len(self.tokens)]
        spans = []
        for s, e in pairwise(bounds):
            lo, hi = max(s, start), min(e, end)
            if lo < hi:
                spans.append((lo, hi))
        return spans

    def text(self, start: int = 0, end: int | None = None) -> str:
        return " ".join(t.surface for t in self.tokens[start:end])

    def to_record(self) -> dict:
        sents = []
        for s, e in self.sentence_spans():
            sents.append(
                [{"tok": t.surface, "pos": t.pos, "ner": t.ner} for t in self.tokens[s:e]]
            )
        return {"doc_id": self.doc_id, "sentences": sents}


@dataclass(frozen=True)
class Snippet:
    doc_id: str
    start: int
    end: int
    matched: frozenset[str] = frozenset()

    @property
    def id(self) -> str:
        return f"{self.doc_id}:{self.start}-{self.end}"


@dataclass(frozen=True)
class OpenTriple:
    subject: str
    predicate: str
    object: str
    origin: str = ""


@dataclass(frozen=True)
class Phrase:
    kind: str  # "E" or "P"
    start: int
    end: int
    text: str


# -- loading and fallback tagging ---------------------------------------------

_DET = {"a", "an", "the", "this", "that", "these", "those", "every", "each", "no", "any"}
_PRON = {"i", "you", "he", "she", "it", "we", "they", "me", "him", "her", "us", "them",
         "his", "hers", "its", "our", "their", "my", "your", "who", "whom", "which", "what"}
_ADP = {"of", "in", "on", "at", "by", "for", "with", "from", "to", "into", "about", "as",
        "after", "before", "during", "under", "over", "between", "against", "through"}
_VERBS = {"is", "was", "are", "were", "be", "been", "being", "has", "have", "had", "do",
          "does", "did", "won", "wins", "win", "made", "make", "makes", "wrote", "write",
          "writes", "born", "became", "become", "starred", "stars", "directs", "plays",
          "played", "produces", "composed", "received", "founded"}
_OTHER = {"and", "or", "but", "not", "also", "then", "than", "very", "such"}
_ADJ_SUFFIXES = ("al", "ic", "ive", "ous", "ful", "ern", "ish", "ian", "ese", "able")
_TOKEN_RE = re.compile(r"\w+(?:[-'’.]\w+)*|[^\w\s]", re.UNICODE)


def tokenize(text: str) -> list[list[str]]:
    """Split raw text into sentences of word/punctuation tokens."""
    sentences: list[list[str]] = [[]]
    for tok in _TOKEN_RE.findall(text):
        sentences[-1].append(tok)
        if tok in {".", "!", "?"}:
            sentences.append([])
    return [s for s in sentences if s]


def fallback_tag(surfaces: Sequence[str]) -> list[Token]:
    """Crude POS/NER tagging for untagged input.

    Capitalized runs become one MISC mention, closed-class words come from
    fixed lists, and verbs are guessed from -ed/-ing suffixes.
    """
    tags: list[tuple[str, bool]] = []
    for i, s in enumerate(surfaces):
        low = s.lower()
        if not any(c.isalnum() for c in s):
            tags.append(("OTHER", False))
        elif s[0].isdigit():
            tags.append(("NUM", False))
        elif low in _DET:
            tags.append(("DET", False))
        elif low in _PRON:
            tags.append(("PRON", False))
        elif low in _ADP:
            tags.append(("ADP", False))
        elif low in _OTHER:
            tags.append(("OTHER", False))
        elif low in _VERBS:
            tags.append(("VERB", False))
        elif s[0].isupper():
            tags.append(("NOUN", True))
        elif len(low) > 4 and low.endswith(("ed", "ing")):
            tags.append(("VERB", False))
        elif len(low) > 4 and low.endswith(_ADJ_SUFFIXES):
            tags.append(("ADJ", False))
        else:
            tags.append(("NOUN", False))
    return [Token(s, pos, "MISC" if cap else None) for s, (pos, cap) in zip(surfaces, tags)]


def parse_tagged(sentence: str) -> list[dict]:
    """Compact tagged notation ``word/POS`` or ``word/POS/NER`` to token records."""
    out = []
    for item in sentence.split():
        parts = item.rsplit("/", 2) if item.count("/") >= 2 else item.rsplit("/", 1)
        if len(parts) < 2 or not parts[0]:
            raise ValueError(f"bad tagged token {item!r}")
        rec = {"tok": parts[0], "pos": parts[1]}
        if len(parts) == 3:
            rec["ner"] = parts[2]
        out.append(rec)
    return out


def document_from_record(rec: dict) -> AnnotatedDocument:
    doc_id = str(rec["doc_id"])
    if "sentences" in rec:
        raw_sents = [[t["tok"] if isinstance(t, dict) else t for t in s] for s in rec["sentences"]]
        tagged = all(isinstance(t, dict) and t.get("pos") for s in rec["sentences"] for t in s)
    else:
        raw_sents = tokenize(rec["text"])
        tagged = False
    tokens: list[Token] = []
    starts: list[int] = []
    for i, sent in enumerate(raw_sents):
        starts.append(len(tokens))
        if tagged:
            tokens.extend(
                Token(t["tok"], t["pos"], t.get("ner") or None) for t in rec["sentences"][i]
            )
        else:
            tokens.extend(fallback_tag(sent))
    return AnnotatedDocument(doc_id, tuple(tokens), tuple(starts) or (0,))


def load_documents(lines: Iterable[str]) -> dict[str, AnnotatedDocument]:
    docs = {}
    for lineno, line in enumerate(lines, 1):
        if not line.strip():
            continue
        try:
            doc = document_from_record(json.loads(line))
        except (json.JSONDecodeError, KeyError, TypeError) as exc:
            raise ValueError(f"line {lineno}: malformed document ({exc})") from None
        docs[doc.doc_id] = doc
    return docs


# -- snippets ------------------------------------------------------------------


def _match_spans(doc: AnnotatedDocument, question_tokens: Sequence[str]) -> list[tuple[int, int, str]]:
    doc_stems = [stem(t.surface) for t in doc.tokens]
    out = []
    for qt in question_tokens:
        q = [stem(w) for w in words(qt)]
        if not q:
            continue
        for i in range(len(doc_stems) - len(q) + 1):
            if doc_stems[i : i + len(q)] == q:
                out.append((i, i + len(q), qt))
    return sorted(out)


def extract_snippets(
    doc: AnnotatedDocument,
    question_tokens: Sequence[str],
    window: int = 50,
    min_matches: int = 1,
) -> list[Snippet]:
    """Windows of ``window`` tokens either side of each question-token match.

    Overlapping windows are merged. With ``min_matches`` > 1 only snippets
    containing that many distinct question tokens are kept.
    """
    if window < 1:
        raise ValueError("window must be >= 1")
    n = len(doc.tokens)
    merged: list[list] = []
    for i, j, qt in _match_spans(doc, question_tokens):
        lo, hi = max(0, i - window), min(n, j + window)
        if merged and lo < merged[-1][1]:
            merged[-1][1] = max(merged[-1][1], hi)
            merged[-1][2].add(qt)
        else:
            merged.append([lo, hi, {qt}])
    return [
        Snippet(doc.doc_id, lo, hi, frozenset(m)) for lo, hi, m in merged if len(m) >= min_matches
    ]


# -- coreference -----------------------------------------------------------------


def resolve_pronouns(doc: AnnotatedDocument) -> AnnotatedDocument:
    """Replace he/him/his/she/her/hers by the nearest preceding PERSON mention."""
    out: list[Token] = []
    last_person: str | None = None
    run: list[str] = []
    for tok in doc.tokens:
        if tok.ner == "PERSON":
            run.append(tok.surface)
            out.append(tok)
            continue
        if run:
            last_person, run = " ".join(run), []
        if tok.surface.lower() in PRONOUNS and last_person is not None:
            out.append(Token(last_person, "NOUN", "PERSON_REF"))
        else:
            out.append(tok)
    return replace(doc, tokens=tuple(out))


# -- phrase markup and open triples --------------------------------------------


def _ner_mentions(tokens: Sequence[Token]) -> list[tuple[int, int]]:
    spans = []
    i = 0
    while i < len(tokens):
        tag = tokens[i].ner
        if tag:
            j = i + 1
            while j < len(tokens) and tokens[j].ner == tag and tag != "PERSON_REF":
                j += 1
            spans.append((i, j))
            i = j
        else:
            i += 1
    return spans


def markup(tokens: Sequence[Token]) -> list[Phrase]:
    """Entity (E) and predicate (P) phrases, in text order.

    NER mentions are always entities and are never cut by predicate patterns.
    Predicates are a verb run optionally followed by one preposition, or a
    noun followed by a preposition. Remaining maximal runs of nouns,
    adjectives and numbers are entities.
    """
    phrases: list[Phrase] = []
    in_ner = [False] * len(tokens)
    for s, e in _ner_mentions(tokens):
        for k in range(s, e):
            in_ner[k] = True
        phrases.append(Phrase("E", s, e, _join(tokens, s, e)))

    def free(k: int, pos: str) -> bool:
        return k < len(tokens) and not in_ner[k] and tokens[k].pos == pos

    used = list(in_ner)
    i = 0
    while i < len(tokens):
        if free(i, "VERB"):
            j = i
            while free(j, "VERB"):
                j += 1
            if free(j, "ADP"):
                j += 1
            phrases.append(Phrase("P", i, j, _join(tokens, i, j)))
            for k in range(i, j):
                used[k] = True
            i = j
        elif free(i, "NOUN") and free(i + 1, "ADP"):
            phrases.append(Phrase("P", i, i + 2, _join(tokens, i, i + 2)))
            used[i] = used[i + 1] = True
            i += 2
        else:
            i += 1

    i = 0
    while i < len(tokens):
        if not used[i] and _entity_token(tokens[i]):
            j = i
            while j < len(tokens) and not used[j] and _entity_token(tokens[j]):
                j += 1
            phrases.append(Phrase("E", i, j, _join(tokens, i, j)))
            i = j
        else:
            i += 1
    return sorted(phrases, key=lambda p: p.start)


def _entity_token(tok: Token) -> bool:
    return tok.pos in ENTITY_POS and tok.surface.lower() not in _NON_ENTITY_WORDS


def _join(tokens: Sequence[Token], s: int, e: int) -> str:
    return " ".join(t.surface for t in tokens[s:e])


def triples_from_markup(phrases: Sequence[Phrase], origin: str = "") -> list[OpenTriple]:
    """<E_a, P, E_b> for entity pairs with exactly one predicate between them.

    Without any predicate, every entity pair gets the ``cooccurs`` predicate.
    """
    ents = [(k, p) for k, p in enumerate(phrases) if p.kind == "E"]
    preds = [k for k, p in enumerate(phrases) if p.kind == "P"]
    out: list[OpenTriple] = []
    if not preds:
        for (_, a), (_, b) in combinations(ents, 2):
            out.append(OpenTriple(a.text, COOCCURS, b.text, origin))
    else:
        for (ka, a), (kb, b) in combinations(ents, 2):
            between = [k for k in preds if ka < k < kb]
            if len(between) == 1:
                out.append(OpenTriple(a.text, phrases[between[0]].text, b.text, origin))
    return list(dict.fromkeys(out))


def extract_open_triples(tokens: Sequence[Token], origin: str = "") -> list[OpenTriple]:
    return triples_from_markup(markup(tokens), origin)


def extract_type_triples(
    tokens: Sequence[Token],
    noun_phrases: Sequence[tuple[int, int]] | None = None,
    origin: str = "",
) -> list[OpenTriple]:
    """Hearst-pattern type triples <NP1, type, NP2> within one sentence.

    Patterns: ``NP2 such as NP1 (, NP1)*``, ``NP1 is a(n) NP2`` and
    ``NP1 and other NP2``. Noun phrases default to the entity phrases of
    :func:`markup`.
    """
    if noun_phrases is None:
        noun_phrases = [(p.start, p.end) for p in markup(tokens) if p.kind == "E"]
    nps = sorted(noun_phrases)
    low = [t.surface.lower() for t in tokens]

    def text(span: tuple[int, int]) -> str:
        return _join(tokens, *span)

    out: list[OpenTriple] = []
    for x, (a, b) in enumerate(pairwise(nps)):
        gap = low[a[1] : b[0]]
        if gap in (["such", "as"], [",", "such", "as"]):
            hyper = text(a)
            out.append(OpenTriple(text(b), TYPE, hyper, origin))
            # list continuation: "..., NP and NP"
            prev = b
            for nxt in nps[x + 2 :]:
                if low[prev[1] : nxt[0]] not in ([","], ["and"], ["or"], [",", "and"], [",", "or"]):
                    break
                out.append(OpenTriple(text(nxt), TYPE, hyper, origin))
                prev = nxt
        elif gap in (["is", "a"], ["is", "an"], ["was", "a"], ["was", "an"]) or gap == ["and", "other"]:
            out.append(OpenTriple(text(a), TYPE, text(b), origin))
    return list(dict.fromkeys(out))


@dataclass(frozen=True)
class SnippetExtraction:
    triples: tuple[OpenTriple, ...]
    type_triples: tuple[OpenTriple, ...]
    text: str = field(default="")


def extract_from_snippet(doc: AnnotatedDocument, snippet: Snippet) -> SnippetExtraction:
    """Open triples over the whole snippet, Hearst triples per sentence."""
    tokens = doc.tokens[snippet.start : snippet.end]
    triples = extract_open_triples(tokens, snippet.id)
    types: list[OpenTriple] = []
    for s, e in doc.sentence_spans(snippet.start, snippet.end):
        types += extract_type_triples(doc.tokens[s:e], origin=snippet.id)
    return SnippetExtraction(
        tuple(triples), tuple(dict.fromkeys(types)), doc.text(snippet.start, snippet.end)
    )
