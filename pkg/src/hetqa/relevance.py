"""Question-relevance scoring of evidences and top-epsilon selection.

The lexical scorer is a deterministic stand-in for a trained relevance
classifier; precomputed classifier scores can be injected through an
external score table.
"""

from __future__ import annotations

import json
import re
from collections.abc import Iterable, Sequence
from dataclasses import dataclass, field
from typing import IO

from hetqa.graph import Source
from hetqa.ingest.evidence import Evidence
from hetqa.lexicon import stems
from hetqa.question import Question

LEXICAL = "lexical"
EXTERNAL = "external"


class MissingScoreError(KeyError):
    pass


@dataclass(frozen=True)
class ScorerSpec:
    kind: str = LEXICAL
    scores: dict[str, float] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if self.kind not in (LEXICAL, EXTERNAL):
            raise ValueError(f"unknown scorer kind {self.kind!r}")


def question_stems(question: Question) -> set[str]:
    """Stems of the content tokens; a linked mention also contributes its entity label."""
    out: set[str] = set()
    for tok in question.tokens:
        out |= stems(tok.text)
        if tok.entity is not None:
            out |= stems(tok.entity)
    return out


def lexical_score(question: Question, text: str) -> float:
    q = question_stems(question)
    if not q:
        return 0.0
    return len(q & stems(text)) / len(q)


DEFAULT_SCORER = ScorerSpec()


def score_evidence(question: Question, evidence: Evidence, spec: ScorerSpec = DEFAULT_SCORER) -> float:
    if spec.kind == EXTERNAL:
        try:
            return spec.scores[evidence.id]
        except KeyError:
            raise MissingScoreError(f"no external score for evidence {evidence.id!r}") from None
    return lexical_score(question, evidence.text)


def score_all(
    question: Question, evidences: Iterable[Evidence], spec: ScorerSpec = DEFAULT_SCORER
) -> list[Evidence]:
    return [ev.with_score(score_evidence(question, ev, spec)) for ev in evidences]


def _natural_key(evidence_id: str) -> tuple:
    return tuple(int(p) if p.isdigit() else p for p in re.split(r"(\d+)", evidence_id))


def select_top_evidences(evidences: Sequence[Evidence], epsilon: int = 5) -> list[Evidence]:
    """Top-``epsilon`` scored evidences per source, merged in nonincreasing score order.

    Ties are broken by evidence id (digit runs compared numerically).
    """
    if epsilon < 1:
        raise ValueError("epsilon must be >= 1")
    picked: list[Evidence] = []
    for source in Source:
        pool = [ev for ev in evidences if ev.source is source]
        pool.sort(key=lambda ev: (-(ev.score or 0.0), _natural_key(ev.id)))
        picked += pool[:epsilon]
    picked.sort(key=lambda ev: (-(ev.score or 0.0), _natural_key(ev.id)))
    return picked


def load_external_scores(fh: IO[str] | Iterable[str]) -> dict[str, float]:
    scores = {}
    for lineno, line in enumerate(fh, 1):
        if not line.strip():
            continue
        rec = json.loads(line)
        score = float(rec["score"])
        if not 0.0 <= score <= 1.0:
            raise ValueError(f"line {lineno}: score {score} outside [0, 1]")
        scores[str(rec["evidence_id"])] = score
    return scores
