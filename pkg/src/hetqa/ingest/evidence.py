"""Evidence records: one KG fact or one text snippet."""

from __future__ import annotations

from dataclasses import dataclass, replace

from hetqa.graph import Source
from hetqa.ingest.kg import KGFact, TripleStore, verbalize_fact
from hetqa.ingest.text import AnnotatedDocument, Snippet


@dataclass(frozen=True)
class Evidence:
    id: str
    source: Source
    payload: KGFact | Snippet
    text: str
    score: float | None = None

    def with_score(self, score: float) -> Evidence:
        if not 0.0 <= score <= 1.0:
            raise ValueError(f"score {score!r} outside [0, 1]")
        return replace(self, score=score)

    def to_record(self) -> dict:
        rec = {"id": self.id, "source": self.source.value, "text": self.text, "score": self.score}
        if isinstance(self.payload, KGFact):
            rec["fact"] = self.payload.to_record()
        else:
            p = self.payload
            rec["snippet"] = {
                "doc_id": p.doc_id, "start": p.start, "end": p.end, "matched": sorted(p.matched)
            }
        return rec

    @classmethod
    def from_record(cls, rec: dict) -> Evidence:
        if "fact" in rec:
            payload: KGFact | Snippet = KGFact.from_record(rec["fact"])
        else:
            s = rec["snippet"]
            payload = Snippet(s["doc_id"], s["start"], s["end"], frozenset(s["matched"]))
        return cls(rec["id"], Source(rec["source"]), payload, rec["text"], rec.get("score"))


def fact_evidence(store: TripleStore, idx: int) -> Evidence:
    fact = store.facts[idx]
    return Evidence(store.fact_id(idx), Source.KG, fact, verbalize_fact(fact))


def snippet_evidence(doc: AnnotatedDocument, snippet: Snippet) -> Evidence:
    return Evidence(snippet.id, Source.TEXT, snippet, doc.text(snippet.start, snippet.end))
