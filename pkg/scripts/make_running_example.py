"""Write the running-example fixture: a small KG, three tagged documents, one question.

Usage: python scripts/make_running_example.py [OUT_DIR]
"""

from __future__ import annotations

import json
import sys
from pathlib import Path

from hetqa.ingest.text import parse_tagged

AGI = "Alejandro González Iñárritu"
LEO = "Leonardo DiCaprio"
OSCARS = "Academy Awards"


def fact(s, p, o, o_kind="Entity", quals=()):
    return {
        "s": s, "p": p, "o": o, "o_kind": o_kind,
        "quals": [{"qp": qp, "qo": qo, "qo_kind": k} for qp, qo, k in quals],
    }


FACTS = [
    fact(LEO, "award received", OSCARS,
         quals=[("for work", "The Revenant", "Entity"), ("point in time", "2016", "Literal")]),
    fact(AGI, "award received", OSCARS,
         quals=[("for work", "The Revenant", "Entity"), ("point in time", "2016", "Literal")]),
    fact("The Revenant", "director", AGI),
    fact("The Revenant", "genre", "Western film"),
    fact("The Revenant", "cast member", LEO),
    fact("Inception", "cast member", LEO),
    fact("Inception", "director", "Christopher Nolan"),
    fact("The Wolf of Wall Street", "cast member", LEO),
    fact("The Wolf of Wall Street", "director", "Martin Scorsese"),
    fact(LEO, "instanceOf", "human", "Type"),
    fact(LEO, "occupation", "actor", "Type"),
    fact(AGI, "instanceOf", "human", "Type"),
    fact(AGI, "occupation", "director", "Type"),
    fact("The Revenant", "instanceOf", "film", "Type"),
    fact(LEO, "award received", "Golden Globe Award", quals=[("for work", "The Revenant", "Entity")]),
    fact("Martin Scorsese", "award received", OSCARS,
         quals=[("for work", "The Departed", "Entity"), ("point in time", "2007", "Literal")]),
    fact("The Departed", "cast member", LEO),
    fact("The Departed", "genre", "crime film"),
]

ALIASES = [
    {"label": OSCARS, "aliases": ["Oscar", "Oscars"]},
    {"label": "award received", "aliases": ["won", "winner of"]},
    {"label": "director", "aliases": ["directed by"]},
]

DOCS = [
    ("revenant", [
        ("The/DET/MISC Revenant/NOUN/MISC is/VERB a/DET 2015/NUM American/ADJ western/ADJ film/NOUN "
        "directed/VERB by/ADP Alejandro/NOUN/PERSON González/NOUN/PERSON Iñárritu/NOUN/PERSON ./OTHER"),
    ]),
    ("dicaprio", [
        ("Leonardo/NOUN/PERSON DiCaprio/NOUN/PERSON won/VERB an/DET Oscar/NOUN/MISC for/ADP "
        "The/DET/MISC Revenant/NOUN/MISC ./OTHER"),
    ]),
    ("inarritu", [
        ("Mexican/ADJ directors/NOUN such/ADJ as/ADP "
        "Alejandro/NOUN/PERSON González/NOUN/PERSON Iñárritu/NOUN/PERSON ./OTHER"),
    ]),
    ("oscar-2016", [
        ("Alejandro/NOUN/PERSON González/NOUN/PERSON Iñárritu/NOUN/PERSON won/VERB an/DET "
        "Oscar/NOUN/MISC for/ADP The/DET/MISC Revenant/NOUN/MISC ./OTHER"),
    ]),
]

QUESTION = {
    "id": "fig1",
    "question": "director of the western for which Leo won an Oscar?",
    "nerd": [{"mention": "Leo", "entity": LEO}, {"mention": "Oscar", "entity": OSCARS}],
    "doc_ids": [d for d, _ in DOCS],
    "gold_answers": [{"label": AGI, "aliases": ["Alejandro G. Iñárritu", "Alejandro Iñárritu"]}],
}

CONFIG = """\
# running example: defaults everywhere except the input files
kg_path = kg.jsonl
docs_path = docs.jsonl
"""


def write(out: Path) -> None:
    out.mkdir(parents=True, exist_ok=True)
    with open(out / "kg.jsonl", "w", encoding="utf-8") as fh:
        fh.writelines(json.dumps(rec, ensure_ascii=False) + "\n" for rec in FACTS + ALIASES)
    with open(out / "docs.jsonl", "w", encoding="utf-8") as fh:
        for doc_id, sents in DOCS:
            rec = {"doc_id": doc_id, "sentences": [parse_tagged(s) for s in sents]}
            fh.write(json.dumps(rec, ensure_ascii=False) + "\n")
    with open(out / "questions.jsonl", "w", encoding="utf-8") as fh:
        fh.write(json.dumps(QUESTION, ensure_ascii=False) + "\n")
    (out / "config.txt").write_text(CONFIG, encoding="utf-8")


if __name__ == "__main__":
    write(Path(sys.argv[1]) if len(sys.argv) > 1 else Path(__file__).parent.parent / "data" / "running_example")
