"""Write the toy benchmark: a small film KG, one tagged document per film,
20 questions with gold answers, and ablated variants that fail at a chosen stage.

Layout::

    OUT/kg.jsonl  OUT/docs.jsonl  OUT/questions.jsonl  OUT/config.txt
    OUT/ablations/bucket{1..5}/...   (same four files each)

Usage: python scripts/make_toy_benchmark.py [OUT_DIR]
"""

from __future__ import annotations

import copy
import json
import sys
from dataclasses import dataclass, field
from pathlib import Path


@dataclass
class Film:
    key: str
    title: str
    year: str
    genre: str  # adjective, as it appears in "a 1998 <genre> film"
    country: str
    director: str
    cast: tuple[str, str]
    prize: str | None = None  # only stated in text
    nationality: str = ""


FILMS = [
    Film("harbor", "The Silent Harbor", "1998", "noir", "France", "Claire Duval",
         ("Marc Olivier", "Ines Laurent"), nationality="French"),
    Film("lanterns", "Paper Lanterns", "2004", "romantic", "Japan", "Kenji Morita",
         ("Aiko Tanabe", "Ryo Sato"), nationality="Japanese"),
    Film("iron", "Iron Meadow", "2011", "historical", "Poland", "Tomasz Wolski",
         ("Anna Kowal", "Piotr Zielinski"), nationality="Polish"),
    Film("river", "The Long River", "1987", "epic", "Brazil", "Rafael Costa",
         ("Lucia Mendes", "Paulo Reis"), nationality="Brazilian"),
    Film("glass", "Glass Orchard", "2015", "psychological", "Canada", "Nora Fielding",
         ("Ethan Brooks", "Maya Chen"), prize="Golden Maple", nationality="Canadian"),
    Film("desert", "Desert Choir", "2009", "musical", "Morocco", "Youssef Amrani",
         ("Leila Haddad", "Omar Benali"), prize="Crystal Dune", nationality="Moroccan"),
    Film("winter", "Winter Ledger", "2019", "crime", "Norway", "Ingrid Solberg",
         ("Lars Nygaard", "Sofie Berg"), nationality="Norwegian"),
    Film("copper", "Copper Sky", "1993", "western", "Mexico", "Diego Ramos",
         ("Elena Cruz", "Mateo Vargas"), prize="Silver Cactus", nationality="Mexican"),
    Film("tide", "Night Tide", "2001", "horror", "Ireland", "Siobhan Keane",
         ("Declan Moore", "Aoife Byrne"), nationality="Irish"),
    Film("orbit", "Last Orbit", "2017", "science", "India", "Arjun Mehta",
         ("Priya Nair", "Vikram Rao"), prize="Blue Comet", nationality="Indian"),
    Film("salt", "Salt Road", "1979", "adventure", "Chile", "Rafael Costa",
         ("Tomas Ibarra", "Lucia Mendes"), nationality="Chilean"),
    Film("bells", "The Bells of Aran", "1996", "period", "Ireland", "Siobhan Keane",
         ("Niamh Walsh", "Declan Moore"), nationality="Irish"),
    Film("neon", "Neon Monastery", "2013", "mystery", "Thailand", "Anong Chai",
         ("Kanya Suk", "Niran Thep"), nationality="Thai"),
    Film("clock", "The Clockmaker", "2006", "fantasy", "Austria", "Felix Huber",
         ("Greta Lang", "Jonas Brandt"), prize="Golden Gear", nationality="Austrian"),
    Film("marsh", "Marsh Light", "1990", "gothic", "Scotland", "Ewan Fraser",
         ("Isla Munro", "Callum Reid"), nationality="Scottish"),
    Film("garden", "Garden of Hours", "2021", "family", "Italy", "Lucia Ferri",
         ("Marco Bellini", "Giulia Conti"), nationality="Italian"),
    Film("atlas", "Atlas Falls", "2008", "disaster", "Australia", "Liam Carter",
         ("Zoe Hart", "Noah Ellis"), nationality="Australian"),
    Film("echo", "Echo Valley", "1984", "mountain", "Switzerland", "Felix Huber",
         ("Greta Lang", "Urs Keller"), nationality="Swiss"),
    Film("amber", "Amber Coast", "2012", "coming-of-age", "Lithuania", "Rasa Petras",
         ("Jonas Vaitkus", "Egle Mazur"), nationality="Lithuanian"),
    Film("tower", "Tower of Reeds", "2002", "political", "Egypt", "Karim Nasser",
         ("Mona Farid", "Hany Salem"), nationality="Egyptian"),
]

ALIASES = [
    {"label": "cast member", "aliases": ["starring", "starred"]},
    {"label": "country of origin", "aliases": ["country", "produced in"]},
    {"label": "publication date", "aliases": ["release date", "released"]},
    {"label": "director", "aliases": ["directed by"]},
    {"label": "award received", "aliases": ["won", "winner of"]},
]

# KG awards (people, not films): context facts, never asked about
PERSON_AWARDS = [
    ("Claire Duval", "Lumiere Prize", "1999"),
    ("Kenji Morita", "Sakura Medal", "2005"),
    ("Rafael Costa", "Condor Award", "1988"),
    ("Ingrid Solberg", "Fjord Prize", "2020"),
    ("Felix Huber", "Alpine Star", "2007"),
    ("Lucia Mendes", "Condor Award", "1980"),
]


def fact(s, p, o, o_kind="Entity", quals=()):
    return {
        "s": s, "p": p, "o": o, "o_kind": o_kind,
        "quals": [{"qp": qp, "qo": qo, "qo_kind": k} for qp, qo, k in quals],
    }


def kg_facts(films=FILMS) -> list[dict]:
    facts = []
    people: dict[str, str] = {}
    for f in films:
        facts.append(fact(f.title, "director", f.director))
        for actor in f.cast:
            facts.append(fact(f.title, "cast member", actor))
            people.setdefault(actor, "actor")
        facts.append(fact(f.title, "genre", f"{f.genre} film"))
        facts.append(fact(f.title, "publication date", f.year, "Literal"))
        facts.append(fact(f.title, "country of origin", f.country))
        people[f.director] = "film director"
    for who, prize, year in PERSON_AWARDS:
        facts.append(fact(who, "award received", prize, quals=[("point in time", year, "Literal")]))
    for who, occupation in people.items():
        facts.append(fact(who, "instanceOf", "human", "Type"))
        facts.append(fact(who, "occupation", occupation, "Type"))
    return facts


# -- tagged text ------------------------------------------------------------------


def name(text: str, ner: str) -> list[dict]:
    out = []
    for i, w in enumerate(text.split()):
        pos = "DET" if i == 0 and w in ("The", "A") else "NOUN"
        out.append({"tok": w, "pos": pos, "ner": ner})
    return out


def words(text: str, pos: str) -> list[dict]:
    return [{"tok": w, "pos": pos} for w in text.split()]


def stop() -> list[dict]:
    return [{"tok": ".", "pos": "OTHER"}]


def film_sentence(f: Film, director: str | None = None) -> list[dict]:
    """'<title> is a <year> <genre> film directed by <director> .'"""
    director = f.director if director is None else director
    return (
        name(f.title, "MISC") + words("is", "VERB") + words("a", "DET")
        + words(f.year, "NUM") + words(f.genre, "ADJ") + words("film", "NOUN")
        + words("directed", "VERB") + words("by", "ADP") + name(director, "PERSON") + stop()
    )


def prize_sentence(f: Film) -> list[dict]:
    """'<title> won the <prize> .'"""
    return name(f.title, "MISC") + words("won", "VERB") + words("the", "DET") + name(f.prize, "MISC") + stop()


def documents(films=FILMS) -> list[dict]:
    docs = []
    for f in films:
        sents = [film_sentence(f)]
        if f.prize:
            sents.insert(0, prize_sentence(f))
        docs.append({"doc_id": f.key, "sentences": sents})
    return docs


# -- questions ------------------------------------------------------------------


def by_key(key: str) -> Film:
    return next(f for f in FILMS if f.key == key)


def ask(qid, text, nerd, docs, gold, aliases=()) -> dict:
    return {
        "id": qid,
        "question": text,
        "nerd": [{"mention": m, "entity": e} for m, e in nerd],
        "doc_ids": list(docs),
        "gold_answers": [{"label": gold, "aliases": list(aliases)}],
    }


def q_director(qid, f: Film) -> dict:
    return ask(qid, f"Who is the director of {f.title}?", [(f.title, f.title)], [f.key], f.director)


def q_country(qid, f: Film) -> dict:
    return ask(qid, f"What is the country of origin of {f.title}?", [(f.title, f.title)], [f.key], f.country)


def q_costar(qid, f: Film) -> dict:
    lead, other = f.cast
    return ask(
        qid, f"Who starred in {f.title} together with {lead}?",
        [(f.title, f.title), (lead, lead)], [f.key], other,
    )


def q_year(qid, f: Film) -> dict:
    return ask(
        qid, f"What is the publication date of {f.title} by {f.director}?",
        [(f.title, f.title), (f.director, f.director)], [f.key], f.year,
    )


def q_prize(qid, f: Film) -> dict:
    return ask(qid, f"{f.title} won which prize?", [(f.title, f.title)], [f.key], f.prize)


PLAN = [
    (q_director, ["harbor", "lanterns", "iron", "river"]),
    (q_country, ["winter", "tide", "neon", "marsh"]),
    (q_costar, ["salt", "bells", "garden", "atlas"]),
    (q_year, ["echo", "amber", "tower", "lanterns"]),
    (q_prize, ["glass", "desert", "copper", "orbit"]),
]


def questions() -> list[dict]:
    out = []
    n = 0
    for make, keys in PLAN:
        for key in keys:
            n += 1
            out.append(make(f"toy{n:02d}", by_key(key)))
    return out


# -- ablations --------------------------------------------------------------------


@dataclass
class Dataset:
    facts: list[dict] = field(default_factory=list)
    docs: list[dict] = field(default_factory=list)
    questions: list[dict] = field(default_factory=list)


def base() -> Dataset:
    return Dataset(kg_facts(), documents(), questions())


def _drop_facts(ds: Dataset, pred) -> None:
    ds.facts = [f for f in ds.facts if not pred(f)]


def _replace_doc(ds: Dataset, key: str, sents: list[list[dict]]) -> None:
    for d in ds.docs:
        if d["doc_id"] == key:
            d["sentences"] = sents


def ablate_bucket1() -> Dataset:
    """Answer never retrieved: director facts removed, documents silent on directors."""
    ds = base()
    keys = ["harbor", "lanterns", "iron"]
    films = [by_key(k) for k in keys]
    titles = {f.title for f in films}
    _drop_facts(ds, lambda r: r["s"] in titles and r["p"] == "director")
    for f in films:
        sent = name(f.title, "MISC") + words("is", "VERB") + words("a", "DET") + words(f.year, "NUM") \
            + words(f.genre, "ADJ") + words("film", "NOUN") + stop()
        _replace_doc(ds, f.key, [sent])
    ds.questions = [q_director(f"abl1-{f.key}", f) for f in films]
    return ds


def ablate_bucket2() -> Dataset:
    """Answer retrieved but cut at evidence selection: the KG fact is gone and five
    festival notes outscore the one document naming the director."""
    ds = base()
    keys = ["harbor", "lanterns", "iron"]
    films = [by_key(k) for k in keys]
    titles = {f.title for f in films}
    _drop_facts(ds, lambda r: r["s"] in titles and r["p"] == "director")
    ds.questions = []
    for f in films:
        notes = []
        for i in range(5):
            doc_id = f"{f.key}-note{i}"
            sent = (
                words("the", "DET") + words("director", "NOUN") + words("of", "ADP") + name(f.title, "MISC")
                + words(("spoke", "arrived", "smiled", "waved", "laughed")[i], "VERB") + stop()
            )
            ds.docs.append({"doc_id": doc_id, "sentences": [sent]})
            notes.append(doc_id)
        q = q_director(f"abl2-{f.key}", f)
        q["doc_ids"] = [f.key] + notes
        ds.questions.append(q)
    return ds


def ablate_bucket3() -> Dataset:
    """Answer in the graph but off every tree: the country predicate is renamed,
    so the question's country token anchors nothing."""
    ds = base()
    keys = ["winter", "tide", "neon"]
    films = [by_key(k) for k in keys]
    titles = {f.title for f in films}
    # thin the films out so every remaining fact survives evidence selection
    _drop_facts(ds, lambda r: r["s"] in titles and r["p"] in ("cast member", "genre"))
    for r in ds.facts:
        if r["s"] in titles and r["p"] == "country of origin":
            r["p"] = "made in"
    ds.questions = [q_country(f"abl3-{f.key}", f) for f in films]
    return ds


CREW = {
    "salt": ["Bruno Aldana", "Kemal Oduya", "Vesna Horvat", "Pim Jansen", "Suri Watanabe", "Ode Laquer"],
    "bells": ["Fergal Quinn", "Mika Hakala", "Zora Dvorak", "Ugo Pirelli", "Tess Whitby", "Anouk Verbeek"],
    "garden": ["Dario Conte", "Yuki Hamada", "Bram Stekel", "Olga Ivanova", "Femi Adeyemi", "Hugo Marchetti"],
}


# pairwise trigram-disjoint verbs, so no two hops of the chain align
CHAIN_VERBS = ["follows", "warns", "bumps", "calls", "kicks", "hugs", "pays"]


def _chain_sentence(f: Film, names: list[str]) -> list[dict]:
    # '<title> follows A warns B bumps C ...': one triple per adjacent pair
    toks = name(f.title, "MISC")
    for verb, n in zip(CHAIN_VERBS, names):
        toks += words(verb, "VERB") + name(n, "PERSON")
    return toks + stop()


def ablate_bucket4() -> Dataset:
    """Answer on the trees but buried: the KG no longer links the lead to the film,
    and the only document reaches the lead through six crew members, all of
    which tie the co-star on tree count and beat it on weight."""
    ds = base()
    keys = ["salt", "bells", "garden"]
    ds.questions = []
    for k in keys:
        f = by_key(k)
        lead = f.cast[0]
        _drop_facts(ds, lambda r, f=f, lead=lead: r["s"] == f.title and r["o"] == lead)
        _replace_doc(ds, f.key, [_chain_sentence(f, CREW[k] + [lead])])
        ds.questions.append(q_costar(f"abl4-{f.key}", f))
    return ds


def ablate_bucket5() -> Dataset:
    """Answer among the top candidates but not first: conflicting evidence credits
    a second director in both the KG and the text."""
    ds = base()
    keys = ["harbor", "lanterns", "iron"]
    ds.questions = []
    rivals = {"harbor": "Paul Girard", "lanterns": "Hiro Tanaka", "iron": "Jan Nowak"}
    for k in keys:
        f = by_key(k)
        # the rival's fact comes first, so equal-cost trees favour it
        at = next(i for i, r in enumerate(ds.facts) if r["s"] == f.title and r["p"] == "director")
        ds.facts.insert(at, fact(f.title, "director", rivals[k]))
        _replace_doc(ds, f.key, [film_sentence(f, rivals[k])])
        ds.questions.append(q_director(f"abl5-{f.key}", f))
    return ds


ABLATIONS = {
    1: ablate_bucket1,
    2: ablate_bucket2,
    3: ablate_bucket3,
    4: ablate_bucket4,
    5: ablate_bucket5,
}

CONFIG = """\
# toy benchmark: defaults everywhere except the input files
kg_path = kg.jsonl
docs_path = docs.jsonl
"""


def write_dataset(ds: Dataset, out: Path) -> None:
    out.mkdir(parents=True, exist_ok=True)
    with open(out / "kg.jsonl", "w", encoding="utf-8") as fh:
        fh.writelines(json.dumps(rec, ensure_ascii=False) + "\n" for rec in ds.facts + copy.deepcopy(ALIASES))
    with open(out / "docs.jsonl", "w", encoding="utf-8") as fh:
        fh.writelines(json.dumps(rec, ensure_ascii=False) + "\n" for rec in ds.docs)
    with open(out / "questions.jsonl", "w", encoding="utf-8") as fh:
        fh.writelines(json.dumps(rec, ensure_ascii=False) + "\n" for rec in ds.questions)
    (out / "config.txt").write_text(CONFIG, encoding="utf-8")


def write(out: Path) -> None:
    write_dataset(base(), out)
    for bucket, make in ABLATIONS.items():
        write_dataset(make(), out / "ablations" / f"bucket{bucket}")


if __name__ == "__main__":
    write(Path(sys.argv[1]) if len(sys.argv) > 1 else Path(__file__).parent.parent / "data" / "toy")
