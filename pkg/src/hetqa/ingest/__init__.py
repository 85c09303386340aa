"""Parsing of KG facts and annotated text into evidences."""

from hetqa.ingest.evidence import Evidence, fact_evidence, snippet_evidence
from hetqa.ingest.kg import (
    FormatError,
    KGFact,
    Qualifier,
    TripleStore,
    kg_shortest_path,
    load_kg_facts,
    one_hop_facts,
    type_facts,
    verbalize_fact,
)
from hetqa.ingest.text import (
    COOCCURS,
    TYPE,
    AnnotatedDocument,
    OpenTriple,
    Snippet,
    Token,
    extract_from_snippet,
    extract_open_triples,
    extract_snippets,
    extract_type_triples,
    fallback_tag,
    load_documents,
    markup,
    resolve_pronouns,
)

__all__ = [
    "COOCCURS",
    "TYPE",
    "AnnotatedDocument",
    "Evidence",
    "FormatError",
    "KGFact",
    "OpenTriple",
    "Qualifier",
    "Snippet",
    "Token",
    "TripleStore",
    "extract_from_snippet",
    "extract_open_triples",
    "extract_snippets",
    "extract_type_triples",
    "fact_evidence",
    "fallback_tag",
    "kg_shortest_path",
    "load_documents",
    "load_kg_facts",
    "markup",
    "one_hop_facts",
    "resolve_pronouns",
    "snippet_evidence",
    "type_facts",
    "verbalize_fact",
]
