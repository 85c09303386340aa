"""Assembly of the question-specific context graph.

KG facts are wired subject - predicate - object (plus predicate - qualifier
predicate - qualifier object); text snippets contribute open triples and
Hearst type triples joined on exact phrase equality. Alignment edges connect
same-kind nodes whose similarity reaches a threshold; only the largest
connected component is kept.
"""

from __future__ import annotations

import math
from collections import defaultdict
from collections.abc import Callable, Iterable, Mapping, Sequence
from dataclasses import dataclass, field
from itertools import combinations

from hetqa.graph import (
    ContextGraph,
    EdgeKind,
    NodeKind,
    Source,
    alignable_kinds,
    largest_connected_component,
)
from hetqa.ingest.evidence import Evidence, fact_evidence
from hetqa.ingest.kg import INSTANCE_OF, OCCUPATION, TripleStore
from hetqa.ingest.text import (
    COOCCURS,
    TYPE,
    AnnotatedDocument,
    Snippet,
    extract_from_snippet,
)
from hetqa.lexicon import content_words, jaccard, trigrams, words

# predicates that carry no lexical meaning of their own are never aligned
RESERVED_PREDICATES = frozenset(p.casefold() for p in (COOCCURS, TYPE, INSTANCE_OF, OCCUPATION))


class Embeddings:
    """Word vectors read from a whitespace-separated text file."""

    def __init__(self, vectors: Mapping[str, Sequence[float]]) -> None:
        self._vec: dict[str, tuple[float, ...]] = {}
        self._norm: dict[str, float] = {}
        for word, vec in vectors.items():
            v = tuple(float(x) for x in vec)
            self._vec[word.casefold()] = v
            self._norm[word.casefold()] = math.sqrt(sum(x * x for x in v))

    def __contains__(self, word: str) -> bool:
        return word.casefold() in self._vec

    def __len__(self) -> int:
        return len(self._vec)

    def cosine(self, a: str, b: str) -> float:
        a, b = a.casefold(), b.casefold()
        na, nb = self._norm[a], self._norm[b]
        if na == 0.0 or nb == 0.0:
            return 0.0
        return sum(x * y for x, y in zip(self._vec[a], self._vec[b])) / (na * nb)

    @classmethod
    def load(cls, lines: Iterable[str]) -> Embeddings:
        vectors = {}
        for line in lines:
            parts = line.split()
            # word2vec text format may start with a "<count> <dim>" header
            if len(parts) < 2 or (len(parts) == 2 and parts[0].isdigit()):
                continue
            vectors[parts[0]] = [float(x) for x in parts[1:]]
        return cls(vectors)


@dataclass(frozen=True)
class AlignmentConfig:
    tau_entity: float = 0.8
    tau_predicate: float = 0.7
    embeddings: Embeddings | None = field(default=None, compare=False)

    def __post_init__(self) -> None:
        for name in ("tau_entity", "tau_predicate"):
            tau = getattr(self, name)
            if not 0.0 < tau <= 1.0:
                raise ValueError(f"{name}={tau} must lie in (0, 1]")


# -- similarities ---------------------------------------------------------------


def _entity_string(label: str, aliases: Iterable[str] = ()) -> str:
    return " ".join([label, *sorted(aliases)])


def entity_similarity(
    label_a: str, label_b: str, aliases_a: Iterable[str] = (), aliases_b: Iterable[str] = ()
) -> float:
    """Jaccard overlap of character trigrams of label plus aliases."""
    return jaccard(
        trigrams(_entity_string(label_a, aliases_a)), trigrams(_entity_string(label_b, aliases_b))
    )


def _label_words(label: str) -> list[str]:
    return content_words(label) or words(label)


def _word_similarity(a: str, b: str, embeddings: Embeddings | None) -> float:
    if embeddings is not None and a in embeddings and b in embeddings:
        return embeddings.cosine(a, b)
    return jaccard(trigrams(a), trigrams(b))


def predicate_raw_similarity(label_a: str, label_b: str, embeddings: Embeddings | None = None) -> float:
    """Maximum word-pair similarity across the two labels.

    Cosine of word vectors where both words have one, trigram Jaccard of the
    two words otherwise. Stopwords are ignored unless a label has nothing else.
    """
    wa, wb = _label_words(label_a), _label_words(label_b)
    if not wa or not wb:
        return 0.0
    return max(_word_similarity(x, y, embeddings) for x in wa for y in wb)


def min_max_normalize(values: Sequence[float]) -> list[float]:
    """Scale into [0, 1]; a degenerate population maps to all ones."""
    if not values:
        return []
    lo, hi = min(values), max(values)
    if hi - lo <= 1e-12:
        return [1.0] * len(values)
    return [(v - lo) / (hi - lo) for v in values]


def predicate_similarity(
    pairs: Sequence[tuple[str, str]], embeddings: Embeddings | None = None
) -> list[float]:
    """Raw predicate similarities of ``pairs``, min-max normalized over the batch."""
    return min_max_normalize([predicate_raw_similarity(a, b, embeddings) for a, b in pairs])


# -- alignment insertion --------------------------------------------------------


def _blocked_pairs(keys: Mapping[int, frozenset[str]], allowed: Callable[[int, int], bool]):
    index: dict[str, list[int]] = defaultdict(list)
    for nid in sorted(keys):
        for gram in keys[nid]:
            index[gram].append(nid)
    pairs = set()
    for members in index.values():
        for a, b in combinations(members, 2):
            if allowed(a, b):
                pairs.add((a, b))
    return sorted(pairs)


def alignment_candidates(
    graph: ContextGraph, cross: tuple[set[int], set[int]] | None = None
) -> dict[str, list[tuple[int, int]]]:
    """Same-kind node pairs (entity and literal alike) sharing at least one trigram.

    Pairs of two KG nodes are never candidates (KG items are canonical). With
    ``cross`` only pairs with one node on each side are considered.
    """

    def allowed(a: int, b: int) -> bool:
        na, nb = graph.nodes[a], graph.nodes[b]
        if not alignable_kinds(na.kind, nb.kind):
            return False
        if na.src is Source.KG and nb.src is Source.KG:
            return False
        if cross is not None:
            left, right = cross
            if not ((a in left and b in right) or (a in right and b in left)):
                return False
        return True

    entity_keys: dict[int, frozenset[str]] = {}
    predicate_keys: dict[int, frozenset[str]] = {}
    for nid, node in graph.nodes.items():
        if node.kind in (NodeKind.ENTITY, NodeKind.LITERAL):
            entity_keys[nid] = trigrams(_entity_string(node.label, node.aliases))
        elif node.label.casefold() not in RESERVED_PREDICATES:
            grams: set[str] = set()
            for w in _label_words(node.label):
                grams |= trigrams(w)
            predicate_keys[nid] = frozenset(grams)
    return {
        "entity": _blocked_pairs(entity_keys, allowed),
        "predicate": _blocked_pairs(predicate_keys, allowed),
    }


def insert_alignment_edges(
    graph: ContextGraph,
    config: AlignmentConfig,
    cross: tuple[set[int], set[int]] | None = None,
) -> ContextGraph:
    """Add alignment edges in place (weight = similarity) and return the graph.

    Entities and literals use trigram Jaccard against ``tau_entity``;
    predicates and types use normalized embedding similarity against
    ``tau_predicate``. The threshold is inclusive.
    """
    if all(n.src is Source.KG for n in graph.nodes.values()):
        return graph
    cands = alignment_candidates(graph, cross)
    for a, b in cands["entity"]:
        na, nb = graph.nodes[a], graph.nodes[b]
        sim = entity_similarity(na.label, nb.label, na.aliases, nb.aliases)
        if sim >= config.tau_entity:
            graph.upsert_edge(a, b, EdgeKind.ALIGNMENT, sim, src=na.src)
    pred_pairs = cands["predicate"]
    sims = predicate_similarity(
        [(graph.nodes[a].label, graph.nodes[b].label) for a, b in pred_pairs], config.embeddings
    )
    for (a, b), sim in zip(pred_pairs, sims):
        if sim >= config.tau_predicate:
            graph.upsert_edge(a, b, EdgeKind.ALIGNMENT, sim, src=graph.nodes[a].src)
    return graph


# -- KG side ----------------------------------------------------------------------


def wire_fact(graph: ContextGraph, store: TripleStore, idx: int, score: float) -> None:
    """S-P and P-O edges, plus P-qp and qp-qo per qualifier.

    Edges leading into a type object are type edges.
    """
    fact = store.facts[idx]
    eid = store.fact_id(idx)
    prov = {eid}

    def node(label: str, kind: NodeKind, occurrence: int = 0) -> int:
        return graph.upsert_node(
            label, kind, score, prov, src=Source.KG,
            aliases=store.aliases.get(label, ()), occurrence=occurrence,
        )

    s = node(fact.subject, NodeKind.ENTITY)
    p = node(fact.predicate, NodeKind.PREDICATE)
    o = node(fact.object, fact.object_kind)
    kind = EdgeKind.TYPE if fact.object_kind is NodeKind.TYPE else EdgeKind.TRIPLE
    graph.upsert_edge(s, p, kind, score, prov)
    graph.upsert_edge(p, o, kind, score, prov)
    for k, q in enumerate(fact.qualifiers, 1):
        qp = node(q.predicate, NodeKind.PREDICATE, k)
        qo = node(q.object, q.object_kind)
        graph.upsert_edge(p, qp, EdgeKind.TRIPLE, score, prov)
        qkind = EdgeKind.TYPE if q.object_kind is NodeKind.TYPE else EdgeKind.TRIPLE
        graph.upsert_edge(qp, qo, qkind, score, prov)
    graph.add_evidence_score(eid, score)


def _fact_index(evidence: Evidence) -> int:
    prefix, _, num = evidence.id.partition(":")
    if prefix != "kg" or not num.isdigit():
        raise ValueError(f"not a KG evidence id: {evidence.id!r}")
    return int(num)


def build_kg_subgraph(
    evidences: Sequence[Evidence],
    store: TripleStore,
    nerd_entities: Sequence[str] = (),
    scorer: Callable[[Evidence], float] | None = None,
) -> ContextGraph:
    """Graph of the selected facts, their entities' type facts and connecting paths.

    ``scorer`` scores the supplementary type and path facts; without one
    they inherit score 0.
    """
    graph = ContextGraph()
    wired: set[int] = set()

    def add(idx: int, score: float | None = None) -> None:
        if idx in wired:
            return
        wired.add(idx)
        if score is None:
            score = scorer(fact_evidence(store, idx)) if scorer else 0.0
        wire_fact(graph, store, idx, score)

    entities: list[str] = []
    for ev in evidences:
        if ev.source is not Source.KG:
            continue
        idx = _fact_index(ev)
        add(idx, ev.score if ev.score is not None else 0.0)
        entities += store.facts[idx].entity_members()
    for ent in dict.fromkeys(entities):
        for idx in store.type_facts(ent):
            add(idx)
    nerd = list(dict.fromkeys(nerd_entities))
    for a, b in combinations(nerd, 2):
        for idx in store.shortest_path(a, b):
            add(idx)
    return largest_connected_component(graph).freeze()


# -- text side --------------------------------------------------------------------


def build_text_quasi_graph(
    evidences: Sequence[Evidence],
    documents: Mapping[str, AnnotatedDocument],
    config: AlignmentConfig,
) -> ContextGraph:
    """Quasi-KG from open triples and type triples of the selected snippets."""
    graph = ContextGraph()
    for ev in evidences:
        if ev.source is not Source.TEXT:
            continue
        snippet = ev.payload
        assert isinstance(snippet, Snippet)
        extraction = extract_from_snippet(documents[snippet.doc_id], snippet)
        score = ev.score if ev.score is not None else 0.0
        add_text_triples(graph, ev.id, score, extraction.triples, extraction.type_triples)
        graph.add_evidence_score(ev.id, score)
    insert_alignment_edges(graph, config)
    return largest_connected_component(graph).freeze()


def add_text_triples(graph: ContextGraph, eid: str, score: float, triples, type_triples=()) -> None:
    prov = {eid}

    def node(label: str, kind: NodeKind, occurrence: int = 0) -> int:
        return graph.upsert_node(label, kind, score, prov, src=Source.TEXT, occurrence=occurrence)

    occ = 0
    for t in triples:
        if t.subject == t.object:
            continue
        s = node(t.subject, NodeKind.ENTITY)
        p = node(t.predicate, NodeKind.PREDICATE, occ)
        o = node(t.object, NodeKind.ENTITY)
        occ += 1
        graph.upsert_edge(s, p, EdgeKind.TRIPLE, score, prov)
        graph.upsert_edge(p, o, EdgeKind.TRIPLE, score, prov)
    for t in type_triples:
        s = node(t.subject, NodeKind.ENTITY)
        p = node(TYPE, NodeKind.PREDICATE, occ)
        o = node(t.object, NodeKind.TYPE)
        occ += 1
        graph.upsert_edge(s, p, EdgeKind.TYPE, score, prov)
        graph.upsert_edge(p, o, EdgeKind.TYPE, score, prov)


# -- heterogeneous ------------------------------------------------------------------


def merge_heterogeneous(
    kg_graph: ContextGraph, text_graph: ContextGraph, config: AlignmentConfig
) -> ContextGraph:
    """Disjoint union plus cross-source alignment edges, then the LCC."""
    merged, mapping = kg_graph.union(text_graph)
    left = set(kg_graph.nodes)
    right = set(mapping.values())
    insert_alignment_edges(merged, config, cross=(left, right))
    return largest_connected_component(merged).freeze()
