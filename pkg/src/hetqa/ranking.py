"""Answer candidates from Steiner trees, ranking strategies, P@1 and error buckets."""

from __future__ import annotations

import heapq
from collections.abc import Iterable, Sequence
from dataclasses import dataclass, field
from enum import Enum

from hetqa.graph import ContextGraph, NodeKind
from hetqa.gst import SteinerTree, tree_edges_full
from hetqa.lexicon import normalize


class NoCandidatesError(ValueError):
    """The trees hold no non-anchor entity or literal."""


class Strategy(str, Enum):
    GST_COUNT = "GstCount"
    GST_COST = "GstCost"
    GST_NODE_WEIGHT = "GstNodeWeight"
    ANCHOR_DISTANCE = "AnchorDistance"
    WEIGHTED_ANCHOR_DISTANCE = "WeightedAnchorDistance"


def parse_strategy(name: str | Strategy) -> Strategy:
    try:
        return Strategy(name)
    except ValueError:
        valid = ", ".join(s.value for s in Strategy)
        raise ValueError(f"unknown ranking strategy {name!r} (expected one of {valid})") from None


@dataclass(frozen=True)
class RankedAnswer:
    node: int
    label: str
    score: float
    rank: int
    trees: frozenset[int] = field(default_factory=frozenset)

    def to_record(self) -> dict:
        return {
            "label": self.label,
            "score": self.score,
            "rank": self.rank,
            "trees": sorted(self.trees),
        }


@dataclass(frozen=True)
class GoldAnswer:
    label: str
    aliases: tuple[str, ...] = ()

    def names(self) -> set[str]:
        return {normalize(s) for s in (self.label, *self.aliases)}

    @classmethod
    def from_record(cls, rec: dict | str) -> GoldAnswer:
        if isinstance(rec, str):
            return cls(rec)
        return cls(rec["label"], tuple(rec.get("aliases", ())))

    def to_record(self) -> dict:
        return {"label": self.label, "aliases": list(self.aliases)}


def extract_candidates(
    graph: ContextGraph, trees: Sequence[SteinerTree], anchor_nodes: Iterable[int]
) -> set[int]:
    if not trees:
        raise NoCandidatesError("no trees to take candidates from")
    anchors = set(anchor_nodes)
    out = set()
    for t in trees:
        for v in t.all_nodes:
            if v not in anchors and graph.nodes[v].kind in (NodeKind.ENTITY, NodeKind.LITERAL):
                out.add(v)
    if not out:
        raise NoCandidatesError("trees contain only anchors and predicates")
    return out


def _tree_distances(
    graph: ContextGraph, tree: SteinerTree, source: int, weighted: bool
) -> dict[int, float]:
    adj: dict[int, list[tuple[int, float]]] = {v: [] for v in tree.all_nodes}
    for e in tree_edges_full(graph, tree):
        c = e.cost if weighted else 1.0
        adj[e.a].append((e.b, c))
        adj[e.b].append((e.a, c))
    dist = {source: 0.0}
    heap = [(0.0, source)]
    while heap:
        d, v = heapq.heappop(heap)
        if d > dist[v]:
            continue
        for u, c in adj[v]:
            if d + c < dist.get(u, float("inf")):
                dist[u] = d + c
                heapq.heappush(heap, (d + c, u))
    return dist


def _score(
    strategy: Strategy,
    graph: ContextGraph,
    cand: int,
    trees: Sequence[SteinerTree],
    support: Sequence[int],
    anchors: set[int],
) -> float:
    if strategy is Strategy.GST_COUNT:
        return float(len(support))
    if strategy is Strategy.GST_COST:
        return sum(1.0 / (1.0 + trees[i].cost) for i in support)
    if strategy is Strategy.GST_NODE_WEIGHT:
        return sum(sum(graph.nodes[v].weight for v in trees[i].all_nodes) for i in support)
    weighted = strategy is Strategy.WEIGHTED_ANCHOR_DISTANCE
    total = 0.0
    for i in support:
        dist = _tree_distances(graph, trees[i], cand, weighted)
        total += sum(dist[a] for a in trees[i].all_nodes & anchors if a in dist)
    return -total


def rank_candidates(
    graph: ContextGraph,
    candidates: Iterable[int],
    trees: Sequence[SteinerTree],
    strategy: Strategy | str,
    anchor_nodes: Iterable[int],
) -> list[RankedAnswer]:
    """Score candidates over their supporting trees; ties by node weight, then id."""
    strategy = parse_strategy(strategy)
    anchors = set(anchor_nodes)
    scored = []
    for c in candidates:
        support = [i for i, t in enumerate(trees) if c in t.all_nodes]
        s = _score(strategy, graph, c, trees, support, anchors)
        scored.append((s, c, frozenset(support)))
    scored.sort(key=lambda x: (-x[0], -graph.nodes[x[1]].weight, x[1]))
    return [
        RankedAnswer(c, graph.nodes[c].label, s, r, sup)
        for r, (s, c, sup) in enumerate(scored, 1)
    ]


def node_names(graph: ContextGraph, nid: int) -> set[str]:
    n = graph.nodes[nid]
    return {normalize(s) for s in (n.label, *n.aliases)}


def is_gold(names: set[str], gold: Sequence[GoldAnswer]) -> bool:
    return any(names & g.names() for g in gold)


def evaluate_p_at_1(
    graph: ContextGraph, ranked: Sequence[RankedAnswer], gold: Sequence[GoldAnswer]
) -> int:
    if not gold:
        raise ValueError("gold answer set is empty")
    if not ranked:
        return 0
    return int(is_gold(node_names(graph, ranked[0].node), gold))


BUCKET_LABELS = {
    1: "answer not in evidence pool",
    2: "answer in pool but not in context graph",
    3: "answer in context graph but not in top-k trees",
    4: "answer in trees but not in top-5 candidates",
    5: "answer in top-5 but not at rank 1",
}


@dataclass
class Trace:
    """What a pipeline run saw, for error attribution."""

    evidence_texts: list[str]
    graph: ContextGraph | None = None
    trees: list[SteinerTree] = field(default_factory=list)
    ranked: list[RankedAnswer] = field(default_factory=list)


def _text_mentions(text: str, gold: Sequence[GoldAnswer]) -> bool:
    t = normalize(text)
    return any(name and name in t for g in gold for name in g.names())


def error_bucket(trace: Trace, gold: Sequence[GoldAnswer]) -> int | None:
    """First failed stage (1..5), or ``None`` when the top answer is right."""
    g = trace.graph
    if g is not None and trace.ranked and evaluate_p_at_1(g, trace.ranked, gold):
        return None
    if not any(_text_mentions(t, gold) for t in trace.evidence_texts):
        return 1
    if g is None or not any(is_gold(node_names(g, v), gold) for v in g.nodes):
        return 2
    in_trees = {v for t in trace.trees for v in t.all_nodes}
    if not any(is_gold(node_names(g, v), gold) for v in in_trees):
        return 3
    if not any(is_gold(node_names(g, a.node), gold) for a in trace.ranked[:5]):
        return 4
    return 5


__all__ = [
    "BUCKET_LABELS",
    "GoldAnswer",
    "NoCandidatesError",
    "RankedAnswer",
    "Strategy",
    "Trace",
    "error_bucket",
    "evaluate_p_at_1",
    "extract_candidates",
    "is_gold",
    "node_names",
    "parse_strategy",
    "rank_candidates",
]
