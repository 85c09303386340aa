"""Typed, weighted, undirected context graph.

Nodes are entities, predicates, types or literals; edges are triple, type or
alignment edges. Node and edge weights are the mean relevance score of the
distinct evidences they were observed in. Predicates are never merged: each
occurrence in an evidence gets its own node.
"""

from __future__ import annotations

import json
from collections import defaultdict, deque
from collections.abc import Iterable, Iterator
from dataclasses import dataclass
from enum import Enum
from typing import IO


class NodeKind(str, Enum):
    ENTITY = "Entity"
    PREDICATE = "Predicate"
    TYPE = "Type"
    LITERAL = "Literal"


class EdgeKind(str, Enum):
    TRIPLE = "Triple"
    TYPE = "TypeEdge"
    ALIGNMENT = "Alignment"


class Source(str, Enum):
    KG = "KG"
    TEXT = "Text"


class GraphError(ValueError):
    """Raised on invalid graph construction (bad weight, unknown node, ...)."""


@dataclass
class Node:
    id: int
    label: str
    kind: NodeKind
    weight: float
    src: Source = Source.KG
    aliases: frozenset[str] = frozenset()
    provenance: frozenset[str] = frozenset()
    occurrence_index: int = 0


@dataclass
class Edge:
    a: int
    b: int
    kind: EdgeKind
    weight: float
    src: Source = Source.KG
    provenance: frozenset[str] = frozenset()
    # (subject-side, object-side) for triple/type edges; export metadata only
    direction: tuple[int, int] | None = None

    @property
    def key(self) -> tuple[int, int, EdgeKind]:
        return (self.a, self.b, self.kind)

    @property
    def cost(self) -> float:
        return edge_cost(self)

    def other(self, v: int) -> int:
        return self.b if v == self.a else self.a


EdgeKey = tuple[int, int, EdgeKind]


def alignable_kinds(a: NodeKind, b: NodeKind) -> bool:
    """Alignment edges join nodes of one kind; entities and literals count as one."""
    entity_like = (NodeKind.ENTITY, NodeKind.LITERAL)
    return a == b or (a in entity_like and b in entity_like)


def edge_cost(edge: Edge) -> float:
    return 1.0 - edge.weight


def _check_weight(weight: float) -> None:
    if not (0.0 <= weight <= 1.0):
        raise GraphError(f"weight {weight!r} outside [0, 1]")


def _mean(values: Iterable[float]) -> float:
    vals = list(values)
    return sum(vals) / len(vals)


@dataclass(frozen=True)
class GraphStats:
    nodes: dict[str, int]
    edges: dict[str, int]

    @property
    def n_nodes(self) -> int:
        return sum(self.nodes.values())

    @property
    def n_edges(self) -> int:
        return sum(self.edges.values())

    def as_dict(self) -> dict:
        return {"nodes": dict(self.nodes), "edges": dict(self.edges)}


class ContextGraph:
    """Question-specific multigraph with at most one edge per (pair, kind)."""

    def __init__(self) -> None:
        self.nodes: dict[int, Node] = {}
        self.edges: dict[EdgeKey, Edge] = {}
        # evidence id -> relevance score, for every evidence that touched the graph
        self.evidence_scores: dict[str, float] = {}
        self._adj: dict[int, set[EdgeKey]] = defaultdict(set)
        self._by_label: dict[tuple[str, NodeKind], int] = {}
        self._predicates: dict[tuple[str, frozenset[str], int], int] = {}
        self._node_scores: dict[int, dict[str, float]] = defaultdict(dict)
        self._edge_scores: dict[EdgeKey, dict[str, float]] = defaultdict(dict)
        self._next_id = 0
        self.frozen = False

    # -- construction -------------------------------------------------------

    def _writable(self) -> None:
        if self.frozen:
            raise GraphError("graph is frozen")

    def upsert_node(
        self,
        label: str,
        kind: NodeKind,
        weight: float,
        provenance: Iterable[str] = (),
        *,
        src: Source = Source.KG,
        aliases: Iterable[str] = (),
        occurrence: int = 0,
    ) -> int:
        """Insert a node or fold another observation into an existing one.

        Entity, type and literal nodes are keyed by (label, kind). Predicate
        nodes are keyed by (label, evidence ids, occurrence), so the same
        predicate string in two evidences yields two nodes while re-ingesting
        one evidence is idempotent.
        """
        self._writable()
        _check_weight(weight)
        kind = NodeKind(kind)
        prov = frozenset(provenance)
        if kind is NodeKind.PREDICATE:
            key = (label, prov, occurrence)
            nid = self._predicates.get(key)
        else:
            nid = self._by_label.get((label, kind))
        if nid is None:
            nid = self._next_id
            self._next_id += 1
            self.nodes[nid] = Node(
                nid, label, kind, weight, src, frozenset(aliases), prov, occurrence
            )
            if kind is NodeKind.PREDICATE:
                self._predicates[key] = nid
            else:
                self._by_label[(label, kind)] = nid
        node = self.nodes[nid]
        scores = self._node_scores[nid]
        for eid in prov or ("",):
            scores[eid] = weight
        node.weight = _mean(scores.values())
        node.provenance = node.provenance | prov
        if aliases:
            node.aliases = node.aliases | frozenset(aliases)
        return nid

    def upsert_edge(
        self,
        a: int,
        b: int,
        kind: EdgeKind,
        weight: float,
        provenance: Iterable[str] = (),
        *,
        src: Source | None = None,
    ) -> Edge:
        self._writable()
        _check_weight(weight)
        kind = EdgeKind(kind)
        if a not in self.nodes or b not in self.nodes:
            raise GraphError(f"unknown node id in edge ({a}, {b})")
        if a == b:
            raise GraphError(f"self-loop on node {a}")
        if kind is EdgeKind.ALIGNMENT and not alignable_kinds(self.nodes[a].kind, self.nodes[b].kind):
            raise GraphError(
                f"alignment edge across kinds {self.nodes[a].kind.value}"
                f"/{self.nodes[b].kind.value}"
            )
        prov = frozenset(provenance)
        lo, hi = min(a, b), max(a, b)
        key = (lo, hi, kind)
        edge = self.edges.get(key)
        if edge is None:
            direction = (a, b) if kind is not EdgeKind.ALIGNMENT else None
            edge = Edge(lo, hi, kind, weight, src or self.nodes[a].src, prov, direction)
            self.edges[key] = edge
            self._adj[lo].add(key)
            self._adj[hi].add(key)
        scores = self._edge_scores[key]
        for eid in prov or ("",):
            scores[eid] = weight
        edge.weight = _mean(scores.values())
        edge.provenance = edge.provenance | prov
        return edge

    def add_evidence_score(self, evidence_id: str, score: float) -> None:
        _check_weight(score)
        self.evidence_scores[evidence_id] = score

    def freeze(self) -> ContextGraph:
        self.frozen = True
        return self

    # -- queries ------------------------------------------------------------

    def __len__(self) -> int:
        return len(self.nodes)

    def __contains__(self, nid: object) -> bool:
        return nid in self.nodes

    def find(self, label: str, kind: NodeKind) -> int | None:
        """Id of the non-predicate node with this label and kind, if any."""
        return self._by_label.get((label, NodeKind(kind)))

    def incident(self, v: int) -> Iterator[Edge]:
        for key in sorted(self._adj.get(v, ()), key=_edge_sort_key):
            yield self.edges[key]

    def neighbors(self, v: int) -> list[int]:
        return sorted({e.other(v) for e in self.incident(v)})

    def best_edge(self, a: int, b: int) -> Edge | None:
        """Cheapest edge between a and b (ties: triple < type < alignment)."""
        lo, hi = min(a, b), max(a, b)
        found = [self.edges[k] for k in self._adj.get(lo, ()) if k[1] == hi and k[0] == lo]
        if not found:
            return None
        return min(found, key=lambda e: (e.cost, _KIND_ORDER[e.kind]))

    def cost_adjacency(self) -> dict[int, list[tuple[int, float]]]:
        """Simple-graph view for path and tree algorithms: cheapest edge per pair."""
        adj: dict[int, dict[int, float]] = {v: {} for v in self.nodes}
        for e in self.edges.values():
            c = e.cost
            if c < adj[e.a].get(e.b, float("inf")):
                adj[e.a][e.b] = c
                adj[e.b][e.a] = c
        return {v: sorted(nbrs.items()) for v, nbrs in adj.items()}

    def components(self) -> list[set[int]]:
        seen: set[int] = set()
        comps = []
        for start in sorted(self.nodes):
            if start in seen:
                continue
            comp = {start}
            queue = deque([start])
            seen.add(start)
            while queue:
                v = queue.popleft()
                for key in self._adj.get(v, ()):
                    u = key[1] if key[0] == v else key[0]
                    if u not in seen:
                        seen.add(u)
                        comp.add(u)
                        queue.append(u)
            comps.append(comp)
        return comps

    def subgraph(self, node_ids: Iterable[int]) -> ContextGraph:
        """Induced subgraph; node ids are preserved."""
        keep = set(node_ids)
        sub = ContextGraph()
        sub._next_id = self._next_id
        sub.evidence_scores = dict(self.evidence_scores)
        for nid in sorted(keep):
            node = self.nodes[nid]
            sub._restore_node(Node(**vars(node)), self._node_scores.get(nid))
        for key, edge in self.edges.items():
            if edge.a in keep and edge.b in keep:
                sub._restore_edge(Edge(**vars(edge)), self._edge_scores.get(key))
        return sub

    def union(self, other: ContextGraph) -> tuple[ContextGraph, dict[int, int]]:
        """Disjoint union; ``other``'s ids are renumbered after ours, in order."""
        out = self.subgraph(self.nodes)
        out.frozen = False
        mapping: dict[int, int] = {}
        for nid in sorted(other.nodes):
            node = Node(**vars(other.nodes[nid]))
            node.id = out._next_id
            out._next_id += 1
            mapping[nid] = node.id
            out._restore_node(node, other._node_scores.get(nid))
        for key, edge in other.edges.items():
            e = Edge(**vars(edge))
            a, b = mapping[e.a], mapping[e.b]
            e.a, e.b = min(a, b), max(a, b)
            if e.direction is not None:
                e.direction = (mapping[e.direction[0]], mapping[e.direction[1]])
            out._restore_edge(e, other._edge_scores.get(key))
        for eid, score in other.evidence_scores.items():
            out.evidence_scores.setdefault(eid, score)
        return out, mapping

    def _restore_node(self, node: Node, scores: dict[str, float] | None = None) -> None:
        self.nodes[node.id] = node
        self._next_id = max(self._next_id, node.id + 1)
        if node.kind is NodeKind.PREDICATE:
            self._predicates[(node.label, node.provenance, node.occurrence_index)] = node.id
        else:
            self._by_label.setdefault((node.label, node.kind), node.id)
        if scores:
            self._node_scores[node.id] = dict(scores)
        self._adj.setdefault(node.id, set())

    def _restore_edge(self, edge: Edge, scores: dict[str, float] | None = None) -> None:
        self.edges[edge.key] = edge
        self._adj[edge.a].add(edge.key)
        self._adj[edge.b].add(edge.key)
        if scores:
            self._edge_scores[edge.key] = dict(scores)

    # -- serialization --------------------------------------------------------

    def to_records(self) -> list[dict]:
        recs: list[dict] = []
        for eid in sorted(self.evidence_scores):
            recs.append({"record": "evidence", "id": eid, "score": self.evidence_scores[eid]})
        for nid in sorted(self.nodes):
            n = self.nodes[nid]
            recs.append(
                {
                    "record": "node",
                    "id": n.id,
                    "label": n.label,
                    "kind": n.kind.value,
                    "weight": n.weight,
                    "provenance": sorted(n.provenance),
                    "src": n.src.value,
                    "aliases": sorted(n.aliases),
                    "occurrence": n.occurrence_index,
                }
            )
        for key in sorted(self.edges, key=_edge_sort_key):
            e = self.edges[key]
            recs.append(
                {
                    "record": "edge",
                    "id": [e.a, e.b],
                    "label": e.kind.value,
                    "kind": e.kind.value,
                    "weight": e.weight,
                    "provenance": sorted(e.provenance),
                    "src": e.src.value,
                    "direction": list(e.direction) if e.direction else None,
                }
            )
        return recs

    def dump_jsonl(self, fh: IO[str]) -> None:
        for rec in self.to_records():
            fh.write(json.dumps(rec, ensure_ascii=False, sort_keys=True) + "\n")

    @classmethod
    def from_records(cls, records: Iterable[dict]) -> ContextGraph:
        g = cls()
        for rec in records:
            kind = rec.get("record")
            if kind == "evidence":
                g.evidence_scores[rec["id"]] = rec["score"]
            elif kind == "node":
                node = Node(
                    rec["id"],
                    rec["label"],
                    NodeKind(rec["kind"]),
                    rec["weight"],
                    Source(rec["src"]),
                    frozenset(rec.get("aliases", ())),
                    frozenset(rec.get("provenance", ())),
                    rec.get("occurrence", 0),
                )
                g._restore_node(node)
            elif kind == "edge":
                a, b = rec["id"]
                direction = rec.get("direction")
                edge = Edge(
                    min(a, b),
                    max(a, b),
                    EdgeKind(rec["kind"]),
                    rec["weight"],
                    Source(rec["src"]),
                    frozenset(rec.get("provenance", ())),
                    tuple(direction) if direction else None,
                )
                g._restore_edge(edge)
            else:
                raise GraphError(f"unknown record type {kind!r}")
        return g.freeze()

    @classmethod
    def load_jsonl(cls, fh: IO[str]) -> ContextGraph:
        return cls.from_records(json.loads(line) for line in fh if line.strip())


_KIND_ORDER = {EdgeKind.TRIPLE: 0, EdgeKind.TYPE: 1, EdgeKind.ALIGNMENT: 2}


def _edge_sort_key(key: EdgeKey) -> tuple[int, int, int]:
    return (key[0], key[1], _KIND_ORDER[key[2]])


def largest_connected_component(graph: ContextGraph) -> ContextGraph:
    """Induced subgraph on the largest component.

    Ties go to the component holding the lexicographically smallest label
    (then the smallest node id).
    """
    comps = graph.components()
    if not comps:
        return graph.subgraph(())
    best = min(
        comps,
        key=lambda c: (-len(c), min(graph.nodes[v].label for v in c), min(c)),
    )
    if len(best) == len(graph):
        out = graph.subgraph(graph.nodes)
    else:
        out = graph.subgraph(best)
    return out


def graph_stats(graph: ContextGraph) -> GraphStats:
    nodes = {k.value: 0 for k in NodeKind}
    edges = {k.value: 0 for k in EdgeKind}
    for n in graph.nodes.values():
        nodes[n.kind.value] += 1
    for e in graph.edges.values():
        edges[e.kind.value] += 1
    return GraphStats(nodes, edges)


def mean_stats(stats: list[GraphStats]) -> dict:
    if not stats:
        return {"nodes": {}, "edges": {}}
    out: dict[str, dict[str, float]] = {"nodes": {}, "edges": {}}
    for part in ("nodes", "edges"):
        keys = getattr(stats[0], part).keys()
        out[part] = {k: sum(getattr(s, part)[k] for s in stats) / len(stats) for k in keys}
    return out


def tree_graph_dot(
    graph: ContextGraph,
    node_ids: Iterable[int],
    edges: Iterable[Edge],
    *,
    name: str = "G",
    anchors: Iterable[int] = (),
    answers: Iterable[int] = (),
    dashed_nodes: Iterable[int] = (),
) -> str:
    """DOT text for a set of nodes and edges of ``graph``.

    Anchors get underlined labels, answers are bold and filled; alignment
    edges are dotted. Output is deterministic.
    """
    anchors, answers, dashed = set(anchors), set(answers), set(dashed_nodes)
    lines = [f"graph {_dot_id(name)} {{", "  node [fontname=Helvetica];"]
    for nid in sorted(set(node_ids)):
        n = graph.nodes[nid]
        text = _html_escape(n.label)
        if nid in anchors:
            text = f"<U>{text}</U>"
        if nid in answers:
            text = f"<B>{text}</B>"
        attrs = [f"label=<{text}>", "shape=box"]
        # predicates and types are drawn with rounded corners
        styles = [] if n.kind in (NodeKind.ENTITY, NodeKind.LITERAL) else ["rounded"]
        if nid in answers:
            styles.append("filled")
            attrs.append('fillcolor="#ffd27f"')
        if nid in dashed:
            styles.append("dashed")
        if styles:
            attrs.append(f'style="{",".join(styles)}"')
        attrs.append(f'tooltip="{n.kind.value} w={n.weight:.3f}"')
        lines.append(f"  n{nid} [{', '.join(attrs)}];")
    for e in sorted(edges, key=lambda e: _edge_sort_key(e.key)):
        attrs = [f'label="{e.cost:.3f}"']
        if e.kind is EdgeKind.ALIGNMENT:
            attrs.append("style=dotted")
        elif e.kind is EdgeKind.TYPE:
            attrs.append("style=dashed")
        lines.append(f"  n{e.a} -- n{e.b} [{', '.join(attrs)}];")
    lines.append("}")
    return "\n".join(lines) + "\n"


def graph_to_dot(graph: ContextGraph, name: str = "XG") -> str:
    return tree_graph_dot(graph, graph.nodes, graph.edges.values(), name=name)


def _dot_id(name: str) -> str:
    return '"' + name.replace('"', '\\"') + '"'


def _html_escape(text: str) -> str:
    return (
        text.replace("&", "&amp;").replace("<", "&lt;").replace(">", "&gt;").replace('"', "&quot;")
    )


__all__ = [
    "ContextGraph",
    "Edge",
    "EdgeKind",
    "GraphError",
    "GraphStats",
    "Node",
    "NodeKind",
    "Source",
    "alignable_kinds",
    "edge_cost",
    "graph_stats",
    "graph_to_dot",
    "largest_connected_component",
    "mean_stats",
    "tree_graph_dot",
]
