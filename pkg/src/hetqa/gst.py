"""Top-k group Steiner trees by best-first dynamic programming.

States are (root node, covered-group bitmask). A state's entries are real
trees containing the root and covering at least the masked groups. Entries
are produced by two transitions, both popped from one priority queue in
order of tree cost:

* grow: tree(v, S) plus edge (v, u) gives tree(u, S), when u is not yet in the tree;
* merge: tree(v, S1) and tree(v, S2) with disjoint masks and only v in common
  give tree(v, S1 | S2).

Every state keeps up to k distinct entries. Trees whose mask covers all
groups are emitted in pop order, which is nondecreasing in cost; emission
stops after k trees with pairwise distinct edge sets.
"""

from __future__ import annotations

import heapq
from collections.abc import Iterable, Sequence
from dataclasses import dataclass, replace

from hetqa.graph import ContextGraph, EdgeKind, NodeKind

DEFAULT_GROUP_CAP = 10


class DisconnectedGroupsError(ValueError):
    def __init__(self, groups: Sequence[int]) -> None:
        self.groups = tuple(groups)
        super().__init__(f"anchor groups {list(self.groups)} cannot be connected to the others")


@dataclass(frozen=True)
class SteinerTree:
    nodes: frozenset[int]
    edges: frozenset[tuple[int, int]]
    cost: float
    covered: int = 0
    attachments: frozenset[int] = frozenset()

    @property
    def key(self) -> tuple[tuple[int, ...], tuple[tuple[int, int], ...]]:
        return (tuple(sorted(self.nodes)), tuple(sorted(self.edges)))

    @property
    def all_nodes(self) -> frozenset[int]:
        return self.nodes | self.attachments

    def to_record(self, graph: ContextGraph | None = None) -> dict:
        rec = {
            "cost": self.cost,
            "nodes": sorted(self.nodes),
            "edges": [list(e) for e in sorted(self.edges)],
            "attachments": sorted(self.attachments),
        }
        if graph is not None:
            rec["labels"] = {str(n): graph.nodes[n].label for n in sorted(self.all_nodes)}
        return rec

    @classmethod
    def from_record(cls, rec: dict) -> SteinerTree:
        return cls(
            frozenset(rec["nodes"]),
            frozenset(tuple(e) for e in rec["edges"]),
            rec["cost"],
            rec.get("covered", 0),
            frozenset(rec.get("attachments", ())),
        )


def _group_masks(graph: ContextGraph, groups: Sequence[Iterable[int]]) -> dict[int, int]:
    masks: dict[int, int] = {}
    for i, members in enumerate(groups):
        members = list(members)
        if not members:
            raise ValueError(f"anchor group {i} is empty")
        for v in members:
            if v not in graph.nodes:
                raise ValueError(f"anchor {v} of group {i} is not in the graph")
            masks[v] = masks.get(v, 0) | (1 << i)
    return masks


def check_connected(graph: ContextGraph, groups: Sequence[Iterable[int]]) -> None:
    """Raise :class:`DisconnectedGroupsError` unless one component touches every group."""
    masks = _group_masks(graph, groups)
    full = (1 << len(groups)) - 1
    best = 0
    for comp in graph.components():
        cover = 0
        for v in comp:
            cover |= masks.get(v, 0)
        if cover == full:
            return
        if (cover).bit_count() > (best).bit_count():
            best = cover
    raise DisconnectedGroupsError([i for i in range(len(groups)) if not best >> i & 1])


def _covered(nodes: Iterable[int], masks: dict[int, int]) -> int:
    out = 0
    for v in nodes:
        out |= masks.get(v, 0)
    return out


def _leaves_are_anchors(nodes: Sequence[int], edges: Sequence[tuple[int, int]], masks) -> bool:
    if len(nodes) == 1:
        return True
    degree: dict[int, int] = {}
    for a, b in edges:
        degree[a] = degree.get(a, 0) + 1
        degree[b] = degree.get(b, 0) + 1
    return all(v in masks for v, d in degree.items() if d == 1)


def tree_leaves(tree: SteinerTree) -> set[int]:
    if len(tree.nodes) == 1:
        return set(tree.nodes)
    degree: dict[int, int] = {}
    for a, b in tree.edges:
        degree[a] = degree.get(a, 0) + 1
        degree[b] = degree.get(b, 0) + 1
    return {v for v, d in degree.items() if d == 1}


def solve_topk(
    graph: ContextGraph,
    groups: Sequence[Iterable[int]],
    k: int = 10,
    *,
    group_cap: int = DEFAULT_GROUP_CAP,
) -> list[SteinerTree]:
    """Up to ``k`` distinct group-covering trees in nondecreasing cost.

    The first tree is a minimum-cost group Steiner tree. Only trees whose
    leaves are all anchors are returned: a tree with a non-anchor leaf is the
    same answer structure plus a useless edge. Ties are broken by the sorted
    node-id sequence.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    groups = [sorted(set(g)) for g in groups]
    if not 1 <= len(groups) <= group_cap:
        raise ValueError(f"need between 1 and {group_cap} anchor groups, got {len(groups)}")
    masks = _group_masks(graph, groups)
    check_connected(graph, groups)
    full = (1 << len(groups)) - 1
    adj = graph.cost_adjacency()

    # heap item: (cost, nodes, edges, root, mask); nodes/edges are sorted tuples
    heap: list = []
    for i, members in enumerate(groups):
        for v in members:
            heap.append((0.0, (v,), (), v, 1 << i))
    heapq.heapify(heap)

    accepted: dict[int, dict[int, list[tuple[frozenset[int], tuple, float]]]] = {}
    seen: set[tuple] = set()
    results: list[SteinerTree] = []
    emitted: set[tuple] = set()

    while heap and len(results) < k:
        cost, nodes_t, edges_t, v, mask = heapq.heappop(heap)
        state_key = (v, mask, nodes_t, edges_t)
        if state_key in seen:
            continue
        by_mask = accepted.setdefault(v, {})
        entries = by_mask.setdefault(mask, [])
        if len(entries) >= k:
            continue
        seen.add(state_key)
        nodes = frozenset(nodes_t)
        entries.append((nodes, edges_t, cost))

        # a tree is identified by its edge set; of several single-node trees
        # only the first (cheapest, smallest id) is emitted
        if mask == full and edges_t not in emitted and _leaves_are_anchors(
            nodes_t, edges_t, masks
        ):
            emitted.add(edges_t)
            results.append(
                SteinerTree(nodes, frozenset(edges_t), cost, _covered(nodes, masks))
            )
            if len(results) >= k:
                break

        for u, c in adj[v]:
            if u in nodes:
                continue
            edge = (v, u) if v < u else (u, v)
            heapq.heappush(
                heap,
                (cost + c, tuple(sorted(nodes_t + (u,))), tuple(sorted(edges_t + (edge,))), u, mask),
            )
        for other_mask, others in list(by_mask.items()):
            if other_mask & mask:
                continue
            for o_nodes, o_edges, o_cost in others:
                if len(nodes & o_nodes) != 1:
                    continue
                heapq.heappush(
                    heap,
                    (
                        cost + o_cost,
                        tuple(sorted(nodes | o_nodes)),
                        tuple(sorted(edges_t + o_edges)),
                        v,
                        mask | other_mask,
                    ),
                )
    results.sort(key=lambda t: (t.cost, t.key[0]))
    return results


def tree_cost(graph: ContextGraph, edges: Iterable[tuple[int, int]]) -> float:
    return sum(graph.best_edge(a, b).cost for a, b in edges)


def _find(parent: list[int], x: int) -> int:
    while parent[x] != x:
        parent[x] = parent[parent[x]]
        x = parent[x]
    return x


def brute_force_gst(graph: ContextGraph, groups: Sequence[Iterable[int]]) -> SteinerTree:
    """Exhaustive optimum: cheapest spanning tree over every covering node subset.

    Test oracle; limited to 15 nodes.
    """
    order = sorted(graph.nodes)
    n = len(order)
    if n > 15:
        raise ValueError("brute force is limited to 15 nodes")
    groups = [sorted(set(g)) for g in groups]
    masks = _group_masks(graph, groups)
    check_connected(graph, groups)
    pos = {v: i for i, v in enumerate(order)}
    group_bits = [sum(1 << pos[v] for v in g) for g in groups]

    pair_cost: dict[tuple[int, int], float] = {}
    for e in graph.edges.values():
        key = (pos[e.a], pos[e.b]) if pos[e.a] < pos[e.b] else (pos[e.b], pos[e.a])
        pair_cost[key] = min(pair_cost.get(key, float("inf")), e.cost)
    edges = sorted((c, a, b) for (a, b), c in pair_cost.items())

    best: tuple[float, tuple[int, ...]] | None = None
    best_edges: list[tuple[int, int]] = []
    for subset in range(1, 1 << n):
        if any(not subset & gb for gb in group_bits):
            continue
        size = (subset).bit_count()
        parent = list(range(n))
        total = 0.0
        picked: list[tuple[int, int]] = []
        for c, a, b in edges:
            if len(picked) == size - 1:
                break
            if not (subset >> a & 1 and subset >> b & 1):
                continue
            ra, rb = _find(parent, a), _find(parent, b)
            if ra == rb:
                continue
            parent[ra] = rb
            total += c
            picked.append((a, b))
            if best is not None and total > best[0]:
                break
        if len(picked) != size - 1:
            continue
        members = tuple(order[i] for i in range(n) if subset >> i & 1)
        cand = (total, members)
        if best is None or cand < best:
            best = cand
            best_edges = picked
    assert best is not None
    tree_edges = frozenset(
        (order[a], order[b]) if order[a] < order[b] else (order[b], order[a]) for a, b in best_edges
    )
    nodes = frozenset(best[1])
    return SteinerTree(nodes, tree_edges, best[0], _covered(nodes, masks))


def predicate_evidence_nodes(graph: ContextGraph, predicate: int) -> set[int]:
    """Nodes of the triple (and qualifier chain) a predicate node came from.

    Follows triple and type edges that share the predicate's provenance,
    passing through further predicate nodes (qualifier predicates).
    """
    prov = graph.nodes[predicate].provenance
    out: set[int] = set()
    stack = [predicate]
    seen = {predicate}
    while stack:
        v = stack.pop()
        for e in graph.incident(v):
            if e.kind is EdgeKind.ALIGNMENT or not (e.provenance & prov):
                continue
            u = e.other(v)
            if u in seen:
                continue
            seen.add(u)
            out.add(u)
            if graph.nodes[u].kind is NodeKind.PREDICATE:
                stack.append(u)
    return out


def augment_predicate_evidence(
    tree: SteinerTree, graph: ContextGraph, anchor_nodes: Iterable[int]
) -> SteinerTree:
    """Attach the full evidence of every predicate anchor dangling from the tree.

    A predicate anchor dangles when it is a leaf: the tree reached it from one
    side only, so the rest of its triple (and qualifiers) is attached.
    Attached nodes are recorded separately; the tree's cost is unchanged.
    """
    anchors = set(anchor_nodes)
    extra: set[int] = set()
    for v in sorted(tree_leaves(tree)):
        if v in anchors and graph.nodes[v].kind is NodeKind.PREDICATE:
            extra |= predicate_evidence_nodes(graph, v)
    extra -= tree.nodes
    if not extra and not tree.attachments:
        return tree
    return replace(tree, attachments=tree.attachments | frozenset(extra))


def tree_edges_full(graph: ContextGraph, tree: SteinerTree):
    """Graph edges of the tree, plus the edges tying attachments to it."""
    edges = [graph.best_edge(a, b) for a, b in sorted(tree.edges)]
    if tree.attachments:
        inside = tree.all_nodes
        for v in sorted(tree.attachments):
            for e in graph.incident(v):
                if e.kind is not EdgeKind.ALIGNMENT and e.other(v) in inside and e not in edges:
                    edges.append(e)
    return edges


__all__ = [
    "DEFAULT_GROUP_CAP",
    "DisconnectedGroupsError",
    "SteinerTree",
    "augment_predicate_evidence",
    "brute_force_gst",
    "check_connected",
    "predicate_evidence_nodes",
    "solve_topk",
    "tree_cost",
    "tree_edges_full",
    "tree_leaves",
]
