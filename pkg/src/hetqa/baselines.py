"""Graph-search baselines: round-robin BFS meeting points and shortest-path hubs."""

from __future__ import annotations

import heapq
from collections import deque
from collections.abc import Iterable, Sequence
from dataclasses import dataclass
from itertools import combinations

from hetqa.graph import ContextGraph

DEFAULT_BFS_ITERATIONS = 1000
_EPS = 1e-9


@dataclass(frozen=True)
class BaselineCandidate:
    node: int
    score: float


def _rank(scores: dict[int, float]) -> list[BaselineCandidate]:
    order = sorted(scores.items(), key=lambda kv: (-kv[1], kv[0]))
    return [BaselineCandidate(v, s) for v, s in order]


def bfs_baseline(
    graph: ContextGraph,
    groups: Sequence[Iterable[int]],
    iterations: int = DEFAULT_BFS_ITERATIONS,
) -> list[BaselineCandidate]:
    """Nodes reached by an iterator of every group, ranked by iterators met.

    One iterator starts at each anchor node of each group. An iteration is
    one round-robin pass in which every live iterator dequeues one node and
    marks its unvisited neighbours (ascending id) as visited.
    """
    if iterations < 1:
        raise ValueError("iteration cap must be >= 1")
    groups = [sorted(set(g)) for g in groups]
    iters = [(gi, v) for gi, g in enumerate(groups) for v in g]
    visited = [{v} for _, v in iters]
    queues = [deque([v]) for _, v in iters]
    for _ in range(iterations):
        live = False
        for i, q in enumerate(queues):
            if not q:
                continue
            live = True
            v = q.popleft()
            for u in graph.neighbors(v):
                if u not in visited[i]:
                    visited[i].add(u)
                    q.append(u)
        if not live:
            break

    met: dict[int, set[int]] = {}
    for i, seen in enumerate(visited):
        for v in seen:
            met.setdefault(v, set()).add(i)
    scores = {}
    for v, its in met.items():
        if {iters[i][0] for i in its} == set(range(len(groups))):
            scores[v] = float(len(its))
    return _rank(scores)


def _dijkstra(adj: dict[int, list[tuple[int, float]]], source: int):
    """Distances and shortest-path counts from ``source``."""
    dist = {source: 0.0}
    sigma = {source: 1}
    done: set[int] = set()
    heap = [(0.0, source)]
    while heap:
        d, v = heapq.heappop(heap)
        if v in done:
            continue
        done.add(v)
        for u, c in adj[v]:
            nd = d + c
            old = dist.get(u)
            if old is None or nd < old - _EPS:
                dist[u] = nd
                sigma[u] = sigma[v]
                heapq.heappush(heap, (nd, u))
            elif abs(nd - old) <= _EPS and u not in done:
                sigma[u] += sigma[v]
    return dist, sigma


def shortest_paths_baseline(
    graph: ContextGraph, groups: Sequence[Iterable[int]]
) -> list[BaselineCandidate]:
    """Nodes ranked by how many anchor-to-anchor shortest paths pass through them.

    Every unordered pair of distinct anchor nodes contributes all its
    minimum-cost paths; path endpoints are not counted.
    """
    anchors = sorted({v for g in groups for v in g})
    adj = graph.cost_adjacency()
    runs = {a: _dijkstra(adj, a) for a in anchors}
    scores: dict[int, float] = {}
    for s, t in combinations(anchors, 2):
        ds, ss = runs[s]
        dt, st = runs[t]
        if t not in ds:
            continue
        total = ds[t]
        for v in ds:
            if v in (s, t) or v not in dt:
                continue
            if abs(ds[v] + dt[v] - total) <= _EPS:
                scores[v] = scores.get(v, 0.0) + ss[v] * st[v]
    return _rank(scores)


__all__ = [
    "DEFAULT_BFS_ITERATIONS",
    "BaselineCandidate",
    "bfs_baseline",
    "shortest_paths_baseline",
]
