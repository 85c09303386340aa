"""Wall-clock time of the top-k tree search on random graphs of growing size.

Usage: python scripts/gst_scaling.py [--sizes 50 100 200] [--groups 3] [--k 10]
"""

from __future__ import annotations

import argparse
import random
import statistics
import time

from hetqa.graph import ContextGraph, EdgeKind, NodeKind
from hetqa.gst import solve_topk


def random_graph(rng: random.Random, n: int, degree: float) -> ContextGraph:
    g = ContextGraph()
    for i in range(n):
        g.upsert_node(f"v{i:05d}", NodeKind.ENTITY, rng.random())
    for i in range(1, n):
        g.upsert_edge(rng.randrange(i), i, EdgeKind.TRIPLE, rng.random())
    for _ in range(int(n * (degree / 2 - 1))):
        a, b = rng.sample(range(n), 2)
        g.upsert_edge(a, b, EdgeKind.TRIPLE, rng.random())
    return g


def main() -> None:
    ap = argparse.ArgumentParser()
    ap.add_argument("--sizes", type=int, nargs="+", default=[50, 100, 200, 400])
    ap.add_argument("--groups", type=int, default=3)
    ap.add_argument("--group-size", type=int, default=2)
    ap.add_argument("--degree", type=float, default=4.0)
    ap.add_argument("--k", type=int, default=10)
    ap.add_argument("--reps", type=int, default=5)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    rng = random.Random(args.seed)
    print(f"{'nodes':>6} {'median s':>9} {'max s':>8}")
    for n in args.sizes:
        times = []
        for _ in range(args.reps):
            g = random_graph(rng, n, args.degree)
            groups = [rng.sample(range(n), args.group_size) for _ in range(args.groups)]
            t0 = time.perf_counter()
            solve_topk(g, groups, args.k)
            times.append(time.perf_counter() - t0)
        print(f"{n:>6} {statistics.median(times):>9.3f} {max(times):>8.3f}")


if __name__ == "__main__":
    main()
