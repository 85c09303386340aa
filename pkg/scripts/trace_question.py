"""Print every stage of one question's run: scores, graph, anchors, trees, ranking.

Usage: python scripts/trace_question.py CONFIG QUESTIONS [QID] [--mode MODE]
"""

from __future__ import annotations

import argparse

from hetqa.graph import graph_stats
from hetqa.pipeline import load_config, load_questions, load_resources, run_pipeline


def main() -> None:
    ap = argparse.ArgumentParser()
    ap.add_argument("config")
    ap.add_argument("questions")
    ap.add_argument("qid", nargs="?")
    ap.add_argument("--mode")
    ap.add_argument("--trees", type=int, default=10)
    args = ap.parse_args()
    cfg = load_config(args.config, mode=args.mode)
    res = load_resources(cfg)
    for q in load_questions(args.questions):
        if args.qid and q.id != args.qid:
            continue
        out = run_pipeline(cfg, res, q)
        art = out.artifacts
        print(f"== {q.id} [{cfg.mode}] {q.question}")
        for ev in art.pool or ():
            mark = "*" if art.selected and ev.id in {e.id for e in art.selected} else " "
            sel = next((e for e in art.selected or () if e.id == ev.id), None)
            print(f" {mark} {ev.id:14} {sel.score if sel else '':<6} {ev.text[:90]}")
        g = art.graph
        if g is None:
            print("error:", out.error)
            continue
        print(" graph:", graph_stats(g).as_dict())
        for nid, n in sorted(g.nodes.items()):
            print(f"   {nid:3} {n.kind.value:9} {n.src.value:4} w={n.weight:.3f} {n.label}")
        for e in sorted(g.edges.values(), key=lambda e: (e.a, e.b)):
            print(f"   {e.a:3}-{e.b:<3} {e.kind.value:9} w={e.weight:.3f}")
        for grp in art.groups or ():
            print(f" group {grp.token!r}: {[g.nodes[m].label for m in grp.members]}")
        for i, t in enumerate((art.trees or [])[: args.trees]):
            labels = sorted(g.nodes[v].label for v in t.nodes)
            att = sorted(g.nodes[v].label for v in t.attachments)
            print(f" tree {i} cost={t.cost:.3f} {labels} +{att}")
        for a in (art.ranked or [])[:6]:
            print(f" rank {a.rank}: {a.label} score={a.score:.3f} w={g.nodes[a.node].weight:.3f}")
        print(" result:", out.result["p_at_1"], out.result["bucket"], out.error or "")


if __name__ == "__main__":
    main()
