"""P@1 of every mode, ranking strategy and baseline on a question set.

Usage: python scripts/run_benchmark.py [CONFIG] [QUESTIONS]
(defaults: the toy benchmark under data/toy)
"""

from __future__ import annotations

import argparse
from pathlib import Path

from hetqa.pipeline import (
    BASELINES,
    MODES,
    Artifacts,
    baseline_answers,
    load_config,
    load_questions,
    load_resources,
    run_benchmark,
    run_pipeline,
)
from hetqa.ranking import Strategy, evaluate_p_at_1

TOY = Path(__file__).resolve().parent.parent / "data" / "toy"


def baseline_p1(cfg, res, questions, method: str) -> float:
    hits = 0
    for q in questions:
        art = run_pipeline(cfg, res, q, Artifacts(trees=[], ranked=[])).artifacts
        if art.graph is None or not art.groups:
            continue
        hits += evaluate_p_at_1(art.graph, baseline_answers(cfg, art.graph, art.groups, method), q.gold)
    return hits / len(questions)


def main() -> None:
    ap = argparse.ArgumentParser()
    ap.add_argument("config", nargs="?", default=str(TOY / "config.txt"))
    ap.add_argument("questions", nargs="?", default=str(TOY / "questions.jsonl"))
    args = ap.parse_args()
    questions = load_questions(args.questions)
    print(f"{'mode':8} {'method':24} P@1")
    for mode in MODES:
        cfg = load_config(args.config, mode=mode)
        res = load_resources(cfg)
        for strategy in Strategy:
            report = run_benchmark(cfg.with_overrides(strategy=strategy.value), questions, res)
            print(f"{mode:8} {strategy.value:24} {report.p_at_1:.3f}")
        for method in BASELINES:
            print(f"{mode:8} {method:24} {baseline_p1(cfg, res, questions, method):.3f}")


if __name__ == "__main__":
    main()
