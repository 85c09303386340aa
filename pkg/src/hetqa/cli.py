"""Command-line entry point.

Subcommands: answer, eval, build-xg, gst, baseline, stats. Every subcommand
accepts ``--config FILE`` (key = value lines) and flag overrides.
"""

from __future__ import annotations

import argparse
import json
import sys
from collections.abc import Sequence
from pathlib import Path

from hetqa.graph import graph_stats, graph_to_dot, mean_stats
from hetqa.pipeline import (
    BASELINES,
    MODES,
    Artifacts,
    ConfigError,
    PipelineConfig,
    QuestionRecord,
    baseline_answers,
    dump_artifacts,
    export_explanation,
    load_config,
    load_questions,
    load_resources,
    run_benchmark,
    run_pipeline,
)
from hetqa.ranking import Strategy, evaluate_p_at_1

EXIT_CONFIG = 2


def _config_args(p: argparse.ArgumentParser) -> None:
    g = p.add_argument_group("configuration (flags override the config file)")
    g.add_argument("--config", help="key = value configuration file")
    g.add_argument("--mode", choices=MODES)
    g.add_argument("--kg", dest="kg_path", help="KG facts, JSON lines")
    g.add_argument("--docs", dest="docs_path", help="annotated documents, JSON lines")
    g.add_argument("--embeddings", dest="embeddings_path", help="word vectors, text format")
    g.add_argument("--scores", dest="scores_path", help="external evidence scores, JSON lines")
    g.add_argument("--scorer", choices=("lexical", "external"))
    g.add_argument("--epsilon", type=int)
    g.add_argument("-k", "--k", type=int)
    g.add_argument("--window", type=int)
    g.add_argument("--tau-entity", type=float)
    g.add_argument("--tau-predicate", type=float)
    g.add_argument("--strategy", choices=[s.value for s in Strategy])
    g.add_argument("--group-cap", type=int)
    g.add_argument("--min-snippet-matches", type=int)
    g.add_argument("--bfs-iterations", type=int)


def _question_args(p: argparse.ArgumentParser, batch_ok: bool = True) -> None:
    g = p.add_argument_group("question input")
    g.add_argument("--question", "-q", help="question text")
    g.add_argument(
        "--nerd", action="append", default=[], metavar="MENTION=ENTITY",
        help="entity annotation for the question (repeatable)",
    )
    g.add_argument("--doc-id", action="append", dest="doc_ids", help="restrict to these documents")
    if batch_ok:
        g.add_argument("--questions", help="question file, JSON lines")
        g.add_argument("--id", dest="qid", help="pick one question from --questions by id")


def _config(args: argparse.Namespace) -> PipelineConfig:
    names = [
        "mode", "kg_path", "docs_path", "embeddings_path", "scores_path", "scorer", "epsilon",
        "k", "window", "tau_entity", "tau_predicate", "strategy", "group_cap",
        "min_snippet_matches", "bfs_iterations",
    ]
    overrides = {n: getattr(args, n, None) for n in names}
    return load_config(args.config, **overrides)


def _parse_nerd(items: Sequence[str]) -> tuple[tuple[str, str], ...]:
    out = []
    for item in items:
        mention, sep, entity = item.partition("=")
        if not sep or not mention.strip():
            raise ConfigError(f"--nerd expects MENTION=ENTITY, got {item!r}")
        out.append((mention.strip(), entity.strip() or mention.strip()))
    return tuple(out)


def _questions(args: argparse.Namespace) -> list[QuestionRecord]:
    if getattr(args, "question", None):
        doc_ids = tuple(args.doc_ids) if args.doc_ids else None
        return [QuestionRecord("q", args.question, _parse_nerd(args.nerd), doc_ids)]
    path = getattr(args, "questions", None)
    if not path:
        raise ConfigError("give --question or --questions")
    try:
        qs = load_questions(path)
    except OSError as exc:
        raise ConfigError(f"cannot read questions: {exc}") from None
    if getattr(args, "qid", None):
        qs = [q for q in qs if q.id == args.qid]
        if not qs:
            raise ConfigError(f"no question with id {args.qid!r}")
    return qs


def _dump(obj: object) -> None:
    print(json.dumps(obj, ensure_ascii=False, sort_keys=True, indent=1))


def cmd_answer(args: argparse.Namespace) -> int:
    cfg = _config(args)
    res = load_resources(cfg)
    for q in _questions(args):
        out = run_pipeline(cfg, res, q)
        rec = dict(out.result)
        rec["answers"] = rec["answers"][: args.top]
        _dump(rec)
        if args.dump:
            dump_artifacts(out.artifacts, Path(args.dump) / (q.id or "q"))
        if args.explain and out.artifacts.trees:
            data = export_explanation(out, args.explain, top=args.explain_top)
            if args.explain_out:
                Path(args.explain_out).write_bytes(data)
            else:
                sys.stdout.write(data.decode())
    return 0


def cmd_eval(args: argparse.Namespace) -> int:
    cfg = _config(args)
    qs = _questions(args)
    report = run_benchmark(cfg, qs)
    if args.results:
        with open(args.results, "w", encoding="utf-8") as fh:
            fh.writelines(json.dumps(r, ensure_ascii=False, sort_keys=True) + "\n" for r in report.results)
    _dump(report.summary())
    return 0


def _graph_for(cfg: PipelineConfig, res, q: QuestionRecord) -> Artifacts:
    # run up to the anchor stage only
    out = run_pipeline(cfg, res, q, Artifacts(trees=[], ranked=[]))
    if out.error:
        print(f"{q.id}: {out.error}", file=sys.stderr)
    return out.artifacts


def cmd_build_xg(args: argparse.Namespace) -> int:
    cfg = _config(args)
    res = load_resources(cfg)
    for q in _questions(args):
        art = _graph_for(cfg, res, q)
        if art.graph is None:
            continue
        if args.format == "dot":
            text = graph_to_dot(art.graph, name=q.id or "XG")
        else:
            lines = [json.dumps(r, ensure_ascii=False, sort_keys=True) for r in art.graph.to_records()]
            text = "\n".join(lines) + "\n"
        if args.out:
            Path(args.out).write_text(text, encoding="utf-8")
        else:
            sys.stdout.write(text)
        print(json.dumps({"id": q.id, **graph_stats(art.graph).as_dict()}), file=sys.stderr)
    return 0


def cmd_gst(args: argparse.Namespace) -> int:
    cfg = _config(args)
    res = load_resources(cfg)
    for q in _questions(args):
        out = run_pipeline(cfg, res, q)
        if not out.artifacts.trees:
            print(f"{q.id}: {out.error or 'no trees'}", file=sys.stderr)
            continue
        sys.stdout.write(export_explanation(out, args.format).decode())
    return 0


def cmd_baseline(args: argparse.Namespace) -> int:
    cfg = _config(args)
    res = load_resources(cfg)
    hits = 0
    qs = _questions(args)
    for q in qs:
        art = _graph_for(cfg, res, q)
        answers = []
        if art.graph is not None and art.groups:
            answers = baseline_answers(cfg, art.graph, art.groups, args.method)
        p1 = evaluate_p_at_1(art.graph, answers, q.gold) if q.gold and art.graph else 0
        hits += p1
        rec = {
            "id": q.id,
            "method": args.method,
            "answers": [a.to_record() for a in answers[: args.top]],
            "p_at_1": p1,
        }
        print(json.dumps(rec, ensure_ascii=False, sort_keys=True))
    if len(qs) > 1:
        print(json.dumps({"method": args.method, "p_at_1": hits / len(qs)}))
    return 0


def cmd_stats(args: argparse.Namespace) -> int:
    cfg = _config(args)
    res = load_resources(cfg)
    stats = []
    for q in _questions(args):
        art = _graph_for(cfg, res, q)
        if art.graph is not None:
            stats.append(graph_stats(art.graph))
    _dump({"mode": cfg.mode, "graphs": len(stats), **mean_stats(stats)})
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hetqa", description="Question answering over KG facts and text via group Steiner trees."
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("answer", help="answer questions and print ranked answers")
    _config_args(p)
    _question_args(p)
    p.add_argument("--top", type=int, default=5, help="answers to print")
    p.add_argument("--explain", choices=("json", "dot"), help="also export the answer trees")
    p.add_argument("--explain-top", type=int, help="limit exported trees")
    p.add_argument("--explain-out", help="file for the explanation (default stdout)")
    p.add_argument("--dump", help="directory for intermediate artifacts")
    p.set_defaults(func=cmd_answer)

    p = sub.add_parser("eval", help="P@1, error buckets and graph statistics over a question file")
    _config_args(p)
    _question_args(p)
    p.add_argument("--results", help="write per-question results as JSON lines")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("build-xg", help="build and print the context graph")
    _config_args(p)
    _question_args(p)
    p.add_argument("--format", choices=("jsonl", "dot"), default="jsonl")
    p.add_argument("--out")
    p.set_defaults(func=cmd_build_xg)

    p = sub.add_parser("gst", help="print the top-k trees")
    _config_args(p)
    _question_args(p)
    p.add_argument("--format", choices=("json", "dot"), default="json")
    p.set_defaults(func=cmd_gst)

    p = sub.add_parser("baseline", help="BFS or shortest-path baseline on the same graphs")
    _config_args(p)
    _question_args(p)
    p.add_argument("--method", choices=BASELINES, default="bfs")
    p.add_argument("--top", type=int, default=5)
    p.set_defaults(func=cmd_baseline)

    p = sub.add_parser("stats", help="mean context-graph sizes")
    _config_args(p)
    _question_args(p)
    p.set_defaults(func=cmd_stats)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
