"""End-to-end answering: retrieval, scoring, graph, anchors, trees, ranking.

Each stage consumes the previous stage's artifact, and every artifact can be
dumped and reloaded so that a run can resume from any stage boundary.
"""

from __future__ import annotations

import json
import time
from collections.abc import Iterable, Mapping, Sequence
from dataclasses import asdict, dataclass, field, fields, replace
from pathlib import Path
from typing import IO, Any

from hetqa.anchors import AnchorGroup, NoAnchorsError, cap_groups, detect_anchors
from hetqa.baselines import bfs_baseline, shortest_paths_baseline
from hetqa.graph import (
    ContextGraph,
    GraphStats,
    NodeKind,
    graph_stats,
    mean_stats,
    tree_graph_dot,
)
from hetqa.gst import (
    DEFAULT_GROUP_CAP,
    DisconnectedGroupsError,
    SteinerTree,
    augment_predicate_evidence,
    solve_topk,
    tree_edges_full,
)
from hetqa.ingest.evidence import Evidence, fact_evidence, snippet_evidence
from hetqa.ingest.kg import TripleStore, load_kg_facts
from hetqa.ingest.text import (
    AnnotatedDocument,
    extract_snippets,
    load_documents,
    resolve_pronouns,
)
from hetqa.question import EmptyQuestionError, Question, tokenize_question
from hetqa.ranking import (
    BUCKET_LABELS,
    GoldAnswer,
    NoCandidatesError,
    RankedAnswer,
    Trace,
    error_bucket,
    evaluate_p_at_1,
    extract_candidates,
    parse_strategy,
    rank_candidates,
)
from hetqa.relevance import (
    EXTERNAL,
    LEXICAL,
    MissingScoreError,
    ScorerSpec,
    load_external_scores,
    score_all,
    score_evidence,
    select_top_evidences,
)
from hetqa.xg import (
    AlignmentConfig,
    Embeddings,
    build_kg_subgraph,
    build_text_quasi_graph,
    merge_heterogeneous,
)

KG, TEXT, HETERO = "KG", "Text", "Hetero"
MODES = (KG, TEXT, HETERO)

# (tau_entity, tau_predicate) per mode; the KG-only graph is never aligned
MODE_THRESHOLDS: dict[str, tuple[float, float] | None] = {
    HETERO: (0.8, 0.7),
    TEXT: (0.5, 0.9),
    KG: None,
}

STAGES = ("retrieve", "select", "xg", "anchors", "gst", "rank")


class ConfigError(ValueError):
    pass


@dataclass
class PipelineConfig:
    mode: str = HETERO
    epsilon: int = 5
    k: int = 10
    window: int = 50
    tau_entity: float | None = None
    tau_predicate: float | None = None
    scorer: str = LEXICAL
    strategy: str = "GstCount"
    group_cap: int = DEFAULT_GROUP_CAP
    min_snippet_matches: int = 1
    bfs_iterations: int = 1000
    kg_path: str | None = None
    docs_path: str | None = None
    embeddings_path: str | None = None
    scores_path: str | None = None

    def __post_init__(self) -> None:
        self.validate()

    def validate(self) -> None:
        if self.mode not in MODES:
            raise ConfigError(f"mode must be one of {MODES}, got {self.mode!r}")
        for name in ("epsilon", "k", "window", "group_cap", "min_snippet_matches", "bfs_iterations"):
            if getattr(self, name) < 1:
                raise ConfigError(f"{name} must be >= 1")
        if self.scorer not in (LEXICAL, EXTERNAL):
            raise ConfigError(f"scorer must be {LEXICAL!r} or {EXTERNAL!r}")
        if self.scorer == EXTERNAL and not self.scores_path:
            raise ConfigError("the external scorer needs scores_path")
        try:
            parse_strategy(self.strategy)
        except ValueError as exc:
            raise ConfigError(str(exc)) from None
        for name in ("tau_entity", "tau_predicate"):
            tau = getattr(self, name)
            if tau is not None and not 0.0 < tau <= 1.0:
                raise ConfigError(f"{name}={tau} must lie in (0, 1]")

    def require_inputs(self) -> None:
        if self.mode in (KG, HETERO) and not self.kg_path:
            raise ConfigError(f"mode {self.mode} needs kg_path")
        if self.mode in (TEXT, HETERO) and not self.docs_path:
            raise ConfigError(f"mode {self.mode} needs docs_path")

    def thresholds(self) -> tuple[float, float] | None:
        base = MODE_THRESHOLDS[self.mode]
        if base is None:
            return None
        return (
            self.tau_entity if self.tau_entity is not None else base[0],
            self.tau_predicate if self.tau_predicate is not None else base[1],
        )

    def with_overrides(self, **overrides: Any) -> PipelineConfig:
        return replace(self, **{k: v for k, v in overrides.items() if v is not None})

    def to_dict(self) -> dict:
        return asdict(self)


_FIELD_TYPES = {f.name: f.type for f in fields(PipelineConfig)}


def _coerce(key: str, value: str) -> Any:
    kind = _FIELD_TYPES[key]
    if value.lower() in ("", "none", "null") and "None" in str(kind):
        return None
    if kind in ("int", int):
        return int(value)
    if "float" in str(kind):
        return float(value)
    return value


def parse_config_lines(lines: Iterable[str]) -> dict[str, Any]:
    """``key = value`` lines; ``#`` starts a comment. Dotted keys use their last part."""
    out: dict[str, Any] = {}
    for lineno, raw in enumerate(lines, 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"config line {lineno}: expected key = value")
        key, value = (p.strip() for p in line.split("=", 1))
        key = key.split(".")[-1].replace("-", "_")
        if key == "kind":
            key = "scorer"
        if key not in _FIELD_TYPES:
            raise ConfigError(f"config line {lineno}: unknown key {key!r}")
        try:
            out[key] = _coerce(key, value)
        except ValueError:
            raise ConfigError(f"config line {lineno}: bad value {value!r} for {key}") from None
    return out


def load_config(path: str | Path | None = None, **overrides: Any) -> PipelineConfig:
    """Defaults, then the config file, then non-None overrides. Relative paths
    in the file are resolved against the file's directory."""
    values: dict[str, Any] = {}
    if path is not None:
        path = Path(path)
        try:
            values = parse_config_lines(path.read_text("utf-8").splitlines())
        except OSError as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from None
        for key in ("kg_path", "docs_path", "embeddings_path", "scores_path"):
            if values.get(key) and not Path(values[key]).is_absolute():
                values[key] = str(path.parent / values[key])
    values.update({k: v for k, v in overrides.items() if v is not None})
    return PipelineConfig(**values)


# -- inputs ------------------------------------------------------------------------


@dataclass(frozen=True)
class QuestionRecord:
    id: str
    question: str
    nerd: tuple[tuple[str, str], ...] = ()
    doc_ids: tuple[str, ...] | None = None
    gold: tuple[GoldAnswer, ...] = ()

    @classmethod
    def from_record(cls, rec: Mapping[str, Any]) -> QuestionRecord:
        nerd = tuple(
            (a["mention"], a.get("entity") or a["mention"]) for a in rec.get("nerd") or ()
        )
        doc_ids = rec.get("doc_ids")
        return cls(
            str(rec.get("id", "")),
            rec["question"],
            nerd,
            tuple(str(d) for d in doc_ids) if doc_ids is not None else None,
            tuple(GoldAnswer.from_record(g) for g in rec.get("gold_answers") or ()),
        )

    def to_question(self) -> Question:
        nerd = [{"mention": m, "entity": e} for m, e in self.nerd]
        return tokenize_question(self.question, nerd, qid=self.id)


def load_questions(path: str | Path) -> list[QuestionRecord]:
    out = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            if not line.strip():
                continue
            try:
                out.append(QuestionRecord.from_record(json.loads(line)))
            except (json.JSONDecodeError, KeyError, TypeError) as exc:
                raise ValueError(f"{path}:{lineno}: malformed question ({exc})") from None
    return out


@dataclass
class Resources:
    """Read-only inputs shared by all questions of a run."""

    store: TripleStore = field(default_factory=TripleStore)
    documents: dict[str, AnnotatedDocument] = field(default_factory=dict)
    embeddings: Embeddings | None = None
    scores: dict[str, float] = field(default_factory=dict)


def load_resources(config: PipelineConfig) -> Resources:
    config.require_inputs()
    res = Resources()
    try:
        if config.kg_path and config.mode in (KG, HETERO):
            with open(config.kg_path, encoding="utf-8") as fh:
                res.store = load_kg_facts(fh)
        if config.docs_path and config.mode in (TEXT, HETERO):
            with open(config.docs_path, encoding="utf-8") as fh:
                docs = load_documents(fh)
            res.documents = {k: resolve_pronouns(d) for k, d in docs.items()}
        if config.embeddings_path:
            with open(config.embeddings_path, encoding="utf-8") as fh:
                res.embeddings = Embeddings.load(fh)
        if config.scores_path:
            with open(config.scores_path, encoding="utf-8") as fh:
                res.scores = load_external_scores(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read input file: {exc}") from None
    return res


# -- stages ------------------------------------------------------------------------


def retrieve_evidences(
    config: PipelineConfig, res: Resources, question: Question, qrec: QuestionRecord
) -> list[Evidence]:
    """Unscored evidence pool: 1-hop facts of the NERD entities and question-word snippets."""
    pool: list[Evidence] = []
    if config.mode in (KG, HETERO):
        seen: set[int] = set()
        for ent in question.nerd_entities:
            for idx in res.store.one_hop(ent):
                if idx not in seen:
                    seen.add(idx)
                    pool.append(fact_evidence(res.store, idx))
    if config.mode in (TEXT, HETERO):
        ids = qrec.doc_ids if qrec.doc_ids is not None else sorted(res.documents)
        for doc_id in ids:
            doc = res.documents.get(doc_id)
            if doc is None:
                continue
            for snip in extract_snippets(
                doc, question.surfaces, config.window, config.min_snippet_matches
            ):
                pool.append(snippet_evidence(doc, snip))
    return pool


def _scorer_spec(config: PipelineConfig, res: Resources) -> ScorerSpec:
    return ScorerSpec(config.scorer, res.scores if config.scorer == EXTERNAL else {})


def select_evidences(
    config: PipelineConfig, res: Resources, question: Question, pool: Sequence[Evidence]
) -> list[Evidence]:
    return select_top_evidences(score_all(question, pool, _scorer_spec(config, res)), config.epsilon)


def build_context_graph(
    config: PipelineConfig, res: Resources, question: Question, selected: Sequence[Evidence]
) -> ContextGraph:
    spec = _scorer_spec(config, res)
    taus = config.thresholds()
    align = AlignmentConfig(*taus, embeddings=res.embeddings) if taus else None
    if config.mode == KG:
        return build_kg_subgraph(
            selected, res.store, question.nerd_entities, lambda ev: score_evidence(question, ev, spec)
        )
    assert align is not None
    text = build_text_quasi_graph(selected, res.documents, align)
    if config.mode == TEXT:
        return text
    kg = build_kg_subgraph(
        selected, res.store, question.nerd_entities, lambda ev: score_evidence(question, ev, spec)
    )
    return merge_heterogeneous(kg, text, align)


def find_anchor_groups(
    config: PipelineConfig, graph: ContextGraph, question: Question
) -> list[AnchorGroup]:
    return cap_groups(graph, detect_anchors(graph, question), config.group_cap)


def compute_trees(
    config: PipelineConfig, graph: ContextGraph, groups: Sequence[AnchorGroup]
) -> list[SteinerTree]:
    trees = solve_topk(graph, [g.members for g in groups], config.k, group_cap=config.group_cap)
    anchors = {m for g in groups for m in g.members}
    return [augment_predicate_evidence(t, graph, anchors) for t in trees]


def rank_answers(
    config: PipelineConfig,
    graph: ContextGraph,
    groups: Sequence[AnchorGroup],
    trees: Sequence[SteinerTree],
) -> list[RankedAnswer]:
    anchors = {m for g in groups for m in g.members}
    cands = extract_candidates(graph, trees, anchors)
    return rank_candidates(graph, cands, trees, config.strategy, anchors)


BASELINES = ("bfs", "shortest-paths")


def baseline_answers(
    config: PipelineConfig, graph: ContextGraph, groups: Sequence[AnchorGroup], method: str
) -> list[RankedAnswer]:
    """Non-anchor entities and literals from a baseline, in baseline order."""
    members = [g.members for g in groups]
    if method == "bfs":
        raw = bfs_baseline(graph, members, config.bfs_iterations)
    elif method == "shortest-paths":
        raw = shortest_paths_baseline(graph, members)
    else:
        raise ValueError(f"unknown baseline {method!r} (expected one of {BASELINES})")
    anchors = {m for g in groups for m in g.members}
    keep = [
        c for c in raw
        if c.node not in anchors and graph.nodes[c.node].kind in (NodeKind.ENTITY, NodeKind.LITERAL)
    ]
    return [
        RankedAnswer(c.node, graph.nodes[c.node].label, c.score, r)
        for r, c in enumerate(keep, 1)
    ]


# -- orchestration -----------------------------------------------------------------


@dataclass
class Artifacts:
    """Intermediate outputs of one question, in stage order."""

    pool: list[Evidence] | None = None
    selected: list[Evidence] | None = None
    graph: ContextGraph | None = None
    groups: list[AnchorGroup] | None = None
    trees: list[SteinerTree] | None = None
    ranked: list[RankedAnswer] | None = None


@dataclass
class Outcome:
    result: dict
    artifacts: Artifacts
    timings: dict[str, float]
    error: str | None = None

    @property
    def p_at_1(self) -> int:
        return self.result["p_at_1"]


_DIAGNOSTIC_ERRORS = (
    EmptyQuestionError,
    MissingScoreError,
    NoAnchorsError,
    DisconnectedGroupsError,
    NoCandidatesError,
)


def run_pipeline(
    config: PipelineConfig,
    res: Resources,
    qrec: QuestionRecord,
    start: Artifacts | None = None,
) -> Outcome:
    """Answer one question. Stages whose artifact is present in ``start`` are skipped."""
    art = replace(start) if start is not None else Artifacts()
    timings: dict[str, float] = {}
    error = None
    question: Question | None = None

    def stage(name: str, attr: str, fn) -> None:
        if getattr(art, attr) is not None:
            return
        t0 = time.perf_counter()
        setattr(art, attr, fn())
        timings[name] = time.perf_counter() - t0

    try:
        question = qrec.to_question()
        stage("retrieve", "pool", lambda: retrieve_evidences(config, res, question, qrec))
        stage("select", "selected", lambda: select_evidences(config, res, question, art.pool))
        stage("xg", "graph", lambda: build_context_graph(config, res, question, art.selected))
        stage("anchors", "groups", lambda: find_anchor_groups(config, art.graph, question))
        stage("gst", "trees", lambda: compute_trees(config, art.graph, art.groups))
        stage("rank", "ranked", lambda: rank_answers(config, art.graph, art.groups, art.trees))
    except _DIAGNOSTIC_ERRORS as exc:
        error = f"{type(exc).__name__}: {exc}"
    return Outcome(_result_record(qrec, art, error), art, timings, error)


def _result_record(qrec: QuestionRecord, art: Artifacts, error: str | None) -> dict:
    ranked = art.ranked or []
    p1 = 0
    bucket = None
    if qrec.gold:
        if art.graph is not None and ranked:
            p1 = evaluate_p_at_1(art.graph, ranked, qrec.gold)
        trace = Trace(
            [ev.text for ev in art.pool or ()], art.graph, list(art.trees or ()), list(ranked)
        )
        bucket = error_bucket(trace, qrec.gold)
    rec = {
        "id": qrec.id,
        "question": qrec.question,
        "answers": [a.to_record() for a in ranked],
        "p_at_1": p1,
        "bucket": bucket,
    }
    if error is not None:
        rec["error"] = error
    return rec


def result_json(outcome: Outcome) -> str:
    return json.dumps(outcome.result, ensure_ascii=False, sort_keys=True)


# -- artifact dumps ----------------------------------------------------------------


def dump_artifacts(art: Artifacts, directory: str | Path) -> None:
    d = Path(directory)
    d.mkdir(parents=True, exist_ok=True)
    if art.pool is not None:
        _write_jsonl(d / "pool.jsonl", (ev.to_record() for ev in art.pool))
    if art.selected is not None:
        _write_jsonl(d / "evidences.jsonl", (ev.to_record() for ev in art.selected))
    if art.graph is not None:
        with open(d / "xg.jsonl", "w", encoding="utf-8") as fh:
            art.graph.dump_jsonl(fh)
    if art.groups is not None:
        _write_jsonl(d / "anchors.jsonl", (g.to_record() for g in art.groups))
    if art.trees is not None:
        _write_jsonl(d / "trees.jsonl", (t.to_record() for t in art.trees))


def load_artifacts(directory: str | Path, upto: str = "rank") -> Artifacts:
    """Reload dumped artifacts for the stages up to and including ``upto``."""
    if upto not in STAGES:
        raise ValueError(f"unknown stage {upto!r}")
    keep = STAGES[: STAGES.index(upto) + 1]
    d = Path(directory)
    art = Artifacts()
    if "retrieve" in keep and (d / "pool.jsonl").exists():
        art.pool = [Evidence.from_record(r) for r in _read_jsonl(d / "pool.jsonl")]
    if "select" in keep and (d / "evidences.jsonl").exists():
        art.selected = [Evidence.from_record(r) for r in _read_jsonl(d / "evidences.jsonl")]
    if "xg" in keep and (d / "xg.jsonl").exists():
        with open(d / "xg.jsonl", encoding="utf-8") as fh:
            art.graph = ContextGraph.load_jsonl(fh)
    if "anchors" in keep and (d / "anchors.jsonl").exists():
        art.groups = [AnchorGroup.from_record(r) for r in _read_jsonl(d / "anchors.jsonl")]
    if "gst" in keep and (d / "trees.jsonl").exists():
        art.trees = [SteinerTree.from_record(r) for r in _read_jsonl(d / "trees.jsonl")]
    return art


def _write_jsonl(path: Path, records: Iterable[dict]) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.writelines(json.dumps(rec, ensure_ascii=False, sort_keys=True) + "\n" for rec in records)


def _read_jsonl(path: Path) -> list[dict]:
    with open(path, encoding="utf-8") as fh:
        return [json.loads(line) for line in fh if line.strip()]


# -- explanations ------------------------------------------------------------------


def export_explanation(outcome: Outcome, fmt: str = "json", top: int | None = None) -> bytes:
    """Serialized answer trees: one JSON document, or one DOT graph per tree."""
    art = outcome.artifacts
    if not art.trees or art.graph is None:
        raise ValueError("result has no trees to explain")
    trees = art.trees if top is None else art.trees[:top]
    anchors = {m for g in art.groups or () for m in g.members}
    best = {art.ranked[0].node} if art.ranked else set()
    fmt = fmt.lower()
    if fmt == "json":
        doc = {
            "question": outcome.result["question"],
            "answer": outcome.result["answers"][0]["label"] if outcome.result["answers"] else None,
            "trees": [t.to_record(art.graph) for t in trees],
        }
        return (json.dumps(doc, ensure_ascii=False, sort_keys=True, indent=1) + "\n").encode()
    if fmt == "dot":
        parts = []
        for i, t in enumerate(trees, 1):
            parts.append(
                tree_graph_dot(
                    art.graph,
                    t.all_nodes,
                    tree_edges_full(art.graph, t),
                    name=f"tree {i} cost={t.cost:.4f}",
                    anchors=anchors & t.all_nodes,
                    answers=best & t.all_nodes,
                    dashed_nodes=t.attachments,
                )
            )
        return "".join(parts).encode()
    raise ValueError(f"unknown explanation format {fmt!r}")


# -- benchmark ---------------------------------------------------------------------


@dataclass
class BenchmarkReport:
    n: int
    p_at_1: float
    buckets: dict[str, int]
    mean_graph: dict
    stage_seconds: dict[str, float]
    results: list[dict]

    def summary(self) -> dict:
        return {
            "questions": self.n,
            "p_at_1": self.p_at_1,
            "buckets": self.buckets,
            "mean_graph": self.mean_graph,
            "stage_seconds": self.stage_seconds,
        }


def run_benchmark(
    config: PipelineConfig, questions: Sequence[QuestionRecord], res: Resources | None = None
) -> BenchmarkReport:
    if not questions:
        raise ValueError("no questions to evaluate")
    res = res if res is not None else load_resources(config)
    results = []
    stats: list[GraphStats] = []
    seconds = {s: 0.0 for s in STAGES}
    buckets = {str(b): 0 for b in BUCKET_LABELS}
    for q in questions:
        out = run_pipeline(config, res, q)
        results.append(out.result)
        for k, v in out.timings.items():
            seconds[k] += v
        if out.artifacts.graph is not None:
            stats.append(graph_stats(out.artifacts.graph))
        if out.result["bucket"] is not None:
            buckets[str(out.result["bucket"])] += 1
    p1 = sum(r["p_at_1"] for r in results) / len(results)
    return BenchmarkReport(len(results), p1, buckets, mean_stats(stats), seconds, results)


def write_jsonl(fh: IO[str], records: Iterable[dict]) -> None:
    for rec in records:
        fh.write(json.dumps(rec, ensure_ascii=False, sort_keys=True) + "\n")


__all__ = [
    "BASELINES",
    "HETERO",
    "KG",
    "MODES",
    "MODE_THRESHOLDS",
    "STAGES",
    "TEXT",
    "Artifacts",
    "BenchmarkReport",
    "ConfigError",
    "Outcome",
    "PipelineConfig",
    "QuestionRecord",
    "Resources",
    "baseline_answers",
    "build_context_graph",
    "compute_trees",
    "dump_artifacts",
    "export_explanation",
    "find_anchor_groups",
    "load_artifacts",
    "load_config",
    "load_questions",
    "load_resources",
    "parse_config_lines",
    "rank_answers",
    "result_json",
    "retrieve_evidences",
    "run_benchmark",
    "run_pipeline",
    "select_evidences",
]
