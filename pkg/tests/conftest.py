from __future__ import annotations

import random
from pathlib import Path

import pytest

from hetqa.graph import ContextGraph, EdgeKind, NodeKind

ROOT = Path(__file__).resolve().parent.parent
DATA = ROOT / "data"

_CRITERIA: dict[int, tuple[str, str, str]] = {}


def random_graph(rng: random.Random, n: int, extra_edges: int) -> ContextGraph:
    """Connected graph on n entity nodes: a random spanning tree plus extra edges.

    Edge weights are uniform in [0, 1].
    """
    g = ContextGraph()
    ids = [g.upsert_node(f"v{i:02d}", NodeKind.ENTITY, 1.0) for i in range(n)]
    for i in range(1, n):
        j = rng.randrange(i)
        g.upsert_edge(ids[j], ids[i], EdgeKind.TRIPLE, rng.random())
    pairs = [(a, b) for a in ids for b in ids if a < b and g.best_edge(a, b) is None]
    rng.shuffle(pairs)
    for a, b in pairs[:extra_edges]:
        g.upsert_edge(a, b, EdgeKind.TRIPLE, rng.random())
    return g


def random_groups(rng: random.Random, nodes: list[int], n_groups: int, max_size: int = 3):
    return [rng.sample(nodes, rng.randint(1, min(max_size, len(nodes)))) for _ in range(n_groups)]


def random_instance(seed: int, max_n: int = 12, groups: tuple[int, int] = (2, 4)):
    rng = random.Random(seed)
    n = rng.randint(3, max_n)
    g = random_graph(rng, n, rng.randint(0, n))
    gs = random_groups(rng, sorted(g.nodes), rng.randint(*groups))
    return g, gs


@pytest.fixture
def data_dir() -> Path:
    return DATA


# -- acceptance reporting ------------------------------------------------------


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(n, title): acceptance criterion")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is None or rep.when != "call" and not rep.failed:
        return
    n, title = mark.args
    detail = dict(item.user_properties).get("detail", "")
    if rep.failed:
        status = "FAIL"
        if not detail:
            detail = str(rep.longrepr).strip().splitlines()[-1][:160]
    else:
        status = "PASS"
    if rep.when == "call" or rep.failed:
        _CRITERIA[n] = (status, title, detail)


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for n in sorted(_CRITERIA):
        status, title, detail = _CRITERIA[n]
        tr.write_line(f"criterion {n:2d} {status}: {title}" + (f" ({detail})" if detail else ""))
