from __future__ import annotations

import json

import pytest
from conftest import DATA

from hetqa.cli import EXIT_CONFIG, main

EX = DATA / "running_example"
BASE = ["--config", str(EX / "config.txt"), "--questions", str(EX / "questions.jsonl")]
GOLD = "Alejandro González Iñárritu"


def _run(capsys, *argv) -> tuple[int, str, str]:
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_answer(capsys, tmp_path):
    code, out, _ = _run(capsys, "answer", *BASE, "--top", "3", "--dump", str(tmp_path))
    assert code == 0
    rec = json.loads(out)
    assert rec["answers"][0]["label"] == GOLD and len(rec["answers"]) <= 3
    assert (tmp_path / "fig1" / "trees.jsonl").exists()


def test_answer_single_question_with_explanation(capsys, tmp_path):
    dot = tmp_path / "trees.dot"
    code, out, _ = _run(
        capsys, "answer", "--config", str(EX / "config.txt"),
        "-q", "director of the western for which Leo won an Oscar?",
        "--nerd", "Leo=Leonardo DiCaprio", "--nerd", "Oscar=Academy Awards",
        "--explain", "dot", "--explain-out", str(dot),
    )
    assert code == 0 and json.loads(out)["answers"][0]["label"] == GOLD
    assert dot.read_text().startswith("graph")


def test_eval(capsys, tmp_path):
    results = tmp_path / "r.jsonl"
    code, out, _ = _run(capsys, "eval", *BASE, "--results", str(results))
    assert code == 0
    assert json.loads(out)["p_at_1"] == 1.0
    assert json.loads(results.read_text())["id"] == "fig1"


@pytest.mark.parametrize("fmt", ["jsonl", "dot"])
def test_build_xg(capsys, fmt):
    code, out, err = _run(capsys, "build-xg", *BASE, "--format", fmt)
    assert code == 0 and out
    assert json.loads(err.splitlines()[-1])["id"] == "fig1"


def test_gst(capsys):
    code, out, _ = _run(capsys, "gst", *BASE, "-k", "3")
    assert code == 0
    assert 1 <= len(json.loads(out)["trees"]) <= 3


@pytest.mark.parametrize("method", ["bfs", "shortest-paths"])
def test_baseline(capsys, method):
    code, out, _ = _run(capsys, "baseline", *BASE, "--method", method)
    assert code == 0
    rec = json.loads(out)
    assert rec["method"] == method and rec["p_at_1"] in (0, 1)


@pytest.mark.parametrize("mode", ["KG", "Text", "Hetero"])
def test_stats(capsys, mode):
    code, out, _ = _run(capsys, "stats", *BASE, "--mode", mode)
    assert code == 0
    rec = json.loads(out)
    assert rec["mode"] == mode and rec["graphs"] == 1


def test_config_errors_exit_2(capsys, tmp_path):
    assert _run(capsys, "answer", "--config", str(tmp_path / "missing.txt"), "-q", "x")[0] == EXIT_CONFIG
    assert _run(capsys, "answer", "--config", str(EX / "config.txt"))[0] == EXIT_CONFIG
    assert _run(capsys, "answer", *BASE, "--id", "nope")[0] == EXIT_CONFIG
    code, _, err = _run(capsys, "answer", "--config", str(EX / "config.txt"), "-q", "x", "--nerd", "bad")
    assert code == EXIT_CONFIG and "MENTION=ENTITY" in err


def test_bad_flag_value_exits():
    with pytest.raises(SystemExit):
        main(["answer", "--mode", "Graph"])
