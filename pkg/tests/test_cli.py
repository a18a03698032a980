from __future__ import annotations

import json
from pathlib import Path

import pytest

from lpa_ugn.cli import main
from lpa_ugn.library import bundled_names

GRAPHS = Path(__file__).resolve().parents[1] / "src" / "lpa_ugn" / "graphs"


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


def run_json(capsys, *argv):
    code, out, err = run(capsys, *argv)
    return code, json.loads(out), err


def g(name: str) -> Path:
    return GRAPHS / f"{name}.json"


def test_envelope_fields(capsys):
    code, doc, err = run_json(capsys, "ugn", g("toeplitz"))
    assert code == 0 and err == ""
    assert doc["tool"] == "lpa-ugn" and doc["subcommand"] == "ugn"
    assert len(doc["input"]["sha256"]) == 64
    assert doc["result"]["ugn"] is True


def test_ugn_example47_pair(capsys):
    code, doc, _ = run_json(capsys, "ugn", g("example47"), "--m", 2, "--n", 1)
    assert code == 0
    assert doc["result"]["witness"]["x"] == {"v1": 5, "v3": 4}


def test_ugn_contract_errors(capsys):
    code, out, err = run(capsys, "ugn", g("toeplitz"), "--m", 2, "--n", 1)
    assert code == 2 and out == "" and "no witness exists" in err
    code, out, err = run(capsys, "ugn", g("rose2"), "--m", 1, "--n", 1)
    assert code == 2 and out == ""


def test_ugn_cohn_witness_verifies(capsys, tmp_path):
    code, doc, _ = run_json(capsys, "ugn", g("rose2"), "--algebra", "cohn")
    assert code == 0 and doc["result"]["ugn"] is False
    report = tmp_path / "c.json"
    report.write_text(json.dumps(doc))
    code, res, _ = run_json(capsys, "verify", g("rose2"), report)
    assert code == 0 and res["result"]["checked"] == ["ugn_witness"]


def test_monoid_equal_and_inconclusive(capsys):
    code, doc, _ = run_json(capsys, "monoid", g("toeplitz"), "--equal", '{"v":1}', '{"v":1,"w":1}')
    assert code == 0 and doc["result"]["result"] == "equal"
    code, doc, _ = run_json(capsys, "monoid", g("c3"), "--equal", '{"v1":1}', '{"v1":2}', "--budget", 50)
    assert code == 3 and doc["result"]["result"] == "inconclusive"


def test_monoid_enumerate_rose3(capsys):
    code, doc, _ = run_json(capsys, "monoid", g("rose3"), "--enumerate", "--bound", 5)
    assert code == 0 and doc["result"]["count"] == 3


def test_monoid_unknown_vertex_is_contract_error(capsys):
    code, out, err = run(capsys, "monoid", g("toeplitz"), "--equal", '{"q":1}', '{"v":1}')
    assert code == 2 and out == "" and "unknown vertex" in err


def test_transform_rose2(capsys):
    code, doc, _ = run_json(capsys, "transform", g("rose2"))
    assert code == 0
    assert doc["vertices"] == ["v", "v'"]
    assert [(e["id"], e["range"]) for e in doc["edges"]] == [("e", "v"), ("f", "v"), ("e'", "v'"), ("f'", "v'")]


def test_structure_and_eliminate_line(capsys):
    code, doc, _ = run_json(capsys, "structure", g("a3"))
    assert code == 0
    assert doc["result"]["summands"] == [{"size": 3, "ring": "base_field", "anchor": "v3"}]
    code, doc, _ = run_json(capsys, "eliminate", g("a3"))
    assert code == 0 and doc["result"]["terminal"]["vertices"] == ["_triv"]


def test_eliminate_rejects_non_source(capsys):
    code, out, _ = run(capsys, "eliminate", g("a3"), "--order", "v2")
    assert code == 2 and out == ""


def test_analyze_examples(capsys):
    code, doc, _ = run_json(capsys, "analyze", g("toeplitz"))
    assert code == 0
    assert doc["result"]["ugn_leavitt"] is True and doc["result"]["no_exit"] is False
    code, doc, _ = run_json(capsys, "analyze", g("rose2"))
    assert doc["result"]["ugn_leavitt"] is False
    assert doc["result"]["leavitt"]["witness"]["kind"] == "ugn_witness"


def test_analyze_dir_is_sorted(capsys):
    code, doc, _ = run_json(capsys, "analyze", "--dir", GRAPHS)
    assert code == 0
    paths = [Path(r["path"]).stem for r in doc["result"]]
    assert all("report" in r for r in doc["result"])
    assert paths == sorted(bundled_names())


@pytest.mark.parametrize("text", ['{"vertices":', '{"vertices": ["v"], "edges": [{"id": "e", "source": "v", "range": "x"}]}', "[]"])
def test_malformed_input_exits_1(capsys, tmp_path, text):
    bad = tmp_path / "bad.json"
    bad.write_text(text)
    code, out, err = run(capsys, "analyze", bad)
    assert code == 1 and out == "" and err.startswith("error:")


def test_missing_file_exits_1(capsys, tmp_path):
    code, out, _ = run(capsys, "ugn", tmp_path / "nope.json")
    assert code == 1 and out == ""


@pytest.mark.parametrize("name", sorted(bundled_names()))
def test_analyze_report_verifies(capsys, tmp_path, name):
    code, doc, _ = run_json(capsys, "analyze", g(name))
    assert code == 0
    report = tmp_path / "r.json"
    report.write_text(json.dumps(doc))
    code, res, _ = run_json(capsys, "verify", g(name), report)
    assert code == 0 and res["result"]["verified"] is True and res["result"]["checked"]


def _tamper_trace(doc):
    steps = doc["result"]["witness"]["trace_right"]["steps"]
    steps.append(steps[0])


def _tamper_x(doc):
    x = doc["result"]["witness"]["x"]
    x["v1"] += 1


def _tamper_cycle(doc):
    doc["result"]["reason"]["cycle"]["edges"] = ["f"]


def _tamper_isolated(doc):
    doc["result"]["reason"]["vertex"] = "v"


@pytest.mark.parametrize(
    "name,tamper",
    [
        ("example47", _tamper_trace),
        ("example47", _tamper_x),
        ("toeplitz", _tamper_cycle),
        ("isolated_rose2", _tamper_isolated),
    ],
)
def test_tampered_witness_exits_2(capsys, tmp_path, name, tamper):
    _, doc, _ = run_json(capsys, "ugn", g(name))
    tamper(doc)
    report = tmp_path / "w.json"
    report.write_text(json.dumps(doc))
    code, res, _ = run_json(capsys, "verify", g(name), report)
    assert code == 2 and res["result"]["verified"] is False


def test_verify_against_wrong_graph_exits_2(capsys, tmp_path):
    _, doc, _ = run_json(capsys, "ugn", g("example47"))
    report = tmp_path / "w.json"
    report.write_text(json.dumps(doc))
    code, _, _ = run_json(capsys, "verify", g("rose2"), report)
    assert code == 2


def test_output_is_deterministic(capsys):
    _, first, _ = run(capsys, "analyze", g("example44"))
    _, second, _ = run(capsys, "analyze", g("example44"))
    assert first == second


def test_timing_is_opt_in(capsys):
    _, doc, _ = run_json(capsys, "ugn", g("rose2"))
    assert "seconds" not in doc
    _, doc, _ = run_json(capsys, "--timing", "ugn", g("rose2"))
    assert doc["seconds"] >= 0


def test_budget_env_var(capsys, monkeypatch):
    monkeypatch.setenv("LPA_BUDGET", "50")
    code, doc, _ = run_json(capsys, "monoid", g("c3"), "--equal", '{"v1":1}', '{"v1":2}')
    assert code == 3 and doc["result"]["budget"]["max_nodes"] == 50


def test_harness_subcommand(capsys, tmp_path):
    out = tmp_path / "h.jsonl"
    code, doc, _ = run_json(capsys, "harness", "--max-vertices", 1, "--max-edges", 2, "--out", out)
    assert code == 0 and doc["result"] == {"graphs": 3, "disagreements": 0}
    assert len(out.read_text().splitlines()) == 3
