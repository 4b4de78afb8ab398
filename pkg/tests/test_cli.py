import json

import pytest

from oneway import cli
from oneway.construct import DKP, RBB, ConstructionMode
from oneway.corpus import h_then_t, write_fixtures
from oneway.formats import parse_circuit, parse_pattern


def run(capsys, *argv):
    code = cli.main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_compile_and_semantic(tmp_path, capsys):
    pat = tmp_path / "p.mcal"
    code, _, _ = run(capsys, "compile", "@h_t", "-o", str(pat))
    assert code == 0
    code, out, _ = run(capsys, "semantic", str(pat))
    assert code == 0
    c = parse_circuit(out)
    assert sorted(g.name for g in c.gates) == ["H", "T"]


def test_semantic_rejection_exit_and_json(capsys):
    code, out, _ = run(capsys, "semantic", "@k2", "--json")
    assert code == cli.NEGATIVE
    assert json.loads(out) == {"status": "rejected", "reason": "no-flow", "detail": "edge-bound"}


def test_semantic_writes_circuit(tmp_path, capsys):
    out = tmp_path / "c.qc"
    code, text, _ = run(capsys, "--json", "semantic", "@chain", "-o", str(out))
    assert code == 0
    assert json.loads(text)["status"] == "extracted"
    assert len(parse_circuit(out.read_text()).gates) == 4


def test_check_flow_feeds_verify_deps(tmp_path, capsys):
    code, out, _ = run(capsys, "check-flow", "@chain")
    assert code == 0
    flow = json.loads(out)
    assert flow["f"] == {"v": "w", "w": "x"} and flow["L"] == ["v", "w"]
    path = tmp_path / "flow.json"
    path.write_text(out)
    assert run(capsys, "verify-deps", "@chain", "--flow", str(path))[:2] == (0, "consistent\n")


def test_check_flow_none(capsys):
    assert run(capsys, "check-flow", "@reversal")[:2] == (cli.NEGATIVE, "no-flow\n")


def test_verify_deps_inconsistent(tmp_path, capsys):
    text = (cli.fixture_dir() / "chain.mcal").read_text().replace("M w XY -1 s: v", "M w XY -1")
    path = tmp_path / "bad.mcal"
    path.write_text(text)
    code, out, _ = run(capsys, "verify-deps", str(path))
    assert code == cli.NEGATIVE and out.startswith("inconsistent: w")


def test_simulate_unitary(capsys):
    code, out, _ = run(capsys, "simulate", "@fJ", "--as-unitary")
    u = json.loads(out)["unitary"]
    assert code == 0 and len(u) == 2 and len(u[0][0]) == 2


def test_simulate_branch_table(capsys):
    code, out, _ = run(capsys, "simulate", "@fZz")
    data = json.loads(out)
    assert len(data["branches"]) == 2
    assert set(data["branches"][0]["outcomes"]) == {"a"}


def test_rewrite_trace_on_stderr(tmp_path, capsys):
    raw = tmp_path / "raw.mcal"
    raw.write_text("input v\nN w\nE v w\nM v XY 1\nX w v\nN x\nE w x\nM w XY 1\nX x w\n")
    code, out, err = run(capsys, "rewrite", str(raw), "--to", "normal", "--trace")
    assert code == 0
    assert parse_pattern(out).commands[0].v in ("w", "x")
    assert any(step["rule"] == "absorb-sign" for step in json.loads(err))


def test_roundtrip_random(capsys):
    code, out, _ = run(capsys, "roundtrip", "--random", "5", "--mode", "rbb", "--qubits", "3", "--seed", "2")
    assert code == 0
    assert out.count("PASS") == 5


def test_roundtrip_json(capsys):
    code, out, _ = run(capsys, "roundtrip", "@h_t", "--json")
    (rep,) = json.loads(out)
    assert code == 0 and rep["status"] == "PASS"
    assert rep["input"] == rep["output"]


def test_roundtrip_report_h_t():
    r = cli.roundtrip(h_then_t(), ConstructionMode(DKP))
    assert r.passed and r.counts_in == r.counts_out


def test_roundtrip_rbb_three_qubits():
    import random

    c = cli.random_circuit(random.Random(0), 3, 10, lnn=True)
    assert cli.roundtrip(c, ConstructionMode(RBB)).passed


def test_bad_input_exit_1(tmp_path, capsys):
    bad = tmp_path / "bad.mcal"
    bad.write_text("input v\nwhat\n")
    code, _, err = run(capsys, "semantic", str(bad))
    assert code == 1 and "line 2" in err


def test_fixture_dir_from_env(tmp_path, monkeypatch, capsys):
    write_fixtures(tmp_path)
    (tmp_path / "k2.mcal").write_text((tmp_path / "chain.mcal").read_text())
    monkeypatch.setenv("ONEWAY_FIXTURES", str(tmp_path))
    assert run(capsys, "semantic", "@k2")[0] == 0


def test_config_validates():
    with pytest.raises(ValueError):
        cli.Config(tol=0)
    with pytest.raises(ValueError):
        cli.Config(output="xml")
