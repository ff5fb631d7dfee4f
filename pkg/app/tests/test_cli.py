"""
Tests for the command-line front end: outputs and exit codes.
"""
import json
from fractions import Fraction
from pathlib import Path

import pytest

from app.cli import cli
from app.core.config import settings
from app.models.instance import Instance
from app.models.report import ReproductionCheck, ReproductionReport
from app.models.utility import AdditiveUtility
from app.utils.serialization import instance_hash, write_document


@pytest.fixture
def files(tmp_path, instance_c, private_c, cycle_c, single_edge_c):
    paths = {
        "instance": tmp_path / "instance.json",
        "scheme": tmp_path / "private.json",
        "cycle": tmp_path / "cycle.json",
        "edge": tmp_path / "edge.json",
    }
    write_document(paths["instance"], instance_c)
    write_document(paths["scheme"], private_c)
    write_document(paths["cycle"], cycle_c)
    write_document(paths["edge"], single_edge_c)
    return {name: str(path) for name, path in paths.items()}


def _stdout_json(capsys):
    return json.loads(capsys.readouterr().out)


# === gen / construct ===

def test_gen_to_stdout(capsys):
    assert cli(["gen", "appendix-c"]) == 0
    document = _stdout_json(capsys)
    assert document["theta"] == ["3/4", "1/2", "1/4"]
    assert document["lambda"] == "1/2"


def test_gen_to_file(tmp_path, capsys, instance_c):
    target = tmp_path / "out.json"
    assert cli(["gen", "appendix-c", "-o", str(target)]) == 0
    assert target.exists()
    summary = _stdout_json(capsys)
    assert summary["instance_hash"] == instance_hash(instance_c)
    assert summary["tool_version"] == settings.TOOL_VERSION


def test_gen_is_deterministic(capsys):
    assert cli(["gen", "random", "-n", "3", "--seed", "7"]) == 0
    first = capsys.readouterr().out
    assert cli(["gen", "random", "-n", "3", "--seed", "7"]) == 0
    assert capsys.readouterr().out == first


def test_construct(files, capsys):
    assert cli(["construct", "public-prefix", "-i", files["instance"], "--index", "3"]) == 0
    assert _stdout_json(capsys)["mu0"] == {"000": "3/4", "111": "1/4"}


# === check / solve-lp / eval ===

def test_check_exit_codes(files, capsys, caplog):
    assert cli(["check", "private", "-i", files["instance"], "-s", files["scheme"]]) == 0
    assert _stdout_json(capsys)["ok"] is True
    assert cli(["check", "kworst", "-i", files["instance"], "-s", files["scheme"], "-k", "1"]) == 1
    verdict = _stdout_json(capsys)
    assert verdict["violation"]["leaked"] == [[2, 0]]
    assert "kworst check failed: receiver 1, signal 1, leaked [(2, 0)], m0=1/4, m1=0" in caplog.text


def test_solve_lp(files, tmp_path, capsys):
    export = tmp_path / "lp.txt"
    assert cli(["solve-lp", "-i", files["instance"], "-k", "0", "--export", str(export)]) == 0
    payload = _stdout_json(capsys)
    assert payload["status"] == "optimal"
    assert payload["value"] == "9/4"
    assert export.read_text().startswith("maximize: ")


def test_eval_on_cycle(files, capsys):
    assert cli(["eval", "-i", files["instance"], "-s", files["scheme"], "--model", f"fixed:{files['cycle']}"]) == 0
    payload = _stdout_json(capsys)
    assert payload["value"] == "2"
    assert payload["method"] == "exact"


def test_eval_monte_carlo(files, capsys):
    args = ["eval", "-i", files["instance"], "-s", files["scheme"], "--model", "kstar:1", "--mc", "50", "--seed", "2"]
    assert cli(args) == 0
    payload = _stdout_json(capsys)
    assert payload["samples"] == 50
    assert payload["seed"] == 2


# === exit codes ===

def test_input_errors_exit_2(files, tmp_path):
    assert cli(["check", "private", "-i", str(tmp_path / "missing.json"), "-s", files["scheme"]]) == 2
    assert cli(["solve-lp", "-i", files["instance"], "-k", "3"]) == 2
    assert cli(["eval", "-i", files["instance"], "-s", files["scheme"], "--model", "kstar:x"]) == 2
    assert cli(["gen", "no-such-family"]) == 2


def test_invariant_violation_exits_2(tmp_path, files):
    broken = tmp_path / "broken.json"
    document = json.loads(Path(files["instance"]).read_text())
    document["theta"] = ["1/4", "1/2", "3/4"]
    broken.write_text(json.dumps(document))
    assert cli(["solve-lp", "-i", str(broken), "-k", "0"]) == 2


def test_size_refusal_exits_3(tmp_path):
    n = 13
    instance = Instance(n=n, lam=Fraction(1, 2), theta=(Fraction(0),) * n, utility=AdditiveUtility(n=n, weights=(1,) * n))
    path = tmp_path / "large.json"
    write_document(path, instance)
    assert cli(["solve-lp", "-i", str(path), "-k", "0"]) == 3


def test_version(capsys):
    assert cli(["--version"]) == 0
    assert settings.TOOL_VERSION in capsys.readouterr().out


# === bench / verify-bounds / reproduce ===

def test_bench_csv(files, capsys):
    assert cli(["bench", "-i", files["instance"], "--k-range", "1..1", "--models", f"fixed:{files['edge']}"]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines[0].startswith("instance_id,n,k,model,")
    assert len(lines) == 2
    assert ",bruteforce," in lines[1]


def test_verify_bounds(capsys):
    assert cli(["verify-bounds", "--family", "hard-supermodular", "-k", "1"]) == 0
    assert ",true," in capsys.readouterr().out


def test_reproduce(monkeypatch, capsys):
    check = ReproductionCheck(name="opt_private", value=Fraction(9, 4), expected=Fraction(9, 4), passed=True)
    monkeypatch.setattr(
        "app.cli.reproduce_appendix_c", lambda mode: ReproductionReport(tool_version="test", checks=[check])
    )
    assert cli(["reproduce", "appendix-c"]) == 0
    out = capsys.readouterr().out
    assert "opt_private: 9/4" in out
    assert out.strip().endswith("PASS")


def test_reproduce_mismatch_exits_1(monkeypatch, capsys):
    check = ReproductionCheck(name="opt_private", value=Fraction(2), expected=Fraction(9, 4), passed=False)
    monkeypatch.setattr(
        "app.cli.reproduce_appendix_c", lambda mode: ReproductionReport(tool_version="test", checks=[check])
    )
    assert cli(["reproduce", "appendix-c"]) == 1
    assert "MISMATCH (expected 9/4)" in capsys.readouterr().out
