import json

import pytest

from spinr import cli, verify

KEYS = {"space", "group", "n", "r", "m", "dim_invariant", "checks", "tolerance", "runtime_ms"}


def run(capsys, *argv):
    code = cli.main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_space_json_hermitian(capsys):
    code, out, _ = run(capsys, "space", "--space", "cpn-hermitian", "--n", "2")
    rec = json.loads(out)
    assert code == 0
    assert set(rec) == KEYS
    assert rec["dim_invariant"] == 2 and rec["group"] == "SU(3)"
    assert rec["checks"]["pure"] and rec["checks"]["parallel"] and rec["checks"]["gen_killing"]
    assert rec["checks"]["einstein_constant"] == pytest.approx(6.0)
    assert rec["tolerance"]["residual_tol"] == 1e-8


def test_space_hpn_default_twist(capsys):
    code, out, _ = run(capsys, "space", "--space", "hpn", "--n", "3", "--aux", "nontrivial")
    rec = json.loads(out)
    assert code == 0 and rec["m"] == 3 and rec["dim_invariant"] == 1
    assert rec["checks"]["pure"] and rec["checks"]["parallel"]


def test_space_empty_invariants(capsys):
    code, out, err = run(capsys, "space", "--space", "hpn", "--n", "2", "--aux", "nontrivial", "--m", "1")
    rec = json.loads(out)
    assert code == 0 and rec["dim_invariant"] == 0
    assert all(v is None for v in rec["checks"].values())
    assert "note:" in err


def test_markdown_output(capsys):
    code, out, _ = run(capsys, "space", "--space", "cpn-hermitian", "--n", "1", "--markdown")
    assert code == 0
    assert out.startswith("| field | value |") and "| dim_invariant | 2 |" in out


def test_dump_basis(capsys, tmp_path):
    path = tmp_path / "basis.json"
    code, out, _ = run(capsys, "space", "--space", "cpn-hermitian", "--n", "2", "--dump-basis", str(path))
    rec = json.loads(out)
    dumped = json.loads(path.read_text())
    assert code == 0 and len(dumped) == rec["dim_invariant"] == len(rec["basis"])
    assert dumped == rec["basis"]


def test_tolerance_from_env(capsys, monkeypatch):
    monkeypatch.setenv("SPINR_TOL", "1e-6")
    _, out, _ = run(capsys, "space", "--space", "cpn-hermitian", "--n", "1")
    assert json.loads(out)["tolerance"]["residual_tol"] == 1e-6
    _, out, _ = run(capsys, "space", "--space", "cpn-hermitian", "--n", "1", "--tol", "1e-7")
    assert json.loads(out)["tolerance"]["residual_tol"] == 1e-7


@pytest.mark.parametrize("argv", [
    ["space", "--space", "cpn-hermitian", "--n", "2", "--m", "2"],
    ["space", "--space", "cpn-hermitian", "--n", "2", "--s", "2"],
    ["space", "--space", "cpn-hermitian"],
    ["space", "--space", "hpn", "--n", "3", "--s", "1"],
    ["space", "--space", "cpn-hermitian", "--n", "2", "--t", "2"],
    ["space", "--space", "cpn-hermitian", "--n", "2", "--tol", "-1"],
    ["space", "--space", "cpn-hermitian", "--n", "2", "--a", "0"],
])
def test_invalid_input_exit_2(capsys, argv):
    code, _, err = run(capsys, *argv)
    assert code == 2 and "error" in err


def test_argparse_errors_exit_2(capsys):
    with pytest.raises(SystemExit) as exc:
        cli.main(["space", "--space", "nowhere"])
    assert exc.value.code == 2


def test_bad_table_file_exit_2(capsys, tmp_path):
    bad = tmp_path / "t3.txt"
    bad.write_text("0,1:\n")
    code, _, _ = run(capsys, "space", "--space", "op2", "--table3", str(bad))
    assert code == 2


@pytest.mark.parametrize("suite", sorted(verify.SUITES))
def test_verify_suite(capsys, suite):
    code, out, _ = run(capsys, "verify", "--suite", suite)
    assert code == 0
    assert all(line.startswith("[PASS]") for line in out.splitlines()[:-1])


def test_verify_mismatch_exit_1(capsys, monkeypatch):
    monkeypatch.setattr(verify, "run_suite", lambda name, tol: [verify.Check("x", False, "forced")])
    code, out, _ = run(capsys, "verify", "--suite", "clifford")
    assert code == 1 and "[FAIL] x" in out


def test_table1_mismatch_exit_1(capsys, monkeypatch):
    monkeypatch.setattr(verify, "table1", lambda tol, path: [{"row": "x", "ok": False}])
    code, out, _ = run(capsys, "table1")
    assert code == 1 and json.loads(out)["ok"] is False
