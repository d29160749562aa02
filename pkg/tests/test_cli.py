import csv
import io
import json
import math

import pytest

from twistshape import cli, verify
from twistshape.cli import UsageError, main, parse_config
from twistshape.emit import Record, Table, emit, fmt_number, render


def run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def test_qhat_prints_bare_value(capsys):
    assert run(capsys, "qhat", "--p", "2", "--r", "2", "--n", "1")[:2] == (0, "7\n")


def test_pstar_infinite(capsys):
    assert run(capsys, "pstar", "--p", "3", "--n", "2")[:2] == (0, "inf\n")
    code, out, _ = run(capsys, "pstar", "--p", "3", "--n", "2", "--format", "json")
    assert json.loads(out)["p_star"] == "inf"


def test_gamma_json_object(capsys):
    code, out, _ = run(capsys, "gamma", "--n", "1", "--p", "2", "--q", "6", "--r", "2", "--format", "json")
    obj = json.loads(out)
    assert code == 0 and obj["gamma"] == 2.0 and obj["n"] == 1


def test_reduced_minimize_symmetric(capsys):
    code, out, _ = run(capsys, "reduced", "minimize", "--n", "2", "--p", "2", "--r", "3", "--q", "2")
    assert code == 0 and "y_star = 0\n" in out


def test_reduced_eval(capsys):
    code, out, _ = run(capsys, "reduced", "eval", "--n", "2", "--p", "2", "--r", "3", "--q", "2", "--y", "0.5")
    assert float(out) == pytest.approx(4 / 3, rel=1e-11)


def test_reduced_sweep_csv(capsys):
    code, out, _ = run(capsys, "reduced", "sweep", "--n", "1", "--p", "2", "--r", "2", "--q-range", "6,8,1",
                       "--format", "csv")
    rows = list(csv.DictReader(io.StringIO(out)))
    assert [float(r["q"]) for r in rows] == [6.0, 7.0, 8.0]
    assert float(rows[0]["y_star"]) == 0 and float(rows[2]["y_star"]) > 0


def test_twoball_sweep_header_only_when_empty(capsys):
    code, out, _ = run(capsys, "twoball", "sweep", "--n", "1", "--p", "2", "--r", "2", "--q-values", "",
                       "--format", "csv")
    assert code == 0 and out == "q,y_star,lambda_star,kkt_residual,mesh\n"


def test_twoball_qcrit_example(capsys):
    code, out, _ = run(capsys, "twoball", "qcrit", "--n", "1", "--p", "2", "--r", "2", "--bracket", "5,7",
                       "--tol", "0.1")
    assert code == 0 and float(out) == pytest.approx(6.0, abs=0.2)


def test_twoball_solve_csv(capsys, tmp_path):
    path = tmp_path / "sol.csv"
    argv = ["twoball", "solve", "--n", "1", "--p", "2", "--q", "2", "--r", "2", "--t", "0.5", "--mesh", "100",
            "--format", "csv", "--out", str(path)]
    assert run(capsys, *argv)[0] == 0
    text = path.read_text()
    meta = dict(line[2:].split("=", 1) for line in text.splitlines() if line.startswith("# "))
    assert float(meta["lambda"]) == pytest.approx(math.pi / 2, rel=5e-3)
    assert meta["converged"] == "true"
    body = [line for line in text.splitlines() if not line.startswith("#")]
    assert body[0] == "ball,radius,value" and len(body) == 1 + 2 * 101
    first = path.read_bytes()
    assert run(capsys, *argv)[0] == 0
    assert path.read_bytes() == first


def test_ground_state_table(capsys):
    code, out, _ = run(capsys, "ground-state", "--n", "1", "--p", "2", "--q", "2", "--mesh", "100",
                       "--format", "json")
    obj = json.loads(out)
    assert obj["columns"] == ["radius", "value", "flux"]
    assert obj["meta"]["first_zero"] == pytest.approx(math.pi / 2, rel=1e-10)
    assert len(obj["rows"]) == 101


def test_inadmissible_exits_2(capsys):
    code, out, err = run(capsys, "gamma", "--n", "3", "--p", "2", "--q", "7", "--r", "2")
    assert code == 2 and out == "" and "p*" in err


def test_inadmissible_never_reaches_solver(capsys, monkeypatch):
    def boom(*a, **k):
        raise AssertionError("solver called")

    monkeypatch.setattr(cli, "solve_fixed_partition", boom)
    monkeypatch.setattr(cli, "critical_q", boom)
    assert run(capsys, "twoball", "solve", "--n", "3", "--p", "2", "--q", "7", "--r", "2", "--t", "0.5")[0] == 2
    assert run(capsys, "twoball", "qcrit", "--n", "3", "--p", "2", "--r", "2", "--bracket", "5,7")[0] == 2


def test_missing_parameter_exits_2(capsys):
    code, _, err = run(capsys, "qhat", "--p", "2", "--n", "1")
    assert code == 2 and "--r" in err


def test_bad_flag_exits_2(capsys):
    assert run(capsys, "qhat", "--p", "two", "--r", "2", "--n", "1")[0] == 2
    assert run(capsys, "nosuch")[0] == 2


def test_bad_bracket_exits_2(capsys):
    assert run(capsys, "twoball", "qcrit", "--n", "1", "--p", "2", "--r", "2", "--bracket", "2,3")[0] == 2
    assert run(capsys, "twoball", "qcrit", "--n", "1", "--p", "2", "--r", "2", "--bracket", "5")[0] == 2


def test_unwritable_path_nonzero(capsys):
    code, _, err = run(capsys, "qhat", "--p", "2", "--r", "2", "--n", "1", "--out", "/nonexistent/dir/x.csv")
    assert code != 0 and "cannot write" in err


def test_config_file_and_override(tmp_path):
    cfg_path = tmp_path / "c.json"
    cfg_path.write_text(json.dumps({"p": 3, "r": 2, "n": 1, "format": "json"}))
    cfg = parse_config(["qhat", "--config", str(cfg_path), "--p", "2"])
    assert cfg.options["p"] == 2.0 and cfg.options["r"] == 2.0 and cfg.fmt == "json"


def test_config_unknown_key_rejected(tmp_path, capsys):
    cfg_path = tmp_path / "c.json"
    cfg_path.write_text(json.dumps({"p": 2, "r": 2, "n": 1, "bogus": 1}))
    with pytest.raises(UsageError):
        parse_config(["qhat", "--config", str(cfg_path)])
    assert run(capsys, "qhat", "--config", str(cfg_path))[0] == 2


def test_config_must_be_flat(tmp_path):
    cfg_path = tmp_path / "c.json"
    cfg_path.write_text(json.dumps({"p": {"value": 2}, "r": 2, "n": 1}))
    with pytest.raises(UsageError):
        parse_config(["qhat", "--config", str(cfg_path)])


def test_config_bracket_as_list(tmp_path):
    cfg_path = tmp_path / "c.json"
    cfg_path.write_text(json.dumps({"n": 1, "p": 2, "r": 2, "bracket": [5, 7]}))
    assert parse_config(["twoball", "qcrit", "--config", str(cfg_path)]).options["bracket"] == [5.0, 7.0]


def test_environment_defaults():
    env = {"TS_MESH": "200", "TS_TOL": "0.2"}
    cfg = parse_config(["twoball", "qcrit", "--n", "1", "--p", "2", "--r", "2", "--bracket", "5,7"], environ=env)
    assert cfg.options["mesh"] == 200 and cfg.options["tol"] == 0.2
    cfg = parse_config(["twoball", "qcrit", "--n", "1", "--p", "2", "--r", "2", "--bracket", "5,7",
                        "--mesh", "300"], environ=env)
    assert cfg.options["mesh"] == 300
    cfg = parse_config(["twoball", "qcrit", "--n", "1", "--p", "2", "--r", "2", "--bracket", "5,7"], environ={})
    assert cfg.options["mesh"] == 400 and cfg.options["tol"] == 0.05
    assert cfg.deterministic


def test_verify_subset(capsys):
    code, out, _ = run(capsys, "verify", "--only", "shooting")
    lines = out.splitlines()
    assert code == 0 and len(lines) == 2 and all(line.startswith("PASS") for line in lines)


def test_verify_unknown_name(capsys):
    assert run(capsys, "verify", "--only", "nope")[0] == 2


def test_verify_failure_exit_4(capsys, monkeypatch):
    # a tampered threshold formula must trip the gamma check
    monkeypatch.setattr(verify, "q_hat", lambda p, r, n: ((r - 1) / n + 1) ** 2 * p)
    code, out, err = run(capsys, "verify", "--only", "gamma_qhat")
    assert code == 4 and out.startswith("FAIL gamma_qhat") and "gamma_qhat" in err


def test_fmt_number():
    assert fmt_number(7.0) == "7"
    assert fmt_number(1 / 3) == "0.333333333333"
    assert fmt_number(math.inf) == "inf" and fmt_number(-math.inf) == "-inf"
    assert fmt_number(True) == "true" and fmt_number(3) == "3"


def test_render_formats():
    rec = Record({"a": 1.0, "b": 2.5}, "a")
    assert render(rec, "text") == "1\n"
    assert render(rec, "csv") == "a,b\n1,2.5\n"
    assert json.loads(render(rec, "json")) == {"a": 1.0, "b": 2.5}
    with pytest.raises(ValueError):
        render(rec, "xml")
    table = Table(("x", "y"), [(1.0, 2.0)], {"k": 3})
    assert render(table, "csv") == "# k=3\nx,y\n1,2\n"
    assert render(Table(("x",), [], {"k": 1}, csv_meta=False), "csv") == "x\n"


def test_emit_writes_file(tmp_path):
    path = tmp_path / "r.json"
    text = emit(Record({"v": 0.1 + 0.2}), "json", str(path))
    assert path.read_text() == text and json.loads(text)["v"] == 0.3
    with pytest.raises(OSError):
        emit(Record({"v": 1.0}), "json", str(tmp_path / "missing" / "r.json"))
