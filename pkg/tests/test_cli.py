import csv
import json
import math

import pytest

import xcflab.integrator
from xcflab import verify
from xcflab.cli import CSV_COLUMNS, ConfigError, RunConfig, fmt, main, parse_grid


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def read_csv(path):
    text = path.read_text(encoding="utf-8")
    return text, list(csv.reader(text.splitlines()))


def test_simulate_su2_round(tmp_path, capsys):
    code, out, _ = run(capsys, "simulate", "--geometry", "su2", "--sign", "plus", "--init", "1,1,1",
                       "--t-end", "2", "--out", str(tmp_path))
    assert code == 0
    text, rows = read_csv(tmp_path / "trajectory.csv")
    assert tuple(rows[0]) == CSV_COLUMNS
    last = [float(v) for v in rows[-1]]
    assert last[0] == 2.0 and abs(last[1] - 3.0) <= 1e-8
    report = json.loads((tmp_path / "report.json").read_text())
    assert report["termination"] == "TimeReached"
    assert json.loads(out) == report


def test_heisenberg_auto_reports_blowup_time(tmp_path, capsys):
    code, out, _ = run(capsys, "simulate", "--geometry", "heisenberg", "--sign", "plus", "--init", "1,1,1",
                       "--t-end", "auto", "--out", str(tmp_path))
    assert code == 0
    report = json.loads(out)
    assert report["termination"] == "BlowUp"
    assert abs(report["blowup"]["T_hat"] * 28 - 1) <= 1e-4
    assert abs(report["blowup"]["power_laws"]["A"]["exponent"] + 1 / 14) <= 0.005


def test_classify_report(tmp_path, capsys):
    code, out, _ = run(capsys, "classify", "--init", "1,1,0.5", "--out", str(tmp_path))
    assert code == 0
    report = json.loads((tmp_path / "classification.json").read_text())
    assert report["label"] == "Q1" and report["trigger_time"] == 0.0


def test_sl2r_simulation_carries_regime(capsys):
    code, out, _ = run(capsys, "simulate", "--geometry", "sl2r", "--sign", "+", "--init", "0.01,1,0.5",
                       "--t-end", "1e-4")
    assert code == 0
    assert json.loads(out)["regime"]["label"] == "Q2"


def test_csv_format(tmp_path, capsys):
    run(capsys, "simulate", "--geometry", "e11", "--sign", "+", "--init", "4,1,1", "--t-end", "0.01",
        "--out", str(tmp_path))
    raw = (tmp_path / "trajectory.csv").read_bytes()
    assert raw.endswith(b"\n") and b"\r" not in raw
    text, rows = read_csv(tmp_path / "trajectory.csv")
    assert all(len(r) == len(CSV_COLUMNS) for r in rows)
    for r in rows[1:]:
        for v in r:
            assert "," not in v
            assert math.isfinite(float(v))


def test_fmt_round_trips():
    for x in (1 / 3, 1e-300, 2.0 ** 0.5 * 1e17, -7.25):
        assert float(fmt(x)) == x


def test_json_round_trip(tmp_path, capsys):
    run(capsys, "blowup", "--geometry", "su2", "--init", "2,1,0.5", "--out", str(tmp_path))
    text = (tmp_path / "report.json").read_text()
    data = json.loads(text)
    assert json.loads(json.dumps(data)) == data
    assert data["blowup"]["subriemannian_limit"]["notes"]["q3_ge_q2"] is True


def test_byte_reproducible(tmp_path, capsys):
    for d in ("a", "b"):
        assert run(capsys, "simulate", "--geometry", "sl2r", "--init", "0.3,1,0.5", "--t-end", "auto",
                   "--out", str(tmp_path / d))[0] == 0
    for name in ("trajectory.csv", "report.json"):
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()


@pytest.mark.parametrize("argv", [
    ("simulate", "--geometry", "su2", "--init", "1,-1,1"),
    ("simulate", "--geometry", "nil7", "--init", "1,1,1"),
    ("simulate", "--geometry", "su2", "--init", "1,1"),
    ("simulate", "--geometry", "su2", "--init", "1,1,1", "--rel-tol", "0"),
    ("sweep", "--geometry", "su2", "--init", "1,1,1"),
    ("classify", "--geometry", "su2", "--init", "1,1,1"),
    ("verify", "--only", "nonexistent"),
    ("frobnicate",),
])
def test_errors_are_json_on_stderr(capsys, argv):
    code, out, err = run(capsys, *argv)
    assert code != 0
    payload = json.loads(err.strip().splitlines()[-1])
    assert set(payload) == {"error", "message"}


def test_blowup_without_blowup_fails(capsys):
    code, out, _ = run(capsys, "blowup", "--geometry", "su2", "--init", "1,1,1", "--t-end", "10")
    assert code != 0
    assert json.loads(out)["blowup"] is None


def test_config_merge_flags_win(tmp_path, capsys):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"geometry": "su2", "init": [1, 1, 1], "t_end": 5.0}))
    code, out, _ = run(capsys, "simulate", "--config", str(cfg), "--t-end", "2")
    assert code == 0
    report = json.loads(out)
    assert report["t_final"] == 2.0 and report["geometry"] == "su2"
    cfg.write_text(json.dumps({"geometry": "su2", "frobs": 1}))
    code, _, err = run(capsys, "simulate", "--config", str(cfg))
    assert code == 2 and "frobs" in err


def test_parse_grid():
    pts = parse_grid("A=0.1:0.3:3;C=0.5,0.25", (9.0, 1.0, 9.0))
    assert len(pts) == 6
    assert pts[0] == (0.1, 1.0, 0.5)
    assert {p[1] for p in pts} == {1.0}
    with pytest.raises(ConfigError):
        parse_grid("D=1", (1, 1, 1))


def test_sweep_order_independent_of_jobs(tmp_path, capsys):
    outs = []
    for jobs in ("1", "2"):
        d = tmp_path / jobs
        code, out, _ = run(capsys, "sweep", "--geometry", "sl2r", "--task", "classify", "--init", "1,1,0.5",
                           "--grid", "A=0.05:1:7;C=0.25,0.5", "--jobs", jobs, "--out", str(d))
        assert code == 0
        outs.append(((d / "sweep.csv").read_bytes(), out))
    assert outs[0] == outs[1]
    rows = list(csv.reader(outs[0][1].splitlines()))
    assert [int(r[0]) for r in rows[1:]] == list(range(14))


def test_run_config_validation():
    with pytest.raises(ConfigError):
        RunConfig(geometry="su2", init=(1, 1, 1), jobs=0).validate()


def test_verify_only_heisenberg(tmp_path, capsys):
    code, out, _ = run(capsys, "verify", "--only", "heisenberg", "--out", str(tmp_path))
    assert code == 0
    results = json.loads((tmp_path / "verify.json").read_text())
    assert results and all(r["passed"] for r in results)
    assert {r["criterion"] for r in results} <= {1, 2, 9}
    assert all("heisenberg" in r["name"] for r in results)


def test_verify_lists_enough_checks():
    assert len(verify.CHECKS) >= 12
    assert {c.criterion for c in verify.CHECKS} == set(range(1, 10))


def test_verify_negative_control(monkeypatch, capsys):
    def flipped(fn):
        return lambda *a: tuple(-v for v in fn(*a))

    monkeypatch.setattr(xcflab.integrator, "log_rhs_raw", flipped(xcflab.integrator.log_rhs_raw))
    monkeypatch.setattr(xcflab.integrator, "rhs_raw", flipped(xcflab.integrator.rhs_raw))
    code, out, _ = run(capsys, "verify", "--only", "heisenberg")
    assert code != 0
    assert "FAIL" in out
