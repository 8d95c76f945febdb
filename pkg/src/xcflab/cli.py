"""Command-line front end.

Usage examples::

    xcflab simulate --geometry su2 --sign plus --init 1,1,1 --t-end 2 --out run_su2
    xcflab blowup --geometry heisenberg --init 1,1,1
    xcflab classify --init 1,1,0.5
    xcflab separatrix --b 1 --c 0.5 --bracket 0.078,0.5 --tol 1e-8
    xcflab sweep --geometry sl2r --task classify --grid "A=0.05:0.5:10;C=0.5" --jobs 4 --out sweep
    xcflab verify --only heisenberg

Settings come from built-in defaults, then ``--config file.json``, then
explicit flags (flags win).  Errors are reported as one JSON object on
stderr with a nonzero exit status.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import math
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from itertools import product
from pathlib import Path
from typing import Optional

import numpy as np

from . import __version__
from .asymptotics import blowup_exponents, estimate_limits, subriemannian_limit
from .errors import XCFError
from .flow import FlowSign
from .geometry import Geometry, MilnorMetric, cross_curvature, sectional_curvatures
from .integrator import (IntegratorControls, Termination, Trajectory, VariableMode, default_horizon,
                         estimate_blowup, integrate)
from .monitors import default_monitors
from .sl2 import classify, find_separatrix

log = logging.getLogger("xcflab")

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_USAGE = 2

CSV_COLUMNS = ("t", "A", "B", "C", "k1", "k2", "k3", "h1", "h2", "h3")
LIMIT_NAMES = ("A3B", "A3C", "AB3", "CB3", "B/C", "C/A")


class ConfigError(XCFError, ValueError):
    """Invalid run configuration."""


@dataclass
class RunConfig:
    geometry: str = "su2"
    sign: str = "plus"
    init: tuple = (1.0, 1.0, 1.0)
    t_end: object = "auto"
    rel_tol: float = 1e-10
    abs_tol: float = 1e-12
    max_steps: int = 10_000_000
    mode: str = "logarithmic"
    out: Optional[str] = None
    grid: Optional[str] = None
    jobs: int = 1
    task: str = "simulate"
    b: float = 1.0
    c: float = 0.5
    bracket: tuple = (0.078, 0.5)
    tol: float = 1e-8
    only: Optional[str] = None
    extra: dict = field(default_factory=dict)

    def controls(self) -> IntegratorControls:
        return IntegratorControls(rel_tol=self.rel_tol, abs_tol=self.abs_tol, max_steps=self.max_steps,
                                  variable_mode=VariableMode(self.mode))

    def validate(self) -> "RunConfig":
        try:
            self.geometry = Geometry.parse(self.geometry).name.lower()
            self.sign = "plus" if FlowSign.parse(self.sign) is FlowSign.POSITIVE else "minus"
            self.init = MilnorMetric.coerce(_triple(self.init)).as_tuple()
            self.t_end = _t_end(self.t_end)
            self.controls()
            self.mode = VariableMode(self.mode).value
        except (ValueError, TypeError) as exc:
            raise ConfigError(str(exc)) from exc
        if int(self.jobs) < 1:
            raise ConfigError(f"jobs must be >= 1, got {self.jobs!r}")
        self.jobs = int(self.jobs)
        if self.task not in ("simulate", "blowup", "classify"):
            raise ConfigError(f"task must be simulate, blowup or classify, got {self.task!r}")
        return self


def _triple(v) -> tuple:
    if isinstance(v, str):
        parts = [p for p in v.replace(" ", "").split(",") if p]
    else:
        parts = list(v)
    if len(parts) != 3:
        raise ConfigError(f"expected three comma-separated values, got {v!r}")
    try:
        return tuple(float(p) for p in parts)
    except (TypeError, ValueError):
        raise ConfigError(f"non-numeric value in {v!r}") from None


def _pair(v) -> tuple:
    parts = v.split(",") if isinstance(v, str) else list(v)
    if len(parts) != 2:
        raise ConfigError(f"expected two comma-separated values, got {v!r}")
    return tuple(float(p) for p in parts)


def _t_end(v):
    if v is None or (isinstance(v, str) and v.strip().lower() == "auto"):
        return "auto"
    try:
        t = float(v)
    except (TypeError, ValueError):
        raise ConfigError(f"t_end must be a number or 'auto', got {v!r}") from None
    if not (t >= 0.0):
        raise ConfigError(f"t_end must be >= 0, got {v!r}")
    return t


# grid parsing

def parse_grid(spec: str, base: tuple) -> list[tuple]:
    """Expand a grid spec such as ``"A=0.1:1:4;B=1,2;C=0.5"``.

    Each component takes a comma list or ``lo:hi:n`` (n evenly spaced values,
    endpoints included); unlisted components keep their value in ``base``.
    Points are ordered with C varying fastest.
    """
    if not spec or not spec.strip():
        raise ConfigError("grid spec is empty")
    axes = {name: [v] for name, v in zip("ABC", base)}
    for item in spec.split(";"):
        item = item.strip()
        if not item:
            continue
        name, sep, values = item.partition("=")
        name = name.strip().upper()
        if not sep or name not in axes:
            raise ConfigError(f"grid entry {item!r} must look like A=..., B=... or C=...")
        try:
            if ":" in values:
                lo, hi, n = values.split(":")
                if int(n) < 1:
                    raise ConfigError(f"grid count must be >= 1 in {item!r}")
                axes[name] = [float(x) for x in np.linspace(float(lo), float(hi), int(n))]
            else:
                axes[name] = [float(x) for x in values.split(",") if x.strip()]
        except ValueError:
            raise ConfigError(f"cannot parse grid entry {item!r}") from None
        if not axes[name]:
            raise ConfigError(f"grid entry {item!r} has no values")
    points = list(product(axes["A"], axes["B"], axes["C"]))
    for p in points:
        try:
            MilnorMetric(*p)
        except ValueError as exc:
            raise ConfigError(f"grid point {p}: {exc}") from None
    return points


# serialization

def fmt(x: float) -> str:
    """17 significant digits, locale independent."""
    return format(float(x), ".17g")


def trajectory_rows(traj: Trajectory):
    geom = traj.geometry
    for t, m in zip(traj.t, traj.metrics):
        k = sectional_curvatures(geom, m)
        h = cross_curvature(geom, m)
        yield (t, *m, *k, *h)


def write_csv(path: Path, header, rows) -> None:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([fmt(v) if isinstance(v, (float, int, np.floating)) and not isinstance(v, bool) else v
                    for v in row])
    path.write_text(buf.getvalue(), encoding="utf-8", newline="")


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (np.floating, float)):
        v = float(obj)
        return v if math.isfinite(v) else repr(v)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    return obj


def dumps(obj) -> str:
    return json.dumps(_jsonable(obj), indent=2, sort_keys=True, allow_nan=False) + "\n"


# reports

def _fit_dict(fit):
    return {"exponent": fit.exponent, "coefficient": fit.coefficient, "residual": fit.residual,
            "window": list(fit.window), "samples": fit.n_samples}


def blowup_report(geom: Geometry, traj: Trajectory, controls) -> dict:
    est = estimate_blowup(geom, traj.sign, traj.metrics[0], controls, trajectory=traj)
    out = {"T_hat": est.T, "fit_component": est.component, "fit_exponent": est.exponent,
           "fit_residual": est.residual}
    try:
        out["power_laws"] = {k: _fit_dict(v) for k, v in blowup_exponents(traj, est.T).items()}
    except XCFError as exc:
        out["power_laws"] = {"error": str(exc)}
    out["limits"] = {
        e.name: {"value": e.value, "converged": e.converged, "tail_variation": e.tail_variation}
        for e in estimate_limits(traj, est.T, LIMIT_NAMES)
    }
    try:
        sr = subriemannian_limit(geom, traj, est.T)
        out["subriemannian_limit"] = {"q": list(sr.as_tuple()), "normalizer": sr.normalizer, "notes": sr.notes}
    except XCFError as exc:
        out["subriemannian_limit"] = {"error": str(exc)}
    return out


def run_simulation(cfg: RunConfig, *, require_blowup: bool = False) -> tuple[Trajectory, dict]:
    geom = Geometry.parse(cfg.geometry)
    sign = FlowSign.parse(cfg.sign)
    controls = cfg.controls()
    t_end = default_horizon(geom, sign, cfg.init) if cfg.t_end == "auto" else cfg.t_end
    mons = default_monitors(geom, sign, cfg.init)
    traj = integrate(geom, sign, cfg.init, t_end, controls, monitors=mons)
    report = {
        "version": __version__,
        "geometry": geom.name.lower(),
        "sign": cfg.sign,
        "init": list(cfg.init),
        "t_end": t_end,
        "termination": traj.termination.value,
        "t_final": traj.t_final,
        "final": list(traj.final.as_tuple()),
        "steps": traj.n_steps,
        "rejected": traj.n_rejected,
        "samples": len(traj),
        "monitors": {k: {"checks": v.checks, "warnings": v.warnings, "failures": v.failures, "worst": v.worst}
                     for k, v in traj.monitors.items()},
    }
    if traj.termination is Termination.BLOW_UP:
        report["blowup"] = blowup_report(geom, traj, controls)
    elif require_blowup:
        report["blowup"] = None
    if geom is Geometry.SL2R and sign is FlowSign.POSITIVE:
        report["regime"] = _label_dict(classify(cfg.init, controls))
    return traj, report


def _label_dict(lab) -> dict:
    return {"label": lab.label.value, "trigger": lab.trigger, "trigger_time": lab.trigger_time,
            "swapped": lab.swapped, "termination": lab.termination.value if lab.termination else None}


def _write_outputs(cfg: RunConfig, name: str, report: dict, traj: Optional[Trajectory] = None) -> None:
    if not cfg.out:
        return
    out = Path(cfg.out)
    out.mkdir(parents=True, exist_ok=True)
    if traj is not None:
        write_csv(out / "trajectory.csv", CSV_COLUMNS, trajectory_rows(traj))
    (out / f"{name}.json").write_text(dumps(report), encoding="utf-8", newline="")


# subcommands

def cmd_simulate(cfg: RunConfig) -> int:
    traj, report = run_simulation(cfg)
    _write_outputs(cfg, "report", report, traj)
    sys.stdout.write(dumps(report))
    return EXIT_OK


def cmd_blowup(cfg: RunConfig) -> int:
    traj, report = run_simulation(cfg, require_blowup=True)
    _write_outputs(cfg, "report", report, traj)
    sys.stdout.write(dumps(report))
    return EXIT_OK if report.get("blowup") else EXIT_FAILED


def cmd_classify(cfg: RunConfig) -> int:
    if cfg.geometry != "sl2r":
        raise ConfigError("classify applies to geometry sl2r only")
    lab = classify(cfg.init, cfg.controls())
    report = {"version": __version__, "geometry": "sl2r", "init": list(cfg.init), **_label_dict(lab)}
    _write_outputs(cfg, "classification", report)
    sys.stdout.write(dumps(report))
    return EXIT_OK


def cmd_separatrix(cfg: RunConfig) -> int:
    res = find_separatrix(cfg.b, cfg.c, cfg.bracket, cfg.tol, cfg.controls())
    report = {
        "version": __version__,
        "b": cfg.b, "c": cfg.c, "bracket": list(cfg.bracket), "tol": cfg.tol,
        "a_star": res.a_star, "lo": res.lo, "hi": res.hi, "iterations": res.iterations,
        "low_label": res.low_label.value if res.low_label else None,
        "high_label": res.high_label.value if res.high_label else None,
        "spot_checks": [{"a": s.a, "label": s.label.value, "consistent": s.consistent} for s in res.spot_checks],
        "monotone_consistent": res.monotone_consistent,
        "undetermined_midpoint": res.undetermined_midpoint,
        "note": res.note,
    }
    _write_outputs(cfg, "separatrix", report)
    sys.stdout.write(dumps(report))
    return EXIT_OK


def _sweep_one(args) -> dict:
    index, point, cfg_dict = args
    cfg = RunConfig(**{**cfg_dict, "init": point}).validate()
    row = {"index": index, "A0": point[0], "B0": point[1], "C0": point[2]}
    try:
        if cfg.task == "classify":
            lab = classify(point, cfg.controls())
            row.update(label=lab.label.value, trigger=lab.trigger or "",
                       trigger_time=lab.trigger_time if lab.trigger_time is not None else "")
        else:
            traj, report = run_simulation(cfg, require_blowup=cfg.task == "blowup")
            bl = report.get("blowup") or {}
            row.update(termination=report["termination"], t_final=report["t_final"],
                       T_hat=bl.get("T_hat", ""), A=report["final"][0], B=report["final"][1], C=report["final"][2])
        row["error"] = ""
    except XCFError as exc:
        row["error"] = f"{type(exc).__name__}: {exc}"
    return row


SWEEP_COLUMNS = {
    "classify": ("index", "A0", "B0", "C0", "label", "trigger", "trigger_time", "error"),
    "simulate": ("index", "A0", "B0", "C0", "termination", "t_final", "T_hat", "A", "B", "C", "error"),
}
SWEEP_COLUMNS["blowup"] = SWEEP_COLUMNS["simulate"]


def run_sweep(cfg: RunConfig) -> list[dict]:
    """Evaluate every grid point; rows come back in grid order whatever ``jobs`` is."""
    if not cfg.grid:
        raise ConfigError("sweep needs --grid")
    points = parse_grid(cfg.grid, cfg.init)
    if cfg.task == "classify" and cfg.geometry != "sl2r":
        raise ConfigError("task classify applies to geometry sl2r only")
    base = {k: v for k, v in cfg.__dict__.items() if k not in ("init", "extra")}
    tasks = [(i, p, base) for i, p in enumerate(points)]
    if cfg.jobs == 1:
        return [_sweep_one(t) for t in tasks]
    with ProcessPoolExecutor(max_workers=cfg.jobs) as pool:
        return list(pool.map(_sweep_one, tasks))


def cmd_sweep(cfg: RunConfig) -> int:
    rows = run_sweep(cfg)
    cols = SWEEP_COLUMNS[cfg.task]
    if cfg.out:
        out = Path(cfg.out)
        out.mkdir(parents=True, exist_ok=True)
        write_csv(out / "sweep.csv", cols, ([r.get(c, "") for c in cols] for r in rows))
        (out / "sweep.json").write_text(dumps({"version": __version__, "task": cfg.task, "rows": rows}),
                                        encoding="utf-8", newline="")
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(cols)
    for r in rows:
        w.writerow([fmt(r[c]) if isinstance(r.get(c), float) else r.get(c, "") for c in cols])
    sys.stdout.write(buf.getvalue())
    return EXIT_OK if not any(r["error"] for r in rows) else EXIT_FAILED


def cmd_verify(cfg: RunConfig) -> int:
    from .verify import format_table, run_checks, suite_names

    results = run_checks(cfg.only)
    if not results:
        raise ConfigError(f"--only {cfg.only!r} matches no checks; suites: {', '.join(suite_names())}")
    sys.stdout.write(format_table(results) + "\n")
    if cfg.out:
        out = Path(cfg.out)
        out.mkdir(parents=True, exist_ok=True)
        payload = [{"name": r.name, "criterion": r.criterion, "passed": r.passed, "detail": r.detail}
                   for r in results]
        (out / "verify.json").write_text(dumps(payload), encoding="utf-8", newline="")
    return EXIT_OK if all(r.passed for r in results) else EXIT_FAILED


COMMANDS = {
    "simulate": cmd_simulate,
    "blowup": cmd_blowup,
    "classify": cmd_classify,
    "separatrix": cmd_separatrix,
    "sweep": cmd_sweep,
    "verify": cmd_verify,
}

# subcommand-specific defaults that differ from RunConfig
_COMMAND_DEFAULTS = {"classify": {"geometry": "sl2r"}, "separatrix": {"geometry": "sl2r"}}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON file with RunConfig fields; explicit flags override it")
    common.add_argument("--geometry", help="heisenberg, su2, e11, e2, sl2r or abelian")
    common.add_argument("--sign", help="plus (+XCF) or minus (-XCF)")
    common.add_argument("--init", help="initial metric A,B,C")
    common.add_argument("--t-end", dest="t_end", help="final time, or 'auto' to run to blow-up")
    common.add_argument("--rel-tol", dest="rel_tol", type=float)
    common.add_argument("--abs-tol", dest="abs_tol", type=float)
    common.add_argument("--max-steps", dest="max_steps", type=int)
    common.add_argument("--mode", choices=[m.value for m in VariableMode], help="integration variables")
    common.add_argument("--out", help="output directory")
    common.add_argument("-v", "--verbose", action="store_true")

    ap = argparse.ArgumentParser(prog="xcflab", description="Cross curvature flow laboratory.")
    ap.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)
    sub.add_parser("simulate", parents=[common], help="integrate and write trajectory CSV and report JSON")
    sub.add_parser("blowup", parents=[common], help="integrate to blow-up and fit its asymptotics")
    sub.add_parser("classify", parents=[common], help="SL(2,R) regime label Q1/Q2/Undetermined")
    sp = sub.add_parser("separatrix", parents=[common], help="bisect for the S0 surface along A = a*b")
    sp.add_argument("--b", type=float)
    sp.add_argument("--c", type=float)
    sp.add_argument("--bracket", help="a_lo,a_hi")
    sp.add_argument("--tol", type=float)
    sw = sub.add_parser("sweep", parents=[common], help="run a grid of initial metrics")
    sw.add_argument("--grid", help='e.g. "A=0.1:1:10;B=1;C=0.25,0.5"')
    sw.add_argument("--jobs", type=int)
    sw.add_argument("--task", choices=["simulate", "blowup", "classify"])
    vp = sub.add_parser("verify", parents=[common], help="run the acceptance checks")
    vp.add_argument("--only", help="suite, criterion number or check name")
    return ap


def load_config(args: argparse.Namespace) -> RunConfig:
    merged = dict(_COMMAND_DEFAULTS.get(args.command, {}))
    if args.config:
        try:
            data = json.loads(Path(args.config).read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {args.config}: {exc}") from None
        if not isinstance(data, dict):
            raise ConfigError("config file must hold a JSON object")
        merged.update({k.replace("-", "_"): v for k, v in data.items()})
    for k, v in vars(args).items():
        if v is not None and k not in ("config", "command", "verbose"):
            merged[k] = v
    known = set(RunConfig.__dataclass_fields__) - {"extra"}
    unknown = sorted(set(merged) - known)
    if unknown:
        raise ConfigError(f"unknown config keys: {', '.join(unknown)}")
    if "bracket" in merged:
        merged["bracket"] = _pair(merged["bracket"])
    return RunConfig(**merged).validate()


def _error(exc: BaseException) -> int:
    sys.stderr.write(json.dumps({"error": type(exc).__name__, "message": str(exc)}, sort_keys=True) + "\n")
    return EXIT_USAGE if isinstance(exc, (ConfigError, ValueError)) else EXIT_FAILED


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        if exc.code in (0, None):
            return 0
        return _error(ConfigError("invalid command line (see --help)"))
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg = load_config(args)
        return COMMANDS[args.command](cfg)
    except XCFError as exc:
        return _error(exc)
    except (ValueError, OSError) as exc:
        return _error(exc)


if __name__ == "__main__":
    raise SystemExit(main())
