"""Blow-up exponents, limit functionals and sub-Riemannian limits from trajectories."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

from .errors import InvalidInputError, NotApplicableError, WindowError
from .exact import ExactFamily, family_of
from .geometry import Geometry
from .integrator import Termination, Trajectory

# Fit window in units of T: deep enough that the (T-t)^(2/7) corrections of
# the generic blow-ups stay below ~1e-3 in the slope.
DEFAULT_FIT_WINDOW = (1e-11, 1e-8)
# Subleading exponent of the generic blow-up (A^3 B, B/C, ... converge like (T-t)^(2/7)).
GENERIC_GAUGE = 2.0 / 7.0
MIN_SAMPLES = 20


@dataclass(frozen=True)
class PowerLawFit:
    exponent: float
    coefficient: float
    residual: float
    window: tuple
    n_samples: int


def fit_power_law(t, x, T: float, window=DEFAULT_FIT_WINDOW) -> PowerLawFit:
    """Least-squares line through (ln(T - t), ln x) for T - t in ``window`` * T.

    ``t`` and ``x`` are equal-length sequences with x > 0 and t < T.
    """
    t = np.asarray(t, dtype=float)
    x = np.asarray(x, dtype=float)
    if t.shape != x.shape or t.ndim != 1:
        raise InvalidInputError("t and x must be 1-d arrays of equal length")
    if np.any(x <= 0):
        raise InvalidInputError("power-law fit needs x > 0")
    lo, hi = window
    tau = T - t
    sel = (tau >= lo * abs(T)) & (tau <= hi * abs(T))
    n = int(sel.sum())
    if n < MIN_SAMPLES:
        raise WindowError(f"only {n} samples with T - t in [{lo:g}, {hi:g}] * T (need {MIN_SAMPLES})")
    lt, lx = np.log(tau[sel]), np.log(x[sel])
    (p, c), res, *_ = np.polyfit(lt, lx, 1, full=True)
    rms = float(np.sqrt(res[0] / n)) if len(res) else 0.0
    ts = t[sel]
    return PowerLawFit(float(p), float(math.exp(c)), rms, (float(ts.min()), float(ts.max())), n)


def blowup_exponents(traj: Trajectory, T: float, window=DEFAULT_FIT_WINDOW) -> dict:
    """Power-law fits of A, B and C near the singular time."""
    return {name: fit_power_law(traj.t, traj.metrics[:, j], T, window) for j, name in enumerate("ABC")}


def _k_common(A, B, C):
    return 0.5 * (B + C)


FUNCTIONALS: dict[str, Callable] = {
    "A3B": lambda A, B, C: A ** 3 * B,
    "A3C": lambda A, B, C: A ** 3 * C,
    "AB3": lambda A, B, C: A * B ** 3,
    "CB3": lambda A, B, C: C * B ** 3,
    "B/C": lambda A, B, C: B / C,
    "C/A": lambda A, B, C: C / A,
    "2kA/(B-C)^2": None,  # needs the extrapolated k, handled separately
}


@dataclass(frozen=True)
class LimitEstimate:
    name: str
    value: float
    converged: bool
    tail_variation: float
    last: float


def extrapolate_limit(gauge, values) -> tuple[float, float]:
    """Fit values = limit + slope * gauge by least squares; returns (limit, slope)."""
    gauge = np.asarray(gauge, dtype=float)
    values = np.asarray(values, dtype=float)
    if len(gauge) < 2:
        return float(values[-1]), 0.0
    slope, limit = np.polyfit(gauge, values, 1)
    return float(limit), float(slope)


def _tail(traj: Trajectory, T: float, tail: float):
    tau = T - traj.t
    sel = (tau > 0) & (tau <= tail * abs(T))
    if sel.sum() < 3:
        sel = np.zeros(len(tau), dtype=bool)
        sel[-min(len(tau), MIN_SAMPLES):] = True
        sel &= tau > 0
    return sel, tau


def estimate_limits(traj: Trajectory, T: float, names: Sequence[str] = ("A3B", "A3C", "B/C"),
                    *, tail: float = 1e-9, gauge_exponent: float = GENERIC_GAUGE,
                    tolerance: float = 0.01) -> list[LimitEstimate]:
    """Limits of scale functionals as t -> T.

    Each functional is sampled on the tail T - t <= ``tail`` * T and
    extrapolated linearly in (T - t)^gauge_exponent.  The estimate counts as
    converged when the tail varies by at most ``tolerance`` (relative).
    """
    if traj.termination is not Termination.BLOW_UP:
        raise NotApplicableError("limit functionals need a trajectory that ends in blow-up")
    sel, tau = _tail(traj, T, tail)
    A, B, C = (traj.metrics[sel, j] for j in range(3))
    g = tau[sel] ** gauge_exponent
    out = []
    for name in names:
        if name not in FUNCTIONALS:
            raise InvalidInputError(f"unknown functional {name!r}; choose from {sorted(FUNCTIONALS)}")
        if name == "2kA/(B-C)^2":
            k, _ = extrapolate_limit(tau[sel] ** 0.5, _k_common(A, B, C))
            vals = 2.0 * k * A / (B - C) ** 2
            gg = tau[sel] ** 0.5
        else:
            vals = FUNCTIONALS[name](A, B, C)
            gg = g
        vals = np.asarray(vals, dtype=float)
        last = float(vals[-1])
        if not np.all(np.isfinite(vals)):
            out.append(LimitEstimate(name, last, False, math.inf, last))
            continue
        ref = float(np.median(np.abs(vals)))
        variation = float((vals.max() - vals.min()) / ref) if ref > 0 else math.inf
        limit, _ = extrapolate_limit(gg, vals)
        converged = variation <= tolerance and math.isfinite(limit)
        out.append(LimitEstimate(name, limit if converged else last, converged, variation, last))
    return out


@dataclass(frozen=True)
class SubRiemannianLimit:
    """Limiting co-metric Q = q1 f1 f1 + q2 f2 f2 + q3 f3 f3 of the normalised flow.

    A zero coefficient marks the direction whose normalised metric coefficient
    diverges.
    """

    q1: float
    q2: float
    q3: float
    normalizer: str
    notes: dict = field(default_factory=dict)

    def as_tuple(self):
        return (self.q1, self.q2, self.q3)


_NORMALIZER = {
    Geometry.HEISENBERG: "B",
    Geometry.SU2: "B",
    Geometry.E11: "B",
    Geometry.E2: "C",
    Geometry.SL2R: "C",
}


def subriemannian_limit(geom, traj: Trajectory, T: float, *, tail: float = 1e-9,
                        vanish_exponent: float = 0.05) -> SubRiemannianLimit:
    """Limiting co-metric coefficients of g_bar = (N0 / N(t)) g(t).

    N is B on Heisenberg, SU(2) and E(1,1), and C on E(2) and SL(2,R).  For
    each direction the inverse normalised coefficient is fitted to a power of
    T - t on the tail; a clearly positive exponent means it tends to zero,
    otherwise the limit is extrapolated in (T - t)^(2/7).
    """
    geom = Geometry.parse(geom)
    if geom not in _NORMALIZER:
        raise NotApplicableError(f"{geom.name} has no sub-Riemannian limit")
    init = traj.metrics[0]
    fam = family_of(geom, init)
    if fam is not None and fam is not ExactFamily.HEISENBERG_GENERAL:
        raise NotApplicableError(f"initial data lies on the fixed family {fam.value}")
    if traj.termination is not Termination.BLOW_UP:
        raise NotApplicableError("sub-Riemannian limit needs a trajectory that ends in blow-up")

    j = "ABC".index(_NORMALIZER[geom])
    norm0 = init[j]
    sel, tau = _tail(traj, T, tail)
    m = traj.metrics[sel]
    tt = tau[sel]
    q = []
    for i in range(3):
        y = m[:, j] / (norm0 * m[:, i])  # 1 / g_bar_i
        if i == j:
            q.append(float(1.0 / norm0))
            continue
        p = np.polyfit(np.log(tt), np.log(y), 1)[0] if len(tt) >= 3 else 0.0
        if p > vanish_exponent:
            q.append(0.0)
        else:
            limit, _ = extrapolate_limit(tt ** GENERIC_GAUGE, y)
            q.append(float(limit))
    notes = {}
    if geom is Geometry.SU2:
        # the two readings of the SU(2) statement: c >= b versus b > c when B0 > C0
        notes = {"q3_ge_q2": bool(q[2] >= q[1] * (1 - 1e-9)), "q2_gt_q3": bool(q[1] > q[2] * (1 + 1e-9))}
    return SubRiemannianLimit(q[0], q[1], q[2], normalizer="ABC"[j], notes=notes)


def infinite_time_limit(t, x, *, t_min: float, gauge_exponent: float = -1.0 / 3.0) -> float:
    """Limit of x(t) as t -> inf, fitting x = x_inf + c t^gauge_exponent for t >= t_min."""
    t = np.asarray(t, dtype=float)
    x = np.asarray(x, dtype=float)
    sel = t >= t_min
    if sel.sum() < 3:
        raise WindowError(f"fewer than 3 samples with t >= {t_min}")
    limit, _ = extrapolate_limit(t[sel] ** gauge_exponent, x[sel])
    return limit


def berger_growth_ratio(traj: Trajectory, *, t_min: Optional[float] = None) -> tuple[float, float]:
    """A(t) / (24 C_inf t)^(1/3) at the final time of a Berger-sphere run.

    Returns (ratio, C_inf) with C_inf extrapolated in t^(-1/3).
    """
    t_end = traj.t_final
    if t_min is None:
        t_min = 1e-2 * t_end
    c_inf = infinite_time_limit(traj.t, traj.metrics[:, 2], t_min=t_min)
    ratio = traj.metrics[-1, 0] / (24.0 * c_inf * t_end) ** (1.0 / 3.0)
    return float(ratio), c_inf
