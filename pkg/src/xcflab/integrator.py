"""Adaptive integration of the cross curvature flows.

Dormand-Prince 5(4) with a proportional-integral step controller, cubic
Hermite dense output, event location and finite-time blow-up detection.  By
default the state is u = (ln A, ln B, ln C), which keeps every component
positive by construction.
"""
from __future__ import annotations

import enum
import logging
import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np
from scipy.optimize import brentq

from .errors import InvalidInputError, NotApplicableError, NumericalFailure
from .flow import FlowSign, log_rhs_raw, rhs_raw
from .geometry import Geometry, MilnorMetric

log = logging.getLogger(__name__)

# Dormand-Prince 5(4) tableau
_C = (0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0, 1.0)
_A = (
    (),
    (1 / 5,),
    (3 / 40, 9 / 40),
    (44 / 45, -56 / 15, 32 / 9),
    (19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729),
    (9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656),
    (35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84),
)
_B = np.array([35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84, 0.0])
_E = _B - np.array([5179 / 57600, 0.0, 7571 / 16695, 393 / 640, -92097 / 339200, 187 / 2100, 1 / 40])

_SAFETY = 0.9
_BETA = 0.04  # PI gain on the previous error
_EXPO = 0.2 - 0.75 * _BETA
_FAC_MIN = 0.2
_FAC_MAX = 10.0
_MAX_STEP_RATIO = 1e12
_DIVERGENCE = 1e6  # |d ln m/dt| * time-scale beyond which an underflowing run counts as blow-up


class Termination(enum.Enum):
    TIME_REACHED = "TimeReached"
    BLOW_UP = "BlowUp"
    STEP_UNDERFLOW = "StepUnderflow"
    BUDGET_EXHAUSTED = "BudgetExhausted"
    EVENT = "Event"


class VariableMode(enum.Enum):
    LINEAR = "linear"
    LOGARITHMIC = "logarithmic"


@dataclass
class IntegratorControls:
    """Tolerances and stopping rules.

    ``max_component`` and ``min_step`` are relative: the cap is
    ``max_component`` times the largest initial component, the step floor is
    ``min_step`` times max(|t|, intrinsic time scale of the initial metric).
    """

    rel_tol: float = 1e-10
    abs_tol: float = 1e-12
    max_component: float = 1e9
    min_step: float = 1e-14
    max_steps: int = 10_000_000
    variable_mode: VariableMode = VariableMode.LOGARITHMIC
    first_step: Optional[float] = None

    def __post_init__(self):
        self.variable_mode = VariableMode(self.variable_mode)
        for name in ("rel_tol", "abs_tol", "max_component", "min_step"):
            v = getattr(self, name)
            if not (isinstance(v, (int, float)) and v > 0 and math.isfinite(v)):
                raise InvalidInputError(f"{name} must be a positive finite number, got {v!r}")
        if int(self.max_steps) < 1:
            raise InvalidInputError(f"max_steps must be >= 1, got {self.max_steps!r}")
        self.max_steps = int(self.max_steps)


@dataclass
class EventSpec:
    """Scalar trigger g(t, m); a sign change in the requested direction fires it.

    ``scale(m)`` sets the magnitude used for the |g| <= 1e-10 * scale
    acceptance test; it defaults to 1.
    """

    name: str
    func: Callable[[float, tuple], float]
    direction: str = "any"
    terminal: bool = False
    scale: Optional[Callable[[tuple], float]] = None

    def __post_init__(self):
        if self.direction not in ("rising", "falling", "any"):
            raise InvalidInputError(f"direction must be rising/falling/any, got {self.direction!r}")

    def magnitude(self, m) -> float:
        return 1.0 if self.scale is None else max(abs(self.scale(m)), 1e-300)

    def crosses(self, g0: float, g1: float) -> bool:
        if self.direction == "rising":
            return g0 < 0.0 <= g1
        if self.direction == "falling":
            return g0 > 0.0 >= g1
        return (g0 < 0.0 <= g1) or (g0 > 0.0 >= g1)

    def leaves_zero(self, g1: float) -> bool:
        if self.direction == "rising":
            return g1 > 0.0
        if self.direction == "falling":
            return g1 < 0.0
        return g1 != 0.0


@dataclass
class EventHit:
    name: str
    t: float
    metric: MilnorMetric
    value: float


@dataclass
class Monitor:
    """Quantity expected to evolve monotonically (or stay positive once positive).

    kind is one of ``nondecreasing``, ``nonincreasing``, ``latch_positive``.
    ``degree`` is the homogeneity degree of ``func`` in (A, B, C); the slack
    scale is max_component**degree (or max(1, |value|) for degree 0).
    """

    name: str
    func: Callable[[tuple], float]
    kind: str = "nondecreasing"
    degree: int = 1

    def scale(self, m, v) -> float:
        if self.degree == 0:
            return max(1.0, abs(v))
        return max(m) ** self.degree


@dataclass
class MonitorStats:
    name: str
    checks: int = 0
    warnings: int = 0
    failures: int = 0
    worst: float = 0.0  # largest violation relative to scale

    @property
    def ok(self) -> bool:
        return self.failures == 0


@dataclass
class Trajectory:
    """Accepted states of one integration.

    ``t`` has shape (N,), ``metrics`` shape (N, 3).  ``y`` and ``dy`` hold the
    integration variable and its derivative (used for dense output).
    """

    geometry: Geometry
    sign: FlowSign
    t: np.ndarray
    metrics: np.ndarray
    termination: Termination
    mode: VariableMode = VariableMode.LOGARITHMIC
    y: Optional[np.ndarray] = None
    dy: Optional[np.ndarray] = None
    events: list = field(default_factory=list)
    monitors: dict = field(default_factory=dict)
    n_steps: int = 0
    n_rejected: int = 0
    last_step: float = 0.0

    def __len__(self) -> int:
        return len(self.t)

    @property
    def samples(self):
        return [(float(t), MilnorMetric(*m)) for t, m in zip(self.t, self.metrics)]

    @property
    def final(self) -> MilnorMetric:
        return MilnorMetric(*self.metrics[-1])

    @property
    def t_final(self) -> float:
        return float(self.t[-1])

    def component(self, name: str) -> np.ndarray:
        return self.metrics[:, "ABC".index(name)]

    def interpolate(self, tq):
        """Cubic Hermite dense output at time(s) ``tq`` inside the trajectory span."""
        tq = np.asarray(tq, dtype=float)
        scalar = tq.ndim == 0
        tq = np.atleast_1d(tq)
        if np.any(tq < self.t[0]) or np.any(tq > self.t[-1]):
            raise InvalidInputError("interpolation time outside trajectory span")
        if len(self.t) == 1:
            out = np.repeat(self.metrics[:1], len(tq), axis=0)
            return out[0] if scalar else out
        i = np.clip(np.searchsorted(self.t, tq, side="right") - 1, 0, len(self.t) - 2)
        y = np.array([_hermite(self.t[j], self.t[j + 1], self.y[j], self.y[j + 1],
                               self.dy[j], self.dy[j + 1], s) for j, s in zip(i, tq)])
        out = np.exp(y) if self.mode is VariableMode.LOGARITHMIC else y
        return out[0] if scalar else out


def _hermite(t0, t1, y0, y1, f0, f1, t):
    h = t1 - t0
    s = (t - t0) / h
    h00 = (1 + 2 * s) * (1 - s) ** 2
    h10 = s * (1 - s) ** 2
    h01 = s * s * (3 - 2 * s)
    h11 = s * s * (s - 1)
    return h00 * y0 + h10 * h * f0 + h01 * y1 + h11 * h * f1


class _System:
    """The flow in the chosen integration variable."""

    def __init__(self, geom: Geometry, sign: FlowSign, mode: VariableMode):
        self.geom = geom
        self.s = sign.factor
        self.mode = mode

    def to_y(self, m) -> np.ndarray:
        m = np.asarray(m, dtype=float)
        return np.log(m) if self.mode is VariableMode.LOGARITHMIC else m.copy()

    def to_m(self, y) -> tuple:
        if self.mode is VariableMode.LOGARITHMIC:
            return (math.exp(y[0]), math.exp(y[1]), math.exp(y[2]))
        return (float(y[0]), float(y[1]), float(y[2]))

    def f(self, y) -> np.ndarray:
        s = self.s
        if self.mode is VariableMode.LOGARITHMIC:
            with np.errstate(all="ignore"):
                try:
                    a, b, c = log_rhs_raw(self.geom, math.exp(y[0]), math.exp(y[1]), math.exp(y[2]))
                except (OverflowError, ZeroDivisionError):
                    return np.full(3, np.nan)
        else:
            if y[0] <= 0 or y[1] <= 0 or y[2] <= 0:
                return np.full(3, np.nan)
            try:
                a, b, c = rhs_raw(self.geom, float(y[0]), float(y[1]), float(y[2]))
            except (OverflowError, ZeroDivisionError):
                return np.full(3, np.nan)
        return np.array((s * a, s * b, s * c))

    def log_rates(self, y, dy) -> np.ndarray:
        if self.mode is VariableMode.LOGARITHMIC:
            return dy
        return dy / y

    def step(self, y, f0, h):
        """One Dormand-Prince step; returns (y_new, f_new, error vector)."""
        k = [f0]
        for i in range(1, 7):
            yi = y + h * sum(a * kj for a, kj in zip(_A[i], k))
            k.append(self.f(yi))
        y_new = y + h * sum(b * kj for b, kj in zip(_B[:6], k[:6]))
        err = h * sum(e * kj for e, kj in zip(_E, k))
        # the seventh stage is evaluated at y_new (FSAL)
        return y_new, k[6], err


def _error_norm(err, y0, y1, controls: IntegratorControls, mode: VariableMode) -> float:
    if mode is VariableMode.LOGARITHMIC:
        # errors in ln m are relative errors in m
        sc = controls.rel_tol + controls.abs_tol
        ratio = err / sc
    else:
        sc = controls.abs_tol + controls.rel_tol * np.maximum(np.abs(y0), np.abs(y1))
        ratio = err / sc
    if not np.all(np.isfinite(ratio)):
        return math.inf
    return float(np.sqrt(np.mean(ratio * ratio)))


def _initial_step(sys: _System, y0, f0, controls, mode) -> float:
    if mode is VariableMode.LOGARITHMIC:
        sc = np.full(3, controls.rel_tol + controls.abs_tol)
    else:
        sc = controls.abs_tol + controls.rel_tol * np.abs(y0)
    d0 = float(np.sqrt(np.mean((y0 / sc) ** 2)))
    d1 = float(np.sqrt(np.mean((f0 / sc) ** 2)))
    if d1 == 0.0:
        return 1.0
    h0 = 1e-6 if (d0 < 1e-5 or d1 < 1e-5) else 0.01 * d0 / d1
    if mode is VariableMode.LOGARITHMIC:
        # |u| carries no scale information; use the rate instead
        h0 = 0.01 / max(float(np.max(np.abs(f0))), 1e-300) * (controls.rel_tol / 1e-6) ** 0.2
    y1 = y0 + h0 * f0
    f1 = sys.f(y1)
    if not np.all(np.isfinite(f1)):
        return h0 * 1e-3
    d2 = float(np.sqrt(np.mean(((f1 - f0) / sc) ** 2))) / h0
    if max(d1, d2) <= 1e-15:
        h1 = max(1e-6, h0 * 1e-3)
    else:
        h1 = (0.01 / max(d1, d2)) ** (1 / 5)
    return min(100 * h0, h1)


def time_scale(geom, sign, init) -> float:
    """Intrinsic time scale 1 / max |d ln m / dt| of the initial metric (1 if it is a fixed point)."""
    geom = Geometry.parse(geom)
    m = MilnorMetric.coerce(init)
    r = max(abs(v) for v in log_rhs_raw(geom, m.A, m.B, m.C))
    return 1.0 / r if r > 0 else 1.0


def integrate(
    geom,
    sign,
    init,
    t_end: float,
    controls: Optional[IntegratorControls] = None,
    *,
    events: Sequence[EventSpec] = (),
    monitors: Sequence[Monitor] = (),
) -> Trajectory:
    """Integrate +XCF or -XCF from ``init`` on [0, t_end].

    ``t_end`` may be ``math.inf``; the run then stops at blow-up, step
    underflow, a terminal event or the step budget.

    Raises
    ------
    NumericalFailure
        If the vector field is non-finite at an accepted state.
    """
    geom = Geometry.parse(geom)
    sign = FlowSign.parse(sign)
    init = MilnorMetric.coerce(init)
    controls = controls or IntegratorControls()
    t_end = float(t_end)
    if not (t_end >= 0.0):
        raise InvalidInputError(f"t_end must be >= 0, got {t_end!r}")

    mode = controls.variable_mode
    sys = _System(geom, sign, mode)
    y = sys.to_y(init.as_tuple())
    f = sys.f(y)
    if not np.all(np.isfinite(f)):
        raise NumericalFailure("non-finite vector field at the initial metric", 0.0, init)

    cap = controls.max_component * max(init.as_tuple())
    tau0 = time_scale(geom, sign, init)

    ts, ys, fs, ms = [0.0], [y], [f], [init.as_tuple()]
    hits: list[EventHit] = []
    stats = {mon.name: MonitorStats(mon.name) for mon in monitors}
    mon_prev = [mon.func(init.as_tuple()) for mon in monitors]
    mon_latched = [v > 0.0 for v in mon_prev]
    ev_prev = [ev.func(0.0, init.as_tuple()) for ev in events]
    ev_at_start = [abs(g) <= 1e-10 * ev.magnitude(init.as_tuple()) for ev, g in zip(events, ev_prev)]

    def finish(term, n_steps, n_rej, h_last):
        return Trajectory(
            geometry=geom, sign=sign, t=np.array(ts), metrics=np.array(ms), termination=term,
            mode=mode, y=np.array(ys), dy=np.array(fs), events=hits, monitors=stats,
            n_steps=n_steps, n_rejected=n_rej, last_step=h_last,
        )

    if np.all(f == 0.0) and not math.isfinite(t_end):
        raise InvalidInputError("initial metric is a fixed point; pass a finite t_end")
    if t_end == 0.0 or np.all(f == 0.0):
        if t_end > 0.0:
            ts.append(t_end)
            ys.append(y)
            fs.append(f)
            ms.append(init.as_tuple())
        return finish(Termination.TIME_REACHED, 0 if t_end == 0.0 else 1, 0, t_end)

    h = controls.first_step or _initial_step(sys, y, f, controls, mode)
    t = 0.0
    facold = 1e-4
    rejected_last = False
    n_steps = n_rej = 0

    while True:
        if n_steps >= controls.max_steps or n_rej >= controls.max_steps:
            return finish(Termination.BUDGET_EXHAUSTED, n_steps, n_rej, h)
        h_floor = controls.min_step * max(abs(t), tau0)
        if t + h >= t_end:
            h = t_end - t
        elif h < h_floor or t + h == t:
            rates = sys.log_rates(y, f)
            diverging = float(np.max(np.abs(rates))) * max(t, tau0) >= _DIVERGENCE
            return finish(Termination.BLOW_UP if diverging else Termination.STEP_UNDERFLOW, n_steps, n_rej, h)

        y_new, f_new, err_vec = sys.step(y, f, h)
        err = _error_norm(err_vec, y, y_new, controls, mode)
        if not (np.all(np.isfinite(f_new)) and np.all(np.isfinite(y_new))):
            err = math.inf
        if mode is VariableMode.LINEAR and np.any(y_new <= 0.0):
            err = math.inf

        if err > 1.0:
            n_rej += 1
            fac = _FAC_MIN if not math.isfinite(err) else max(_FAC_MIN, _SAFETY * err ** -_EXPO)
            h *= min(1.0, fac) if math.isfinite(err) else 0.1
            rejected_last = True
            continue

        n_steps += 1
        t_prev, y_prev, f_prev = t, y, f
        t = t_end if h == t_end - t_prev else t_prev + h
        y, f = y_new, f_new
        m = sys.to_m(y)

        stop_event = None
        for i, ev in enumerate(events):
            g1 = ev.func(t, m)
            g0 = ev_prev[i]
            if ev_at_start[i]:
                ev_at_start[i] = False
                if ev.leaves_zero(g1) and not ev.crosses(g0, g1):
                    hits.append(EventHit(ev.name, t_prev, MilnorMetric(*sys.to_m(y_prev)), g0))
                    if ev.terminal and stop_event is None:
                        stop_event = hits[-1]
            if ev.crosses(g0, g1):
                hit = _locate_event(sys, ev, t_prev, y_prev, f_prev, t, y, f, g0, g1, controls)
                hits.append(hit)
                if ev.terminal and (stop_event is None or hit.t < stop_event.t):
                    stop_event = hit
            ev_prev[i] = g1
        if len(hits) > 1:
            hits.sort(key=lambda e: e.t)

        if stop_event is not None and stop_event.t > t_prev:
            y_ev = sys.to_y(stop_event.metric.as_tuple())
            ts.append(stop_event.t)
            ys.append(y_ev)
            fs.append(sys.f(y_ev))
            ms.append(stop_event.metric.as_tuple())
            _check_monitors(monitors, stats, mon_prev, mon_latched, stop_event.metric.as_tuple())
            return finish(Termination.EVENT, n_steps, n_rej, stop_event.t - t_prev)
        if stop_event is not None:
            return finish(Termination.EVENT, n_steps, n_rej, 0.0)

        if not np.all(np.isfinite(f)):
            raise NumericalFailure("non-finite vector field at accepted state", t_prev, MilnorMetric(*sys.to_m(y_prev)))

        ts.append(t)
        ys.append(y)
        fs.append(f)
        ms.append(m)
        if monitors:
            _check_monitors(monitors, stats, mon_prev, mon_latched, m)

        if t >= t_end:
            return finish(Termination.TIME_REACHED, n_steps, n_rej, h)
        if max(m) >= cap:
            return finish(Termination.BLOW_UP, n_steps, n_rej, h)

        # PI step-size update
        fac11 = err ** _EXPO if err > 0 else 0.0
        fac = fac11 / facold ** _BETA / _SAFETY
        fac = min(1.0 / _FAC_MIN, max(1.0 / _FAC_MAX, fac))
        h_new = h / fac if fac > 0 else h * _FAC_MAX
        # keep t + h finite on unbounded horizons
        h_new = min(h_new, _MAX_STEP_RATIO * max(abs(t), tau0))
        if rejected_last:
            h_new = min(h_new, h)
        facold = max(err, 1e-4)
        rejected_last = False
        h = h_new


def _check_monitors(monitors, stats, prev, latched, m):
    for i, mon in enumerate(monitors):
        v = mon.func(m)
        st = stats[mon.name]
        st.checks += 1
        scale = max(mon.scale(m, v), mon.scale(m, prev[i]))
        if mon.kind == "nondecreasing":
            viol = (prev[i] - v) / scale
        elif mon.kind == "nonincreasing":
            viol = (v - prev[i]) / scale
        elif mon.kind == "latch_positive":
            viol = (-v / scale) if latched[i] else 0.0
            latched[i] = latched[i] or v > 0.0
        else:
            raise InvalidInputError(f"unknown monitor kind {mon.kind!r}")
        if viol > 0.0:
            st.worst = max(st.worst, viol)
            if viol > 1e-9:
                st.failures += 1
                log.warning("monitor %s violated by %.3g (relative)", mon.name, viol)
            elif viol > 1e-12:
                st.warnings += 1
                log.debug("monitor %s within slack: %.3g", mon.name, viol)
        prev[i] = v


def _locate_event(sys, ev, t0, y0, f0, t1, y1, f1, g0, g1, controls) -> EventHit:
    """Root of g on the step [t0, t1].

    Brent's method on the Hermite interpolant gives a first guess; it is then
    polished by secant iterations on exact single-step re-integrations from t0.
    """

    def g_dense(t):
        return ev.func(t, sys.to_m(_hermite(t0, t1, y0, y1, f0, f1, t)))

    try:
        tg = brentq(g_dense, t0, t1, xtol=1e-15 * max(abs(t1), 1e-300), rtol=4 * np.finfo(float).eps)
    except ValueError:
        tg = t0 + (t1 - t0) * g0 / (g0 - g1)

    def exact(t):
        if t <= t0:
            return y0
        if t >= t1:
            return y1
        y, _, _ = sys.step(y0, f0, t - t0)
        return y

    def g_exact(t):
        return ev.func(t, sys.to_m(exact(t)))

    # (ta, ga) is the side before the crossing, (tb, gb) the side where it has fired
    ta, ga = t0, g0
    tb, gb = t1, g1
    tc, gc = tg, g_exact(tg)
    last = 0
    for _ in range(100):
        if gc == 0.0:
            tb, gb = tc, gc
            break
        if ev.crosses(g0, gc):
            tb, gb = tc, gc
            if last == 1:
                ga *= 0.5  # Illinois step keeps the fired side moving
            last = 1
        else:
            ta, ga = tc, gc
            if last == -1:
                gb *= 0.5
            last = -1
        if abs(g_exact(tb)) <= 1e-13 * ev.magnitude(sys.to_m(exact(tb))):
            break
        if tb - ta <= 4 * np.finfo(float).eps * max(abs(tb), 1e-300):
            break
        tn = tb - gb * (tb - ta) / (gb - ga) if gb != ga else 0.5 * (ta + tb)
        if not (min(ta, tb) < tn < max(ta, tb)):
            tn = 0.5 * (ta + tb)
        tc, gc = tn, g_exact(tn)
    tc, gc = tb, g_exact(tb)
    m = sys.to_m(exact(tc))
    return EventHit(ev.name, float(tc), MilnorMetric(*m), float(gc))


def detect_events(geom, sign, init, events: Sequence[EventSpec], controls=None, t_end: float = math.inf):
    """Integrate and report every event crossing as (name, t*, m(t*)) in time order."""
    if not events:
        raise InvalidInputError("events must be nonempty")
    traj = integrate(geom, sign, init, t_end, controls, events=events)
    return [(e.name, e.t, e.metric) for e in traj.events]


@dataclass
class BlowUpEstimate:
    """Refined singular time from a joint (T, p, eta) fit of x = eta (T - t)^p."""

    T: float
    component: str
    exponent: float
    coefficient: float
    residual: float
    window: tuple
    trajectory: Trajectory = field(repr=False)


def default_horizon(geom, sign, init) -> float:
    """Time after which a run without blow-up is declared immortal (for t_end='auto')."""
    return 1e6 * time_scale(geom, sign, init)


def estimate_blowup(geom, sign, init, controls=None, *, t_end: Optional[float] = None,
                    decades: float = 2.0, trajectory: Optional[Trajectory] = None) -> BlowUpEstimate:
    """Estimate the blow-up time T of the maximal solution through ``init``.

    The component with the fastest logarithmic rate at the end of the run is
    fitted to eta (T - t)^p over the last ``decades`` decades of T - t, solving
    for (T, p, eta) jointly by nonlinear least squares.

    Raises
    ------
    NotApplicableError
        If the run ends without blow-up.
    """
    from scipy.optimize import least_squares

    geom = Geometry.parse(geom)
    sign = FlowSign.parse(sign)
    if trajectory is None:
        if t_end is None:
            t_end = default_horizon(geom, sign, init)
        trajectory = integrate(geom, sign, init, t_end, controls)
    traj = trajectory
    if traj.termination is not Termination.BLOW_UP:
        raise NotApplicableError(f"no blow-up detected (termination={traj.termination.value})")

    t = traj.t
    rates = np.abs(traj.dy[-1] if traj.mode is VariableMode.LOGARITHMIC else traj.dy[-1] / traj.metrics[-1])
    j = int(np.argmax(rates))
    x = traj.metrics[:, j]
    T = t[-1] + max(traj.last_step, 1e-300)

    fit = None
    for _ in range(3):
        tau = T - t
        tau_last = tau[-1]
        sel = (tau > 0) & (tau <= tau_last * 10 ** decades)
        if sel.sum() < 5:
            sel = np.zeros_like(sel)
            sel[-min(len(t), 20):] = True
        ts, lx = t[sel], np.log(x[sel])
        t_last = ts[-1]
        span = T - ts[0]
        p0 = np.polyfit(np.log(T - ts), lx, 1)

        def resid(theta):
            d, p, ln_eta = theta
            return lx - (ln_eta + p * np.log(d * span + (t_last - ts)))

        d0 = (T - t_last) / span
        res = least_squares(resid, x0=[d0, p0[0], p0[1]],
                            bounds=([1e-300, -np.inf, -np.inf], [np.inf, np.inf, np.inf]),
                            x_scale=[d0, 0.1, 1.0], xtol=1e-15, ftol=1e-15, gtol=1e-15)
        d, p, ln_eta = res.x
        T_new = t_last + d * span
        fit = (p, math.exp(ln_eta), float(np.sqrt(np.mean(res.fun ** 2))), (float(ts[0]), float(t_last)))
        if abs(T_new - T) <= 1e-15 * abs(T):
            T = T_new
            break
        T = T_new
    p, eta, rms, window = fit
    return BlowUpEstimate(T=float(T), component="ABC"[j], exponent=float(p), coefficient=float(eta),
                          residual=rms, window=window, trajectory=traj)
