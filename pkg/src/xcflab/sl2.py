"""Regime classification of SL(2,R) initial data under +XCF.

Initial data fall into two open basins, Q1 and Q2, separated by an exceptional
set S0.  Q1 is entered once A >= B - C or F2 > 0, Q2 once F1 > 0; both
regions are absorbing.  Everything assumes the normalisation B >= C, which
the flow preserves; inputs with C > B are swapped first.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import BracketError, ClassificationFailure, InconclusiveError, InvalidInputError, NumericalFailure
from .flow import FlowSign, _aux_raw
from .geometry import Geometry, MilnorMetric
from .integrator import EventSpec, IntegratorControls, Termination, Trajectory, integrate

TRIGGER_A_GE_B_MINUS_C = "A>=B-C"
TRIGGER_F2 = "F2>0"
TRIGGER_F1 = "F1>0"

MONOTONICITY_NOTE = "bisection assumes the label is monotone in a inside the bracket (not proven)"


class Regime(enum.Enum):
    Q1 = "Q1"
    Q2 = "Q2"
    UNDETERMINED = "Undetermined"


@dataclass(frozen=True)
class RegimeCoordinates:
    """a = A/B and c = C/B with B >= C."""

    a: float
    c: float

    @classmethod
    def of(cls, m) -> "RegimeCoordinates":
        m, _ = _ordered(m)
        return cls(m.A / m.B, m.C / m.B)


@dataclass(frozen=True)
class RegionFlags:
    f2_positive: bool
    f1_positive: bool
    a_ge_1_minus_c: bool
    swapped: bool

    @property
    def q1(self) -> bool:
        return self.f2_positive or self.a_ge_1_minus_c

    @property
    def q2(self) -> bool:
        return self.f1_positive


@dataclass
class RegimeLabel:
    label: Regime
    trigger_time: Optional[float]
    trigger: Optional[str]
    swapped: bool = False
    termination: Optional[Termination] = None
    trajectory: Optional[Trajectory] = field(default=None, repr=False)


def _ordered(m) -> tuple[MilnorMetric, bool]:
    m = MilnorMetric.coerce(m)
    if m.C > m.B:
        return MilnorMetric(m.A, m.C, m.B), True
    return m, False


def instantaneous_region(m) -> RegionFlags:
    """Which absorbing conditions hold at ``m``, from the exact polynomials.

    >>> instantaneous_region((1, 1, 0.5)).a_ge_1_minus_c
    True
    """
    m, swapped = _ordered(m)
    F1, F2, _ = _aux_raw(Geometry.SL2R, m.A, m.B, m.C)
    return RegionFlags(F2 > 0.0, F1 > 0.0, m.A + m.C >= m.B, swapped)


def _label_of(flags: RegionFlags) -> tuple[Regime, Optional[str]]:
    if flags.a_ge_1_minus_c:
        return Regime.Q1, TRIGGER_A_GE_B_MINUS_C
    if flags.f2_positive:
        return Regime.Q1, TRIGGER_F2
    if flags.f1_positive:
        return Regime.Q2, TRIGGER_F1
    return Regime.UNDETERMINED, None


def _trigger_events() -> list[EventSpec]:
    # normalised by B (degree 1) or B^2 (degree 2) so the event tolerance is scale free
    def g_sum(t, m):
        return (m[0] + m[2] - m[1]) / m[1]

    def g_f2(t, m):
        return _aux_raw(Geometry.SL2R, *m)[1] / (m[1] * m[1])

    def g_f1(t, m):
        return _aux_raw(Geometry.SL2R, *m)[0] / (m[1] * m[1])

    return [
        EventSpec(TRIGGER_A_GE_B_MINUS_C, g_sum, "rising", terminal=True),
        EventSpec(TRIGGER_F2, g_f2, "rising", terminal=True),
        EventSpec(TRIGGER_F1, g_f1, "rising", terminal=True),
    ]


_REGIME_OF_TRIGGER = {TRIGGER_A_GE_B_MINUS_C: Regime.Q1, TRIGGER_F2: Regime.Q1, TRIGGER_F1: Regime.Q2}


def classify(init, controls: Optional[IntegratorControls] = None, *, t_end: float = math.inf,
             keep_trajectory: bool = False) -> RegimeLabel:
    """Integrate +XCF until an absorbing region is entered.

    Returns Q1 or Q2 with the time and condition that fired, or Undetermined
    if the run blows up, underflows or exhausts its budget first.

    Raises
    ------
    ClassificationFailure
        If the integration itself fails; the exception carries the partial
        trajectory state.
    """
    m, swapped = _ordered(init)
    label, trig = _label_of(instantaneous_region(m))
    if label is not Regime.UNDETERMINED:
        traj = integrate(Geometry.SL2R, FlowSign.POSITIVE, m, 0.0) if keep_trajectory else None
        return RegimeLabel(label, 0.0, trig, swapped, Termination.EVENT, traj)
    try:
        traj = integrate(Geometry.SL2R, FlowSign.POSITIVE, m, t_end, controls, events=_trigger_events())
    except NumericalFailure as exc:
        raise ClassificationFailure(f"integration failed while classifying {m}: {exc}",
                                    trajectory=(exc.t, exc.state)) from exc
    kept = traj if keep_trajectory else None
    if traj.termination is Termination.EVENT:
        hit = min((e for e in traj.events if e.name in _REGIME_OF_TRIGGER), key=lambda e: e.t)
        return RegimeLabel(_REGIME_OF_TRIGGER[hit.name], hit.t, hit.name, swapped, traj.termination, kept)
    return RegimeLabel(Regime.UNDETERMINED, None, None, swapped, traj.termination, kept)


@dataclass
class SpotCheck:
    a: float
    label: Regime
    consistent: bool


@dataclass
class SeparatrixResult:
    """Bisection outcome along the fiber A = a*b, B = b, C = c.

    ``low_label`` and ``high_label`` are the labels at the lower and upper
    bracket ends.  ``spot_checks`` classify interior points of the original
    bracket; ``monotone_consistent`` is False if any contradicts the
    monotonicity assumption.
    """

    a_star: float
    lo: float
    hi: float
    iterations: int
    low_label: Optional[Regime]
    high_label: Optional[Regime]
    spot_checks: list = field(default_factory=list)
    monotone_consistent: bool = True
    undetermined_midpoint: Optional[float] = None
    note: str = MONOTONICITY_NOTE


def _fiber_point(a, b, c) -> MilnorMetric:
    return MilnorMetric(a * b, b, c)


def find_separatrix(b: float, c: float, bracket: tuple, tol: float = 1e-8,
                    controls: Optional[IntegratorControls] = None, *, n_spot: int = 4) -> SeparatrixResult:
    """Locate a* with classify((a b, b, c)) switching label at a = a*.

    Raises
    ------
    BracketError
        If both ends get the same label.
    InconclusiveError
        If an end is Undetermined (try a larger budget).
    """
    a_lo, a_hi = (float(x) for x in bracket)
    if not (0.0 < a_lo < a_hi and math.isfinite(a_hi)):
        raise InvalidInputError(f"bracket must satisfy 0 < a_lo < a_hi, got {bracket!r}")
    if not (tol > 0.0):
        raise InvalidInputError(f"tol must be > 0, got {tol!r}")
    MilnorMetric(a_lo * b, b, c)  # validates b, c
    if tol >= a_hi - a_lo:
        return SeparatrixResult(0.5 * (a_lo + a_hi), a_lo, a_hi, 0, None, None)

    def label(a):
        return classify(_fiber_point(a, b, c), controls).label

    lab_lo, lab_hi = label(a_lo), label(a_hi)
    for a, lab in ((a_lo, lab_lo), (a_hi, lab_hi)):
        if lab is Regime.UNDETERMINED:
            raise InconclusiveError(f"classification at a={a} is Undetermined; increase the step budget")
    if lab_lo is lab_hi:
        raise BracketError(f"both ends of {bracket!r} classify as {lab_lo.value}")

    lo, hi = a_lo, a_hi
    it = 0
    undetermined = None
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        lab = label(mid)
        it += 1
        if lab is Regime.UNDETERMINED:
            undetermined = mid
            break
        if lab is lab_lo:
            lo = mid
        else:
            hi = mid
    a_star = 0.5 * (lo + hi)

    spots = []
    for a in np.linspace(a_lo, a_hi, n_spot + 2)[1:-1]:
        a = float(a)
        lab = label(a)
        expected = lab_lo if a < a_star else lab_hi
        spots.append(SpotCheck(a, lab, lab is expected or abs(a - a_star) <= tol))
    return SeparatrixResult(
        a_star=a_star, lo=lo, hi=hi, iterations=it, low_label=lab_lo, high_label=lab_hi,
        spot_checks=spots, monotone_consistent=all(s.consistent for s in spots),
        undetermined_midpoint=undetermined,
    )


@dataclass
class Case3Signature:
    """Case-3 behaviour of a near-separatrix trajectory on its best window.

    ``k`` is the common value of B and C at closest approach, ``ratio`` the
    values of 2kA/(B-C)^2 on the window, ``root_coeff`` those of
    (B-C)/sqrt(T_hat-t) with T_hat from a linear fit of A in t.  The limiting
    values are 1 and 8 sqrt(2), and ``A_slope`` tends to -64/k.
    """

    k: float
    T_hat: float
    window: tuple
    A_range: tuple
    ratio: np.ndarray
    root_coeff: np.ndarray
    A_slope: float

    @property
    def n_samples(self) -> int:
        return len(self.ratio)


def case3_signature(traj: Trajectory, band: tuple = (0.95, 1.05), *, a_frac: float = 0.02,
                    min_samples: int = 20) -> Case3Signature:
    """Find the stretch where A decays linearly while B and C merge.

    The window is the longest run of samples, before A reaches its minimum,
    with A <= a_frac * k and 2kA/(B-C)^2 inside ``band``.  A is fitted
    linearly in t there to obtain the would-be singular time T_hat.
    """
    t = traj.t
    A, B, C = traj.metrics[:, 0], traj.metrics[:, 1], traj.metrics[:, 2]
    i_min = int(np.argmin(A))
    k = 0.5 * (B[i_min] + C[i_min])
    with np.errstate(divide="ignore", invalid="ignore"):
        q = 2.0 * k * A / (B - C) ** 2
    inside = (q >= band[0]) & (q <= band[1]) & (A <= a_frac * k)
    inside[i_min + 1:] = False
    best, start = (0, 0), None
    for i, flag in enumerate(np.append(inside, False)):
        if flag and start is None:
            start = i
        elif not flag and start is not None:
            if i - start > best[1] - best[0]:
                best = (start, i)
            start = None
    lo, hi = best
    if hi - lo < min_samples:
        raise InconclusiveError(f"only {hi - lo} samples show the case-3 signature")
    sl = slice(lo, hi)
    slope, icpt = np.polyfit(t[sl], A[sl], 1)
    T_hat = -icpt / slope
    with np.errstate(invalid="ignore"):
        root = (B[sl] - C[sl]) / np.sqrt(T_hat - t[sl])
    return Case3Signature(float(k), float(T_hat), (float(t[lo]), float(t[hi - 1])),
                          (float(A[hi - 1]), float(A[lo])), q[sl], root, float(slope))
