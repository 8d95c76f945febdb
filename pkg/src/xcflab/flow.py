"""Vector fields of the positive and negative cross curvature flows.

Right-hand sides are transcribed from the per-geometry systems

    dA/dt = 2 A q2 q3 / (ABC)^2,  dB/dt = 2 B q3 q1 / (ABC)^2,  dC/dt = 2 C q1 q2 / (ABC)^2

with (q1, q2, q3) the auxiliary polynomials of each geometry (X, Y, Z or
F1, F2, F3).  The Heisenberg system has its own closed form.  Everything here
is for +XCF; the negative flow is the pointwise negation.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import NamedTuple

from .errors import InvalidInputError, NotApplicableError
from .geometry import Geometry, MilnorMetric


class FlowSign(enum.Enum):
    POSITIVE = 1
    NEGATIVE = -1

    @property
    def factor(self) -> float:
        return float(self.value)

    @property
    def opposite(self) -> "FlowSign":
        return FlowSign.NEGATIVE if self is FlowSign.POSITIVE else FlowSign.POSITIVE

    @classmethod
    def parse(cls, s) -> "FlowSign":
        if isinstance(s, FlowSign):
            return s
        key = str(s).strip().lower()
        if key in ("+", "+1", "1", "plus", "pos", "positive", "+xcf"):
            return cls.POSITIVE
        if key in ("-", "-1", "minus", "neg", "negative", "-xcf"):
            return cls.NEGATIVE
        raise InvalidInputError(f"unsupported flow sign: {s!r}")


class AuxQuantities(NamedTuple):
    q1: float
    q2: float
    q3: float


def _aux_raw(geom: Geometry, A: float, B: float, C: float) -> tuple[float, float, float]:
    if geom is Geometry.SU2:
        return (
            3.0 * A * A - (B - C) ** 2 - 2.0 * A * B - 2.0 * A * C,
            3.0 * B * B - (A - C) ** 2 - 2.0 * A * B - 2.0 * B * C,
            3.0 * C * C - (A - B) ** 2 - 2.0 * B * C - 2.0 * A * C,
        )
    if geom is Geometry.E11:
        s = A + C
        return (s * (3.0 * A - C), -s * s, -s * (A - 3.0 * C))
    if geom is Geometry.E2:
        d = A - B
        return (d * (3.0 * A + B), -d * (3.0 * B + A), -d * d)
    if geom is Geometry.SL2R:
        return (
            -3.0 * A * A + B * B + C * C - 2.0 * B * C - 2.0 * A * C - 2.0 * A * B,
            -3.0 * B * B + A * A + C * C + 2.0 * B * C + 2.0 * A * C - 2.0 * A * B,
            -3.0 * C * C + A * A + B * B + 2.0 * B * C - 2.0 * A * C + 2.0 * A * B,
        )
    raise NotApplicableError(f"{geom.name} has no auxiliary quantities")


def aux_quantities(geom, m) -> AuxQuantities:
    """X, Y, Z (SU2, E11, E2) or F1, F2, F3 (SL2R) at the metric ``m``."""
    geom = Geometry.parse(geom)
    m = MilnorMetric.coerce(m)
    return AuxQuantities(*_aux_raw(geom, m.A, m.B, m.C))


def rhs_raw(geom: Geometry, A: float, B: float, C: float) -> tuple[float, float, float]:
    """+XCF right-hand side on plain floats (no validation); hot path of the integrator."""
    if geom is Geometry.HEISENBERG:
        r = A / (B * C)
        r2 = r * r
        return (2.0 * A * r2, -6.0 * B * r2, -6.0 * C * r2)
    if geom is Geometry.ABELIAN:
        return (0.0, 0.0, 0.0)
    q1, q2, q3 = _aux_raw(geom, A, B, C)
    P = A * B * C
    q1, q2, q3 = q1 / P, q2 / P, q3 / P
    return (2.0 * A * q2 * q3, 2.0 * B * q3 * q1, 2.0 * C * q1 * q2)


def log_rhs_raw(geom: Geometry, A: float, B: float, C: float) -> tuple[float, float, float]:
    """+XCF rates of (ln A, ln B, ln C) on plain floats."""
    if geom is Geometry.HEISENBERG:
        r = A / (B * C)
        r2 = r * r
        return (2.0 * r2, -6.0 * r2, -6.0 * r2)
    if geom is Geometry.ABELIAN:
        return (0.0, 0.0, 0.0)
    q1, q2, q3 = _aux_raw(geom, A, B, C)
    P = A * B * C
    q1, q2, q3 = q1 / P, q2 / P, q3 / P
    return (2.0 * q2 * q3, 2.0 * q3 * q1, 2.0 * q1 * q2)


def xcf_rhs(geom, sign, m) -> tuple[float, float, float]:
    """(dA/dt, dB/dt, dC/dt) for +XCF or -XCF.

    >>> xcf_rhs("heisenberg", "+", (1, 1, 1))
    (2.0, -6.0, -6.0)
    """
    geom = Geometry.parse(geom)
    s = FlowSign.parse(sign).factor
    m = MilnorMetric.coerce(m)
    dA, dB, dC = rhs_raw(geom, m.A, m.B, m.C)
    return (s * dA, s * dB, s * dC)


def log_rhs(geom, sign, u) -> tuple[float, float, float]:
    """Rates of (ln A, ln B, ln C) given u = (ln A, ln B, ln C).

    Equal to xcf_rhs(m) / m componentwise with m = exp(u).
    """
    geom = Geometry.parse(geom)
    s = FlowSign.parse(sign).factor
    try:
        uA, uB, uC = (float(x) for x in u)
    except (TypeError, ValueError):
        raise InvalidInputError(f"expected three log-components, got {u!r}") from None
    if not all(math.isfinite(x) for x in (uA, uB, uC)):
        raise InvalidInputError(f"log-metric must be finite, got {u!r}")
    rA, rB, rC = log_rhs_raw(geom, math.exp(uA), math.exp(uB), math.exp(uC))
    return (s * rA, s * rB, s * rC)


@dataclass(frozen=True)
class DerivedRates:
    """Closed-form rates of component ratios and differences.

    ``extra`` holds geometry-specific displays (e.g. ``"d(A-3C)"`` on E(1,1),
    ``"dln(B-C)"`` on SL(2,R)).
    """

    dln_A_over_B: float
    dln_A_over_C: float
    dln_B_over_C: float
    d_A_minus_B: float
    d_B_minus_C: float
    d_A_minus_C: float
    extra: dict

    def as_dict(self) -> dict:
        out = {
            "dln(A/B)": self.dln_A_over_B,
            "dln(A/C)": self.dln_A_over_C,
            "dln(B/C)": self.dln_B_over_C,
            "d(A-B)": self.d_A_minus_B,
            "d(B-C)": self.d_B_minus_C,
            "d(A-C)": self.d_A_minus_C,
        }
        out.update(self.extra)
        return out


def derived_rates(geom, sign, m) -> DerivedRates:
    """Factored expressions for d ln(A/B), d(A-B), ... on SU2, E(1,1) and SL(2,R).

    These are evaluated from their own factored forms, not by differencing
    :func:`xcf_rhs`, so they stay accurate on near-symmetric loci.
    """
    geom = Geometry.parse(geom)
    s = FlowSign.parse(sign).factor
    m = MilnorMetric.coerce(m)
    A, B, C = m.A, m.B, m.C
    P2 = (A * B * C) ** 2

    if geom is Geometry.SU2:
        X, Y, Z = _aux_raw(geom, A, B, C)
        r = (
            8.0 * Z / P2 * (B - A) * (A + B - C),
            8.0 * Y / P2 * (A - C) * (B - C - A),
            8.0 * X / P2 * (B - C) * (A - B - C),
            2.0 * Z / P2 * (B - A) * (A * A + A * (6.0 * B - 2.0 * C) + (B - C) ** 2),
            2.0 * X / P2 * (C - B) * ((A - B - C) ** 2 + 4.0 * B * C),
            2.0 * Y / P2 * (C - A) * ((A - B) ** 2 + 6.0 * A * C - 2.0 * B * C + C * C),
        )
        extra = {}
    elif geom is Geometry.E11:
        S = A + C
        r = (
            8.0 * (A - 3.0 * C) * S * S / (A * B * B * C * C),
            8.0 * S ** 3 / P2 * (A - C),
            8.0 * S * S * (3.0 * A - C) / (A * A * B * B * C),
            2.0 * (A - 3.0 * C) * S * S * (A * A + 3.0 * A * B + A * C - B * C) / P2,
            -2.0 * S * S * (3.0 * A - C) * (A * B - A * C - 3.0 * B * C - C * C) / P2,
            2.0 * S ** 4 / P2 * (A - C),
        )
        extra = {"d(A-3C)": s * 2.0 * S ** 3 / P2 * (A * A + 6.0 * A * C - 3.0 * C * C)}
    elif geom is Geometry.SL2R:
        F1, F2, F3 = _aux_raw(geom, A, B, C)
        Yb = A * A + B * B + C * C + 6.0 * B * C + 2.0 * A * B + 2.0 * A * C
        dln_c_over_b = 8.0 * (B - C) / P2 * (A + B + C) * (-F1)
        dln_c_over_a = 8.0 * F2 / P2 * (C + A) * (C - A - B)
        r = (
            8.0 * (A + B) / P2 * F3 * (A + C - B),
            -dln_c_over_a,
            -dln_c_over_b,
            2.0 * F3 * (A * F2 - B * F1) / P2,
            2.0 * F1 * Yb / P2 * (B - C),
            2.0 * F2 * (A * F3 - C * F1) / P2,
        )
        extra = {"dln(B-C)": s * 2.0 * F1 * Yb / P2}
    else:
        raise NotApplicableError(f"no closed-form rate displays for {geom.name}")
    return DerivedRates(*(s * v for v in r), extra=extra)
