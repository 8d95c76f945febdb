"""Closed-form solutions of the cross curvature flows.

Every oracle documents the flow it solves natively and accepts a ``sign``
argument; the opposite flow is obtained by t -> -t.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass

from .errors import InvalidInputError, OutOfDomainError
from .flow import FlowSign
from .geometry import MilnorMetric


class ExactFamily(enum.Enum):
    HEISENBERG_GENERAL = "HeisenbergGeneral"
    SU2_ROUND = "SU2Round"
    E11_SYMMETRIC = "E11Symmetric"
    E2_FIXED = "E2Fixed"


@dataclass(frozen=True)
class HeisenbergConstants:
    R0: float
    T0: float


def heisenberg_constants(init) -> HeisenbergConstants:
    """R0 = 2 A0 / (B0 C0) and T0 = 1 / (7 R0^2) = B0^2 C0^2 / (28 A0^2)."""
    m = MilnorMetric.coerce(init)
    R0 = 2.0 * m.A / (m.B * m.C)
    return HeisenbergConstants(R0=R0, T0=1.0 / (7.0 * R0 * R0))


def heisenberg_exact(init, t: float, sign="-") -> MilnorMetric:
    """Maximal Heisenberg solution.

    Native direction is -XCF, defined on (-T0, inf):
    A = A0 s^(-1/14), B = B0 s^(3/14), C = C0 s^(3/14) with s = 1 + t/T0.
    For +XCF the time is negated, so the solution lives on (-inf, T0).
    """
    m = MilnorMetric.coerce(init)
    T0 = heisenberg_constants(m).T0
    tau = t if FlowSign.parse(sign) is FlowSign.NEGATIVE else -t
    s = 1.0 + tau / T0
    if not s > 0.0:
        raise OutOfDomainError(f"t={t} outside the Heisenberg existence interval (T0={T0})")
    grow = s ** (3.0 / 14.0)
    return MilnorMetric(m.A * s ** (-1.0 / 14.0), m.B * grow, m.C * grow)


def heisenberg_curvature_scale(init, t: float, sign="-") -> float:
    """Common value of K(f1^f2) = K(f3^f1) = -K(f2^f3)/3 along the exact solution."""
    m = MilnorMetric.coerce(init)
    T0 = heisenberg_constants(m).T0
    tau = t if FlowSign.parse(sign) is FlowSign.NEGATIVE else -t
    s = 1.0 + tau / T0
    if not s > 0.0:
        raise OutOfDomainError(f"t={t} outside the Heisenberg existence interval (T0={T0})")
    return m.A / (m.B * m.C) * s ** -0.5


def _require_equal(x, y, what):
    if not math.isclose(x, y, rel_tol=1e-14, abs_tol=0.0):
        raise InvalidInputError(f"family precondition violated: {what}")


def su2_round_exact(init, t: float, sign="+") -> MilnorMetric:
    """Round SU(2) metric, A = B = C = sqrt(A0^2 + 4t) under +XCF (native)."""
    m = MilnorMetric.coerce(init)
    _require_equal(m.A, m.B, "A0 = B0")
    _require_equal(m.B, m.C, "B0 = C0")
    tau = t if FlowSign.parse(sign) is FlowSign.POSITIVE else -t
    sq = m.A * m.A + 4.0 * tau
    if not sq > 0.0:
        raise OutOfDomainError(f"A0^2 + 4t = {sq} <= 0")
    a = math.sqrt(sq)
    return MilnorMetric(a, a, a)


def e11_symmetric_exact(init, t: float, sign="+") -> MilnorMetric:
    """E(1,1) with A0 = C0: B = sqrt(B0^2 + 64t), A = C = A0 B0 / B under +XCF (native).

    A * B is conserved along the family.
    """
    m = MilnorMetric.coerce(init)
    _require_equal(m.A, m.C, "A0 = C0")
    tau = t if FlowSign.parse(sign) is FlowSign.POSITIVE else -t
    sq = m.B * m.B + 64.0 * tau
    if not sq > 0.0:
        raise OutOfDomainError(f"B0^2 + 64t = {sq} <= 0")
    b = math.sqrt(sq)
    a = m.A * m.B / b
    return MilnorMetric(a, b, a)


def e2_fixed_exact(init, t: float, sign="+") -> MilnorMetric:
    """E(2) with A0 = B0 is flat and therefore stationary under both flows."""
    m = MilnorMetric.coerce(init)
    _require_equal(m.A, m.B, "A0 = B0")
    FlowSign.parse(sign)
    if not math.isfinite(float(t)):
        raise OutOfDomainError("t must be finite")
    return m


def family_of(geom, init):
    """Which exact family (if any) contains ``init`` for ``geom``."""
    from .geometry import Geometry

    geom = Geometry.parse(geom)
    m = MilnorMetric.coerce(init)
    if geom is Geometry.HEISENBERG:
        return ExactFamily.HEISENBERG_GENERAL
    if geom is Geometry.SU2 and m.A == m.B == m.C:
        return ExactFamily.SU2_ROUND
    if geom is Geometry.E11 and m.A == m.C:
        return ExactFamily.E11_SYMMETRIC
    if geom is Geometry.E2 and m.A == m.B:
        return ExactFamily.E2_FIXED
    return None


def exact_solution(family: ExactFamily, init, t: float, sign) -> MilnorMetric:
    fn = {
        ExactFamily.HEISENBERG_GENERAL: heisenberg_exact,
        ExactFamily.SU2_ROUND: su2_round_exact,
        ExactFamily.E11_SYMMETRIC: e11_symmetric_exact,
        ExactFamily.E2_FIXED: e2_fixed_exact,
    }[ExactFamily(family)]
    return fn(init, t, sign)
