"""Default monotonicity monitors for +XCF runs.

SU(2) with A >= B >= C: A, A/B, A/C, A - B, A - C nondecreasing.
E(1,1) with A > C: C nonincreasing; A - C, A/C, A - 3C nondecreasing.
SL(2,R): F2 and F1 stay positive once positive; B - C keeps its sign.
"""
from __future__ import annotations

from .flow import FlowSign, _aux_raw
from .geometry import Geometry, MilnorMetric
from .integrator import Monitor


def _sl2_f(i):
    return lambda m: _aux_raw(Geometry.SL2R, m[0], m[1], m[2])[i]


def default_monitors(geom, sign, init) -> list[Monitor]:
    """Monitors that hold along +XCF from ``init``; empty if none apply."""
    geom = Geometry.parse(geom)
    if FlowSign.parse(sign) is not FlowSign.POSITIVE:
        return []
    A, B, C = MilnorMetric.coerce(init)
    if geom is Geometry.SU2 and A >= B >= C:
        return [
            Monitor("A", lambda m: m[0], "nondecreasing", 1),
            Monitor("A/B", lambda m: m[0] / m[1], "nondecreasing", 0),
            Monitor("A/C", lambda m: m[0] / m[2], "nondecreasing", 0),
            Monitor("A-B", lambda m: m[0] - m[1], "nondecreasing", 1),
            Monitor("A-C", lambda m: m[0] - m[2], "nondecreasing", 1),
        ]
    if geom is Geometry.E11 and A > C:
        return [
            Monitor("C", lambda m: m[2], "nonincreasing", 1),
            Monitor("A-C", lambda m: m[0] - m[2], "nondecreasing", 1),
            Monitor("A/C", lambda m: m[0] / m[2], "nondecreasing", 0),
            Monitor("A-3C", lambda m: m[0] - 3.0 * m[2], "nondecreasing", 1),
        ]
    if geom is Geometry.SL2R:
        if B >= C:
            order = Monitor("B-C", lambda m: m[1] - m[2], "latch_positive", 1)
        else:
            order = Monitor("C-B", lambda m: m[2] - m[1], "latch_positive", 1)
        return [
            Monitor("F2", _sl2_f(1), "latch_positive", 2),
            Monitor("F1", _sl2_f(0), "latch_positive", 2),
            order,
        ]
    return []
