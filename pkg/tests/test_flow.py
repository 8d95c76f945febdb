import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from xcflab import (FlowSign, InvalidInputError, NotApplicableError, aux_quantities, cross_curvature,
                    derived_rates, log_rhs, xcf_rhs)

from conftest import ALL_GEOMETRIES, GEOMETRIES, component, metrics, rel_err


def test_sign_parsing():
    assert FlowSign.parse("plus") is FlowSign.POSITIVE
    assert FlowSign.parse("-") is FlowSign.NEGATIVE
    assert FlowSign.POSITIVE.opposite is FlowSign.NEGATIVE
    with pytest.raises(InvalidInputError):
        FlowSign.parse("sideways")


def test_aux_examples():
    assert aux_quantities("su2", (2, 1, 1)) == (4.0, -4.0, -4.0)
    assert aux_quantities("sl2r", (1, 3, 1)) == (-7.0, -23.0, 17.0)


@given(component)
def test_e11_aux_independent_of_b(b):
    assert aux_quantities("e11", (1, b, 1)) == (4.0, -4.0, 4.0)


@pytest.mark.parametrize("geom", ["heisenberg", "abelian"])
def test_aux_not_applicable(geom):
    with pytest.raises(NotApplicableError):
        aux_quantities(geom, (1, 1, 1))


def test_rhs_examples():
    assert xcf_rhs("heisenberg", "+", (1, 1, 1)) == (2.0, -6.0, -6.0)
    assert xcf_rhs("su2", "+", (2, 1, 1)) == (16.0, -8.0, -8.0)
    assert xcf_rhs("e2", "+", (2, 1, 1)) == (5.0, -3.5, -17.5)
    assert xcf_rhs("su2", "+", (1, 1, 1)) == (2.0, 2.0, 2.0)
    assert xcf_rhs("e2", "+", (3, 3, 7)) == (0.0, 0.0, 0.0)


@given(component, component)
def test_e11_symmetric_db(a, b):
    assert math.isclose(xcf_rhs("e11", "+", (a, b, a))[1], 32.0 / b, rel_tol=1e-13)


def test_log_rhs_examples():
    assert log_rhs("heisenberg", "+", (0.0, 0.0, 0.0)) == (2.0, -6.0, -6.0)
    assert rel_err(log_rhs("su2", "+", np.log([2, 1, 1])), (8, -8, -8)) < 1e-14
    with pytest.raises(InvalidInputError):
        log_rhs("su2", "+", (0.0, math.inf, 0.0))


@given(st.sampled_from(ALL_GEOMETRIES), metrics)
def test_sign_flip(geom, m):
    plus = xcf_rhs(geom, "+", m)
    minus = xcf_rhs(geom, "-", m)
    assert all(p == -q for p, q in zip(plus, minus))
    u = np.log(m)
    assert all(p == -q for p, q in zip(log_rhs(geom, "+", u), log_rhs(geom, "-", u)))


@given(st.sampled_from(ALL_GEOMETRIES), st.sampled_from(["+", "-"]), metrics)
def test_rhs_is_twice_cross_curvature(geom, sign, m):
    s = 1.0 if sign == "+" else -1.0
    rhs = np.asarray(xcf_rhs(geom, sign, m))
    h = np.asarray(cross_curvature(geom, m))
    # near-symmetric metrics make the curvature route cancel; measure against
    # the natural size m * kappa^2 of h with kappa = 1/min(m)
    scale = max(np.max(np.abs(h)), max(m) / min(m) ** 2)
    assert np.all(np.abs(rhs - 2 * s * h) <= 1e-13 * scale)


@pytest.mark.parametrize("geom", ALL_GEOMETRIES)
def test_rhs_consistency_1000_random(geom, rng):
    for x in rng.uniform(0.1, 10.0, (1000, 3)):
        rhs = np.asarray(xcf_rhs(geom, "+", x))
        h = np.asarray(cross_curvature(geom, x))
        assert np.all(np.abs(rhs - 2 * h) <= 1e-13 * np.max(np.abs(h)) + 1e-300)


@given(st.sampled_from(ALL_GEOMETRIES), metrics)
def test_log_rhs_equals_rhs_over_m(geom, m):
    rhs = np.asarray(xcf_rhs(geom, "+", m)) / np.asarray(m)
    lr = np.asarray(log_rhs(geom, "+", np.log(m)))
    assert np.all(np.abs(lr - rhs) <= 1e-12 * np.max(np.abs(rhs)) + 1e-300)


@given(st.sampled_from(ALL_GEOMETRIES), metrics, st.sampled_from([0.5, 2.0, 10.0]))
def test_rhs_degree_minus_one(geom, m, lam):
    r = np.asarray(xcf_rhs(geom, "+", m))
    rl = np.asarray(xcf_rhs(geom, "+", tuple(lam * v for v in m)))
    assert np.all(np.abs(rl - r / lam) <= 1e-13 * np.max(np.abs(r)) / lam + 1e-300)


def _combos(geom, m):
    A, B, C = m
    dA, dB, dC = xcf_rhs(geom, "+", m)
    return {
        "dln(A/B)": dA / A - dB / B,
        "dln(A/C)": dA / A - dC / C,
        "dln(B/C)": dB / B - dC / C,
        "d(A-B)": dA - dB,
        "d(B-C)": dB - dC,
        "d(A-C)": dA - dC,
    }


def _scale(geom, m):
    return max(abs(v) for v in xcf_rhs(geom, "+", m)) / min(m)


@given(st.sampled_from(["su2", "e11", "sl2r"]), metrics)
def test_derived_rates_consistent(geom, m):
    got = derived_rates(geom, "+", m).as_dict()
    want = _combos(geom, m)
    sc = _scale(geom, m)
    for key, v in want.items():
        assert abs(got[key] - v) <= 1e-12 * sc + 1e-300, key


@given(metrics)
def test_derived_extras(m):
    A, B, C = m
    dA, dB, dC = xcf_rhs("e11", "+", m)
    assert abs(derived_rates("e11", "+", m).extra["d(A-3C)"] - (dA - 3 * dC)) <= 1e-12 * _scale("e11", m)
    dA, dB, dC = xcf_rhs("sl2r", "+", m)
    if B != C:
        want = (dB - dC) / (B - C)
        got = derived_rates("sl2r", "+", m).extra["dln(B-C)"]
        assert abs(got - want) <= 1e-9 * _scale("sl2r", m) * max(1.0, max(m) / abs(B - C))


def test_derived_examples():
    assert derived_rates("su2", "+", (2, 1, 1)).dln_A_over_B == 16.0
    r = derived_rates("su2", "+", (1, 1, 1)).as_dict()
    assert all(v == 0.0 for v in r.values())
    for b in (0.3, 1.0, 7.0):
        assert derived_rates("e11", "+", (1, b, 1)).d_A_minus_C == 0.0


@given(metrics)
def test_derived_rates_negative_sign(m):
    p = derived_rates("sl2r", "+", m).as_dict()
    n = derived_rates("sl2r", "-", m).as_dict()
    assert all(p[k] == -n[k] for k in p)


@pytest.mark.parametrize("geom", ["heisenberg", "e2", "abelian"])
def test_derived_not_applicable(geom):
    with pytest.raises(NotApplicableError):
        derived_rates(geom, "+", (1, 2, 3))


def test_e11_isometry_equivariance(rng):
    for x in rng.uniform(0.1, 10.0, (100, 3)):
        A, B, C = x
        dA, dB, dC = xcf_rhs("e11", "+", x)
        for r in (0.5, 3.0):
            got = xcf_rhs("e11", "+", (r * A, B, r * C))
            assert rel_err(got, (r * dA, dB, r * dC)) <= 1e-13


@given(metrics)
def test_sl2r_swap_symmetry(m):
    A, B, C = m
    dA, dB, dC = xcf_rhs("sl2r", "+", (A, B, C))
    sA, sB, sC = xcf_rhs("sl2r", "+", (A, C, B))
    sc = max(abs(dA), abs(dB), abs(dC))
    assert abs(sA - dA) <= 1e-13 * sc and abs(sB - dC) <= 1e-13 * sc and abs(sC - dB) <= 1e-13 * sc


@given(metrics)
def test_sl2r_aux_invariants(m):
    A, B, C = m
    if B < C:
        B, C = C, B
    F1, F2, F3 = aux_quantities("sl2r", (A, B, C))
    # both bounds assume the B >= C normalisation (F1 + F2 = -2A^2 - 4AB - 2(B^2 - C^2))
    assert F1 + F2 < 0
    assert F3 >= A * A - 1e-14 * max(A, B, C) ** 2
