import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from xcflab import (InvalidInputError, NotApplicableError, Termination, WindowError, berger_growth_ratio,
                    blowup_exponents, e11_symmetric_exact, estimate_blowup, estimate_limits, fit_power_law,
                    integrate, subriemannian_limit)
from xcflab.asymptotics import extrapolate_limit, infinite_time_limit


@pytest.fixture(scope="module")
def su2_generic():
    return estimate_blowup("su2", "+", (2.0, 1.0, 0.5))


@pytest.fixture(scope="module")
def su2_symmetric():
    return estimate_blowup("su2", "+", (2.0, 1.0, 1.0))


def _synthetic_tau():
    return np.logspace(-12, -7, 200)


def test_fit_recovers_generator():
    tau = _synthetic_tau()
    t = 1.0 - tau
    fit = fit_power_law(t, 5.0 * tau ** (3 / 14), 1.0)
    assert abs(fit.exponent - 3 / 14) <= 1e-6
    assert abs(fit.coefficient - 5.0) <= 1e-5
    assert fit.residual >= 0.0
    assert t.min() <= fit.window[0] <= fit.window[1] <= t.max()


def test_fit_constant_series():
    tau = _synthetic_tau()
    fit = fit_power_law(1.0 - tau, np.full(tau.shape, 7.0), 1.0)
    assert abs(fit.exponent) <= 1e-9
    assert abs(fit.coefficient - 7.0) <= 1e-9


def test_fit_custom_window():
    tau = np.logspace(-9, -2, 300)
    fit = fit_power_law(1.0 - tau, 2.0 * tau ** -0.25, 1.0, window=(1e-8, 1e-3))
    assert abs(fit.exponent + 0.25) <= 1e-9


@settings(max_examples=50)
@given(st.floats(-1.0, 1.0), st.floats(0.1, 10.0), st.floats(0.01, 100.0))
def test_fit_recovers_any_power_law(p, eta, T):
    tau = T * np.logspace(-11.5, -8.5, 60)
    fit = fit_power_law(T - tau, eta * tau ** p, T)
    assert abs(fit.exponent - p) <= 1e-6
    assert abs(fit.coefficient / eta - 1.0) <= 1e-5


def test_fit_window_error():
    tau = np.logspace(-6, -2, 100)
    with pytest.raises(WindowError):
        fit_power_law(1.0 - tau, tau, 1.0)


def test_fit_rejects_bad_input():
    with pytest.raises(InvalidInputError):
        fit_power_law([0.0, 0.5], [1.0], 1.0)
    with pytest.raises(InvalidInputError):
        fit_power_law([0.0, 0.5], [1.0, -1.0], 1.0)


def test_heisenberg_exponents():
    est = estimate_blowup("heisenberg", "+", (1.0, 1.0, 1.0))
    fits = blowup_exponents(est.trajectory, est.T)
    assert abs(fits["A"].exponent + 1 / 14) <= 0.002
    assert abs(fits["B"].exponent - 3 / 14) <= 0.002


@pytest.mark.parametrize("geom,init", [("heisenberg", (1, 2, 3)), ("su2", (2, 1, 0.5)), ("e11", (4, 1, 1)),
                                       ("e2", (2, 1, 1)), ("sl2r", (1, 1, 0.5)), ("sl2r", (0.01, 1, 0.5))])
def test_exponent_sum(geom, init):
    est = estimate_blowup(geom, "+", init)
    fits = blowup_exponents(est.trajectory, est.T)
    assert abs(sum(f.exponent for f in fits.values()) - 5 / 14) <= 0.01


def test_su2_limits(su2_generic):
    a3b, bc = estimate_limits(su2_generic.trajectory, su2_generic.T, ("A3B", "B/C"))
    assert a3b.converged and math.isfinite(a3b.value) and a3b.value > 0
    assert bc.converged and bc.value >= 1.0


def test_su2_symmetric_ratio_is_one(su2_symmetric):
    (bc,) = estimate_limits(su2_symmetric.trajectory, su2_symmetric.T, ("B/C",))
    assert bc.converged and abs(bc.value - 1.0) <= 1e-9


def test_divergent_functional_not_converged(su2_generic):
    (ab3,) = estimate_limits(su2_generic.trajectory, su2_generic.T, ("AB3",))
    assert not ab3.converged
    assert ab3.value == ab3.last


def test_limits_errors(su2_generic):
    with pytest.raises(InvalidInputError):
        estimate_limits(su2_generic.trajectory, su2_generic.T, ("A^7",))
    traj = integrate("su2", "+", (1, 1, 1), 1.0)
    with pytest.raises(NotApplicableError):
        estimate_limits(traj, 2.0)


def test_extrapolate_limit_exact_on_linear_gauge():
    g = np.linspace(0.1, 0.01, 30)
    limit, slope = extrapolate_limit(g, 3.0 + 2.0 * g)
    assert abs(limit - 3.0) <= 1e-12 and abs(slope - 2.0) <= 1e-10


def test_infinite_time_limit():
    t = np.linspace(1, 1e4, 500)
    assert abs(infinite_time_limit(t, 1.5 + t ** (-1 / 3), t_min=10.0) - 1.5) <= 1e-10
    with pytest.raises(WindowError):
        infinite_time_limit(t, t, t_min=1e9)


@pytest.mark.parametrize("init", [(1.0, 2.0, 3.0), (2.0, 1.0, 1.0), (0.5, 4.0, 1.5)])
def test_subriemannian_heisenberg(init):
    est = estimate_blowup("heisenberg", "+", init)
    lim = subriemannian_limit("heisenberg", est.trajectory, est.T)
    assert lim.q1 == 0.0
    assert abs(lim.q2 * init[1] - 1.0) <= 0.01
    assert abs(lim.q3 * init[2] - 1.0) <= 0.01


def test_subriemannian_su2_symmetric(su2_symmetric):
    lim = subriemannian_limit("su2", su2_symmetric.trajectory, su2_symmetric.T)
    assert lim.q1 == 0.0
    assert abs(lim.q2 - 1.0) <= 0.01 and abs(lim.q3 - 1.0) <= 0.01


def test_subriemannian_su2_generic(su2_generic):
    lim = subriemannian_limit("su2", su2_generic.trajectory, su2_generic.T)
    assert lim.q1 == 0.0
    assert abs(lim.q2 - 1.0) <= 0.01
    assert lim.q3 >= lim.q2
    # the computed values support c >= b, not b > c
    assert lim.notes["q3_ge_q2"] and not lim.notes["q2_gt_q3"]


@pytest.mark.parametrize("geom,init", [("e11", (4, 1, 1)), ("e2", (2, 1, 1)), ("sl2r", (1, 1, 0.5)),
                                       ("sl2r", (0.01, 1, 0.5))])
def test_subriemannian_one_direction_drops(geom, init):
    est = estimate_blowup(geom, "+", init)
    lim = subriemannian_limit(geom, est.trajectory, est.T)
    q = lim.as_tuple()
    assert sum(v == 0.0 for v in q) == 1
    assert all(v > 0 for v in q if v != 0.0)


def test_subriemannian_not_applicable():
    traj = integrate("e2", "+", (3, 3, 1), 1.0)
    with pytest.raises(NotApplicableError):
        subriemannian_limit("e2", traj, 2.0)
    traj = integrate("su2", "+", (1, 1, 1), 1.0)
    with pytest.raises(NotApplicableError):
        subriemannian_limit("su2", traj, 2.0)
    traj = integrate("abelian", "+", (1, 2, 1), 1.0)
    with pytest.raises(NotApplicableError):
        subriemannian_limit("abelian", traj, 2.0)


def test_berger_growth():
    traj = integrate("su2", "+", (2.0, 2.0, 1.0), 1e4)
    assert traj.termination is Termination.TIME_REACHED
    ratio, c_inf = berger_growth_ratio(traj)
    assert 0.98 <= ratio <= 1.02
    assert 0 < c_inf < 2.0


@pytest.mark.parametrize("sign", ["+", "-"])
def test_e11_symmetric_square_law(sign):
    init = (2.0, 3.0, 2.0)
    t_end = 10.0 if sign == "+" else 0.9 * 9 / 64
    traj = integrate("e11", sign, init, t_end)
    s = 1.0 if sign == "+" else -1.0
    dev = np.abs(traj.metrics[:, 1] ** 2 - (9.0 + s * 64.0 * traj.t))
    assert np.max(dev) <= 1e-8 * 9.0
    assert np.allclose(traj.metrics, [e11_symmetric_exact(init, t, sign).as_tuple() for t in traj.t],
                       rtol=1e-8, atol=0)


def test_su2_round_square_law():
    traj = integrate("su2", "+", (1.5, 1.5, 1.5), 10.0)
    dev = np.abs(traj.metrics[:, 1] ** 2 - (1.5 ** 2 + 4.0 * traj.t))
    assert np.max(dev) <= 1e-8 * 1.5 ** 2
