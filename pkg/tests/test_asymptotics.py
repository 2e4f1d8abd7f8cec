import math
import warnings

import numpy as np
import pytest

from disc_hitting import asymptotics as asy
from disc_hitting import calibration
from disc_hitting.brownian_mc import McConfig, simulate_survival
from disc_hitting.errors import DomainError
from disc_hitting.hitting_density import HittingQuery, cdf, density_branchcut
from disc_hitting.special_fns import EULER_GAMMA, PI
from disc_hitting.w_ramanujan import w_quadrature

ENV = calibration.load()
K = asy.DEFAULT_CONSTANTS


@pytest.mark.parametrize("r_ref", [1.0, 0.3, 7.5, math.sqrt(2) * math.exp(-EULER_GAMMA)])
def test_constants_invariant(r_ref):
    k = asy.Constants(r_ref)
    assert 0.5 * r_ref ** 2 == pytest.approx(math.exp(-(k.c_ref + 2 * EULER_GAMMA)),
                                             rel=1e-15)


def test_default_constants():
    assert K.r_ref == 1.0
    assert K.c_ref == pytest.approx(-0.46128414924312044, abs=1e-15)
    with pytest.raises(DomainError):
        asy.Constants(0.0)


def test_xi():
    xi = asy.Xi.of(30.0, 900.0)
    assert xi.value == 1.0
    assert xi.alpha == 0.5


def test_phi_bounded_and_decreasing():
    alphas = np.geomspace(1e-6, 30.0, 40)
    vals = np.array([asy.phi(a) for a in alphas])
    assert np.all(vals > 0)
    assert np.all(vals <= PI ** 2 / 6)
    assert np.all(np.diff(vals) < 0)
    assert asy.phi(0.0) == PI ** 2 / 6
    with pytest.raises(DomainError):
        asy.phi(-1.0)


def test_phi_small_alpha_expansion():
    # phi(a) = pi^2/6 + a log a + (gamma - 2) a + o(a).
    for a, tol in ((1e-2, 2e-2), (1e-4, 1e-3), (1e-6, 1e-5)):
        rest = (asy.phi(a) - PI ** 2 / 6 - a * math.log(a)) / a
        assert rest == pytest.approx(EULER_GAMMA - 2, abs=tol)


def test_phi_large_alpha_regression():
    for a in (8.0, 20.0, 35.0):
        assert asy.phi(a) <= ENV["phi_large"] * math.exp(-a) * math.log(a) / a


def test_thm1_on_the_circle():
    with pytest.raises(DomainError):
        asy.thm1_density(1.0, 1e4)
    # Just outside, the leading term goes to zero with log |x|.
    assert asy.thm1_density(1.0 + 1e-12, 1e4) < 1e-17


def test_thm1_example_at_large_time():
    t = 1e8
    lam = math.exp(K.c_ref) * t
    expected = 2 * math.log(10.0) * math.exp(K.c_ref) * w_quadrature(lam).value
    assert asy.thm1_density(10.0, t) == pytest.approx(expected, rel=1e-12)
    lead = 2 * math.log(10.0) / (t * math.log(lam) ** 2)
    assert asy.thm1_density(10.0, t) == pytest.approx(lead, rel=0.1)


def test_thm1_within_envelope():
    for x in (2.0, 10.0):
        for t in (1e4, 1e6):
            p = density_branchcut(HittingQuery(1.0, x, t)).value
            assert abs(asy.thm1_density(x, t) - p) <= ENV["thm1"] * asy.thm1_envelope(x, t)


def test_thm2_zero_prefactor():
    x = math.sqrt(2 * math.exp(-K.c_ref))
    # Rounding in x^2 is amplified by 1 / log^2(e^c t) with log(e^c t) ~ -0.06.
    assert asy.thm2_density(x, 1.5) == pytest.approx(0.0, abs=1e-13)


def test_thm2_at_xi_one():
    t = 1e6
    lc = K.c_ref + math.log(t)
    lead = (K.c_ref + math.log(0.5 * t)) * math.exp(-0.5) / (t * lc * lc)
    assert asy.thm2_density(math.sqrt(t), t) == pytest.approx(lead, rel=1e-14)
    assert asy.thm3_cdf_derivative(math.sqrt(t), t) == pytest.approx(
        lead + 2 * (EULER_GAMMA * asy.exp_integral_e1(0.5) - asy.phi(0.5)) / (t * lc ** 3),
        rel=1e-14)


def test_thm2_correction_continuous_at_switch():
    t = 1e6
    below = asy.thm2_density(math.sqrt(t) * (1 - 1e-9), t)
    above = asy.thm2_density(math.sqrt(t) * (1 + 1e-9), t)
    assert below == pytest.approx(above, rel=1e-7)


def test_thm2_within_envelope():
    for x in (2.0, 10.0, 50.0):
        for t in (1e4, 1e6):
            p = density_branchcut(HittingQuery(1.0, x, t)).value
            assert abs(asy.thm2_density(x, t) - p) <= ENV["thm2"] * asy.thm2_envelope(x, t)


def test_regime_agreement():
    for x in (1.5, 3.0):
        for t in (1e5, 1e7):
            assert x * x <= t / math.log(t) ** 2
            a, b = asy.thm1_density(x, t), asy.thm2_density(x, t)
            assert abs(a - b) / b <= ENV["remark2"] / math.log(t)


@pytest.mark.parametrize("x,t", [(50.0, 1e4), (2.0, 1e3), (10.0, 1e6), (300.0, 1e5),
                                 (1e3, 1e4)])
def test_derivative_matches_finite_difference(x, t):
    h = 1e-4 * t
    fd = (asy.thm3_cdf_raw(x, t + h) - asy.thm3_cdf_raw(x, t - h)) / (2 * h)
    exact = asy.thm3_cdf_derivative(x, t)
    assert abs(exact - fd) <= 1e-5 * abs(exact)


def test_derivative_principal_part():
    # For x^2 < t, A'(t) = 2 log|x| (1/L^2 - 2 gamma/L^3) / t + O(1/(t log^3 t)).
    for x, t in ((2.0, 1e4), (10.0, 1e6), (3.0, 1e10)):
        L = K.c_ref + math.log(t)
        b = 2 * math.log(x) * (1 / L ** 2 - 2 * EULER_GAMMA / L ** 3) / t
        assert abs(asy.thm3_cdf_derivative(x, t) - b) * t * math.log(t) ** 3 < 4.0


def test_thm3_limits():
    assert asy.thm3_cdf(1e4, 10.0) == 0.0
    assert 0 < asy.thm3_cdf(30.0, 300.0) < 1
    for x, t in ((2.0, 1e2), (1.01, 1e12), (100.0, 1.5)):
        assert 0.0 <= asy.thm3_cdf(x, t) <= 1.0


def test_thm3_small_xi_reduction():
    # 1 - A = (2 log|x| / L)(1 - gamma/L) - (pi^2/6 - gamma^2)/L^2 + ...
    x, t = 3.0, 1e12
    L = K.c_ref + math.log(t)
    approx = (1 - 2 * math.log(x) / L * (1 - EULER_GAMMA / L)
              + (PI ** 2 / 6 - EULER_GAMMA ** 2) / L ** 2)
    assert asy.thm3_cdf(x, t) == pytest.approx(approx, abs=5.0 / L ** 3)


def test_thm3_within_envelope():
    for x in (2.0, 30.0):
        for t in (1e3, 1e5):
            c = cdf(HittingQuery(1.0, x, t)).value
            assert abs(asy.thm3_cdf(x, t) - c) <= ENV["thm3"] * asy.thm3_envelope(x, t)


def test_thm3_against_monte_carlo():
    x, t = 30.0, 300.0
    curve = simulate_survival(HittingQuery(1.0, x), McConfig(20_000, 3, t, (t,)))
    mc = 1.0 - curve.survival[0]
    assert abs(asy.thm3_cdf(x, t) - mc) <= 3 * curve.std_err[0]
    assert abs(cdf(HittingQuery(1.0, x, t)).value - mc) <= 3 * curve.std_err[0]


def test_remark4_coefficients():
    d = asy.remark4_coefficients(4)
    assert d[0] == 1.0
    assert d[1] == pytest.approx(-EULER_GAMMA, rel=1e-15)
    assert d[2] == pytest.approx(EULER_GAMMA ** 2 - PI ** 2 / 6, rel=1e-14)
    with pytest.raises(ValueError):
        asy.remark4_coefficients(0)


def test_remark4_tail_zero_prefactor_and_warning():
    assert asy.remark4_tail(1.0 + 1e-15, 1e6) == pytest.approx(0.0, abs=1e-14)
    with pytest.warns(RuntimeWarning):
        asy.remark4_tail(100.0, 1e3)


def test_remark4_consistent_with_thm3():
    for x, t in ((2.0, 1e8), (5.0, 1e12)):
        assert (x / math.sqrt(t)) ** 2 <= 1 / math.log(t) ** 2
        with warnings.catch_warnings():
            warnings.simplefilter("error")
            tail = asy.remark4_tail(x, t)
        xi = x / math.sqrt(t)
        bound = 4.0 * abs(math.log(xi / 2)) / math.log(t) ** 3
        assert abs(1 - tail - asy.thm3_cdf(x, t)) <= bound


def test_remark4_matches_inversion():
    s = 1 - cdf(HittingQuery(1.0, 10.0, 1e8)).value
    assert asy.remark4_tail(10.0, 1e8, n_terms=3) == pytest.approx(s, rel=0.05)


@pytest.mark.parametrize("fn", [asy.thm1_density, asy.thm2_density, asy.thm3_cdf,
                                asy.thm3_cdf_derivative, asy.remark4_tail])
def test_preconditions(fn):
    with pytest.raises(DomainError):
        fn(0.5, 100.0)
    with pytest.raises(DomainError):
        fn(2.0, 1.0)
