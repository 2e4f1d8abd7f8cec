import math

import numpy as np
import pytest

from disc_hitting import asymptotics as asy
from disc_hitting import calibration
from disc_hitting.errors import DomainError
from disc_hitting.hitting_density import (CutoffPolicy, HittingQuery,
                                          InversionConfig, cdf,
                                          cut_jump_from_log, density_branchcut,
                                          density_times_t, laplace_transform,
                                          q_x_remark5, q_x_surrogate,
                                          reference_constant, scaling_reduce,
                                          survival, survival_from_log)
from disc_hitting.quadrature import integrate
from disc_hitting.special_fns import EULER_GAMMA, PI

# K0(2) / K0(1) and K0(1) / K0(1/2), 30-digit mpmath.
LT_X2_LAM1 = 0.270516061313329193003921823442
LT_X2_LAM_HALF = 0.455447590108208039378648469068


@pytest.mark.parametrize("x", [1.5, 2.0, 10.0])
def test_density_positive(x):
    q = HittingQuery(1.0, x)
    for t in np.geomspace(max((x - 1) ** 2 / 20, 0.05), 1e8, 25):
        assert density_branchcut(q.at(t)).value > 0


def test_cdf_monotone_with_limits():
    q = HittingQuery(1.0, 2.0)
    ts = np.geomspace(1e-2, 1e12, 30)
    c = np.array([cdf(q.at(t)).value for t in ts])
    assert np.all(np.diff(c) > 0)
    assert c[0] < 1e-6
    # Survival decays only like 2 log 2 / log t.
    assert 1 - c[-1] == pytest.approx(2 * math.log(2) / math.log(ts[-1]), rel=0.15)


def test_cdf_increment_matches_density_integral():
    q = HittingQuery(1.0, 2.0)

    def f(s):
        return np.array([density_times_t(q, v)[0] for v in s])

    inc, _ = integrate(f, [0.0, math.log(10.0)], epsabs=1e-12, epsrel=1e-11)
    diff = cdf(q.at(10.0)).value - cdf(q.at(1.0)).value
    assert diff == pytest.approx(inc, abs=1e-6)


def test_survival_complements_cdf():
    q = HittingQuery(1.0, 3.0, 50.0)
    assert survival(q).value + cdf(q).value == pytest.approx(1.0, abs=1e-14)


def test_laplace_transform_examples():
    q = HittingQuery(1.0, 2.0)
    assert laplace_transform(q, 0.5) == pytest.approx(LT_X2_LAM1, rel=1e-13)
    assert laplace_transform(HittingQuery(0.5, 1.0), 2.0) == pytest.approx(LT_X2_LAM1, rel=1e-13)
    assert laplace_transform(q, 0.125) == pytest.approx(LT_X2_LAM_HALF, rel=1e-13)
    # Large lambda: sqrt(r/|x|) e^{-(|x|-r) s} with s = sqrt(2 lambda).
    far = laplace_transform(q, 5e4)
    assert far == pytest.approx(math.exp(-316.22776601683796) / math.sqrt(2), rel=1e-3)
    with pytest.raises(DomainError):
        laplace_transform(q, 0.0)


def test_scaling_reduce():
    q = HittingQuery(0.25, 1.0, 3.0)
    assert scaling_reduce(q) == q
    # The inversion only sees x^2/t and r^2/t (it integrates in t u), so the
    # identity holds up to the rounding of those two ratios.
    big = HittingQuery(1.0, 3.0, 45.0)
    small = scaling_reduce(big)
    assert small.r == pytest.approx(1 / 3) and small.x_radius == 1.0 and small.t == 5.0
    assert cdf(small).value == pytest.approx(cdf(big).value, rel=1e-9)
    assert density_branchcut(small).value == pytest.approx(
        9 * density_branchcut(big).value, rel=1e-9)
    assert scaling_reduce(HittingQuery(1.0, 4.0)).t is None


def test_cut_jump_small_argument_limit():
    lu = np.array([-80.0, -60.0])
    g = cut_jump_from_log(lu, 2.0, 1.0)
    y = 0.5 * lu - 0.5 * math.log(2) + EULER_GAMMA
    expected = 0.5 * PI * math.log(2) / (y * y + PI * PI / 4)
    assert np.allclose(g, expected, rtol=1e-12)
    # Positive until (|x| - r) sqrt(2u) passes roughly pi, then oscillating.
    assert np.all(cut_jump_from_log(np.linspace(-30, 1.0, 200), 2.0, 1.0) > 0)
    assert np.any(cut_jump_from_log(np.linspace(1.0, 8.0, 200), 2.0, 1.0) < 0)


def test_large_time_via_log():
    # t = e^1000: t p(t) is within a few percent of 2 log|x| / log^2 t.
    val, err = density_times_t(HittingQuery(1.0, 2.0), 1000.0)
    lead = 2 * math.log(2) / 1000.0 ** 2
    assert val == pytest.approx(lead, rel=0.02)
    assert err < 1e-3 * val
    s, _ = survival_from_log(HittingQuery(1.0, 2.0), 1000.0)
    assert s == pytest.approx(2 * math.log(2) / 1000.0, rel=0.02)


def test_surrogate_leading_term_vanishes_on_the_circle():
    # Only the 2 log(|x|/r) W term drops out at |x| = r; what is left is
    # O(1/t^2), far below the leading density at |x| = 2.
    prev = None
    for t in (1e2, 1e3, 1e4):
        v = q_x_surrogate(HittingQuery(1.0, 1.0 + 1e-12, t)).value
        assert 0 < v < 1e-2 * asy.thm1_density(2.0, t)
        assert v * t * t < 0.05
        if prev is not None:
            assert v * t * t < prev
        prev = v * t * t


def test_surrogate_tracks_density():
    q = HittingQuery(1.0, 10.0, 1e6)
    p = density_branchcut(q).value
    assert q_x_surrogate(q).value == pytest.approx(p, rel=1e-5)
    q = HittingQuery(1.0, 2.0, 1e3)
    assert q_x_surrogate(q).value == pytest.approx(density_branchcut(q).value, rel=0.1)


def test_surrogate_gap_regression():
    K = calibration.load()["surrogate_gap"]
    for t in (1e2, 1e4, 1e6):
        q = HittingQuery(1.0, 10.0, t)
        gap = abs(q_x_surrogate(q).value - density_branchcut(q).value)
        assert gap <= K * math.log(t) / t ** 2


@pytest.mark.parametrize("x,t", [(10.0, 1e6), (30.0, 1e3), (100.0, 1e3)])
def test_large_xi_representation_matches_surrogate(x, t):
    q = HittingQuery(1.0, x, t)
    a = q_x_remark5(q).value
    b = q_x_surrogate(q).value
    assert a == pytest.approx(b, rel=1e-8)


def test_large_xi_representation_underflow_regime():
    # xi^2/2 = 250: e^{-xi^2/2} is about 1e-109 but the value stays finite
    # and within a factor of a few of e^{-xi^2/2} / (t log t).
    x, t = 1000.0, 2000.0
    v = q_x_remark5(HittingQuery(1.0, x, t)).value
    scale = math.exp(-x * x / (2 * t)) / (t * math.log(t))
    assert 0 < v / scale < 5


def test_reference_constant():
    r0 = math.sqrt(2) * math.exp(-EULER_GAMMA)
    assert reference_constant(r0) == pytest.approx(0.0, abs=1e-15)
    assert reference_constant(1.0) == pytest.approx(math.log(2) - 2 * EULER_GAMMA, rel=1e-15)


@pytest.mark.parametrize("r,x,t", [(0.0, 1.0, 1.0), (1.0, 1.0, 1.0), (1.0, 0.5, 1.0),
                                   (1.0, 2.0, 0.0), (1.0, 2.0, -1.0),
                                   (float("inf"), 2.0, 1.0)])
def test_query_domain(r, x, t):
    with pytest.raises(DomainError):
        HittingQuery(r, x, t)


def test_missing_time():
    with pytest.raises(DomainError):
        density_branchcut(HittingQuery(1.0, 2.0))


def test_cutoff_policies_agree_for_unit_disc():
    q = HittingQuery(1.0, 2.0, 5.0)
    a = density_branchcut(q, InversionConfig(upper_cutoff_policy=CutoffPolicy.DAMPING))
    b = density_branchcut(q, InversionConfig(upper_cutoff_policy=CutoffPolicy.CONSERVATIVE))
    assert a.value == pytest.approx(b.value, rel=1e-10)


def test_small_disc_needs_conservative_cutoff():
    # For r << |x| the oscillation scale of G is set by r, not t.
    q = HittingQuery(0.01, 1.0, 0.02)
    ref = density_branchcut(q).value
    big = density_branchcut(HittingQuery(1.0, 100.0, 200.0)).value
    assert ref == pytest.approx(1e4 * big, rel=1e-8)


def test_config_validation():
    with pytest.raises(ValueError):
        InversionConfig(abs_tol=0.0)
    with pytest.raises(ValueError):
        InversionConfig(max_subdivisions=0)


@pytest.mark.parametrize("t", [0.5, 1.0, 3.0])
def test_imaginary_axis_inversion(t):
    # Independent path: the Bromwich integral on the imaginary axis with
    # scipy's K0. Causality gives p(t) = (2/pi) int Re L(i w) cos(w t) dw.
    from scipy import integrate as si
    from scipy import special as sp

    def re_transform(w):
        if w == 0:
            return 1.0
        s = np.sqrt(2j * w)
        return (sp.kve(0, 2.0 * s) / sp.kve(0, s) * np.exp(-s)).real

    val, _ = si.quad(re_transform, 0, np.inf, weight="cos", wvar=t, limlst=200)
    p = density_branchcut(HittingQuery(1.0, 2.0, t)).value
    assert 2 * val / PI == pytest.approx(p, rel=1e-8)
