"""Density, distribution and Laplace transform of the disc hitting time.

For planar Brownian motion started at distance |x| from the origin, the
hitting time of the disc of radius r has Laplace transform
K0(|x| sqrt(2 lam)) / K0(r sqrt(2 lam)). Collapsing the Bromwich integral onto
the negative real axis gives

    p(t) = (1/pi) int_0^inf e^{-t u} G(u) du,
    G(u) = Im[ K0(-i |x| sqrt(2u)) / K0(-i r sqrt(2u)) ],

and the survival function S(t) = (1/pi) int_0^inf e^{-t u} G(u) du / u.
G is positive for small u and oscillates in sign once (|x| - r) sqrt(2u)
exceeds about pi; the damping e^{-t u} keeps p(t) positive.

All integrals are computed in the variable rho = log(sqrt(t u)), so that very
large times are handled through log t without forming t or u explicitly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from enum import Enum

import numpy as np

from .errors import DomainError
from .quadrature import integrate
from .special_fns import (EULER_GAMMA, LN2, PI, Evaluation, Method, bessel_j0,
                          bessel_k0, bessel_k0_negreal, bessel_k0e)
from .w_ramanujan import lambda_w_from_log

# Below this value of x^2 u the jump G is replaced by its logarithmic limit;
# the neglected terms are O(x^2 u log u).
_SMALL_ARG = 1e-20
# e^{-t u} is treated as 1 below t u = _SMALL_DAMP.
_SMALL_DAMP = 1e-17
_DAMPING_CUT = 50.0
# Switch from termwise summation to closed Bessel forms in the surrogate.
SURROGATE_SERIES_MAX = 30.0


class CutoffPolicy(str, Enum):
    # u_max = 50 / t: the exponential weight is below e^{-50} beyond.
    DAMPING = "damping"
    # u_max = max(50 / t, 50 / r^2).
    CONSERVATIVE = "conservative"


@dataclass(frozen=True)
class HittingQuery:
    """Disc radius r, starting distance |x| > r and (optionally) time t > 0."""

    r: float
    x_radius: float
    t: float | None = None

    def __post_init__(self):
        if not (self.r > 0 and math.isfinite(self.r)):
            raise DomainError(f"disc radius must be positive, got {self.r}")
        if not (self.x_radius > self.r and math.isfinite(self.x_radius)):
            raise DomainError(
                f"start radius {self.x_radius} must exceed disc radius {self.r}")
        if self.t is not None and not (self.t > 0):
            raise DomainError(f"time must be positive, got {self.t}")

    def at(self, t):
        return replace(self, t=t)

    def _time(self):
        if self.t is None:
            raise DomainError("query has no time")
        return self.t


@dataclass(frozen=True)
class InversionConfig:
    abs_tol: float = 1e-15
    rel_tol: float = 1e-11
    max_subdivisions: int = 50000
    upper_cutoff_policy: CutoffPolicy = CutoffPolicy.CONSERVATIVE

    def __post_init__(self):
        if not (self.abs_tol > 0 and self.rel_tol > 0):
            raise ValueError("tolerances must be positive")
        if self.max_subdivisions < 1:
            raise ValueError("max_subdivisions must be >= 1")


DEFAULT_CONFIG = InversionConfig()


def laplace_transform(q, lam):
    """E_x[exp(-lam t_r)] = K0(|x| sqrt(2 lam)) / K0(r sqrt(2 lam))."""
    if not lam > 0:
        raise DomainError("lambda must be positive")
    a = q.x_radius * math.sqrt(2.0 * lam)
    b = q.r * math.sqrt(2.0 * lam)
    # Scaled functions keep the ratio finite when both K0 underflow.
    ratio = (bessel_k0e(a) / bessel_k0e(b)).real * math.exp(-(a - b))
    return float(ratio)


def cut_jump_from_log(log_u, x, r):
    """G(u) = Im K0(-i x sqrt(2u)) / K0(-i r sqrt(2u)) as a function of log u."""
    lu = np.atleast_1d(np.asarray(log_u, dtype=float))
    out = np.empty(lu.shape)
    small = lu < math.log(_SMALL_ARG) - 2.0 * math.log(max(x, 1.0))
    if small.any():
        # K0(-i a s) ~ -log(a s / 2) - gamma + i pi/2 as s -> 0.
        y = math.log(r) + 0.5 * lu[small] - 0.5 * LN2 + EULER_GAMMA
        out[small] = 0.5 * PI * math.log(x / r) / (y * y + 0.25 * PI * PI)
    big = ~small
    if big.any():
        u = np.exp(lu[big])
        num = bessel_k0_negreal(x * x * u, -1)
        den = bessel_k0_negreal(r * r * u, -1)
        mod2 = den.real ** 2 + den.imag ** 2
        if np.any(mod2 < 1e-300):
            raise ArithmeticError("branch-cut denominator vanished")
        out[big] = (num.imag * den.real - num.real * den.imag) / mod2
    return out


def _rho_breakpoints(rho0, rho1, log_t, x):
    """Unit steps while non-oscillatory, then one panel per pi of phase."""
    # phase(rho) = x sqrt(2 u) = x sqrt(2) e^{rho - log_t / 2}
    shift = math.log(x) + 0.5 * LN2 - 0.5 * log_t
    rho_osc = min(max(math.log(PI) - shift, rho0), rho1)
    pts = list(np.arange(rho0, rho_osc, 1.0)) + [rho_osc]
    phase_hi = math.exp(rho1 + shift)
    if phase_hi > PI:
        k = np.arange(2, int(phase_hi / PI) + 1)
        pts.extend(np.log(k * PI) - shift)
    pts.append(rho1)
    pts = np.unique(np.asarray(pts))
    return pts[(pts >= rho0) & (pts <= rho1)]


def _rho_limits(q, log_t, cfg):
    rho0 = min(0.5 * (math.log(_SMALL_ARG) + log_t
                      - 2.0 * math.log(max(q.x_radius, 1.0))),
               0.5 * math.log(_SMALL_DAMP))
    v_max = _DAMPING_CUT
    if cfg.upper_cutoff_policy == CutoffPolicy.CONSERVATIVE:
        # u_max = 50 / r^2 in v = t u, capped where e^{-v} underflows.
        log_v = min(math.log(_DAMPING_CUT) - 2.0 * math.log(q.r) + log_t,
                    math.log(700.0))
        v_max = max(v_max, math.exp(log_v))
    return rho0, 0.5 * math.log(v_max)


def _cut_integral(q, log_t, power, cfg):
    """int G(u) e^{-v} e^{2 power rho} d rho over the numeric range."""
    rho0, rho1 = _rho_limits(q, log_t, cfg)
    x, r = q.x_radius, q.r

    def f(rho):
        v = np.exp(2.0 * rho)
        g = cut_jump_from_log(2.0 * rho - log_t, x, r)
        w = np.exp(-v)
        if power:
            w = w * v
        return g * w

    pts = _rho_breakpoints(rho0, rho1, log_t, x)
    val, err = integrate(f, pts, epsabs=cfg.abs_tol, epsrel=cfg.rel_tol,
                         limit=cfg.max_subdivisions)
    tail = math.exp(-math.exp(2.0 * rho1))
    return val, err + tail, rho0


def density_times_t(q, log_t, cfg=DEFAULT_CONFIG):
    """t * p(t) at t = exp(log_t); usable far beyond the float range of t."""
    val, err, rho0 = _cut_integral(q, log_t, 1, cfg)
    # G is bounded by 2 log(x/r)/pi + 1 on the neglected piece below rho0.
    bound = math.exp(2.0 * rho0) * (math.log(q.x_radius / q.r) + 1.0)
    return 2.0 / PI * val, 2.0 / PI * (err + bound)


def survival_from_log(q, log_t, cfg=DEFAULT_CONFIG):
    """P_x[t_r > t] at t = exp(log_t)."""
    val, err, rho0 = _cut_integral(q, log_t, 0, cfg)
    # Analytic piece below rho0, where G is a Lorentzian in log u and e^{-v} = 1.
    y0 = math.log(q.r) + rho0 - 0.5 * log_t - 0.5 * LN2 + EULER_GAMMA
    tail = math.log(q.x_radius / q.r) * (math.atan(2.0 * y0 / PI) + 0.5 * PI)
    return 2.0 / PI * (val + tail), 2.0 / PI * err


def density_branchcut(q, cfg=DEFAULT_CONFIG):
    """Hitting-time density p_{r,x}(t) by branch-cut inversion."""
    t = q._time()
    val, err = density_times_t(q, math.log(t), cfg)
    return Evaluation(max(val, 0.0) / t, Method.BRANCH_CUT, err / t)


def survival(q, cfg=DEFAULT_CONFIG):
    t = q._time()
    val, err = survival_from_log(q, math.log(t), cfg)
    return Evaluation(min(max(val, 0.0), 1.0), Method.BRANCH_CUT, err)


def cdf(q, cfg=DEFAULT_CONFIG):
    """P_x[t_r <= t].

    Computed as one minus the survival integral; the two differ only by the
    total mass (1/pi) int G(u) du / u, which equals one.
    """
    s = survival(q, cfg)
    return Evaluation(min(max(1.0 - s.value, 0.0), 1.0), Method.BRANCH_CUT,
                      s.error_estimate)


def scaling_reduce(q):
    """Map (r, |x|, t) to (r/|x|, 1, t/x^2); the density scales by x^2."""
    x = q.x_radius
    t = None if q.t is None else q.t / (x * x)
    return HittingQuery(q.r / x, 1.0, t)


# ---------------------------------------------------------------------------
# Log-denominator surrogate q_x(t) and its large-xi representation


def reference_constant(r_ref):
    """c = -2 gamma + log(2 / r_ref^2)."""
    return -2.0 * EULER_GAMMA + math.log(2.0 / (r_ref * r_ref))


def _harmonic_bessel_sum(y):
    """sum_{k>=1} (-y)^k H_k / (k!)^2 for y >= 0; vectorised."""
    y = np.atleast_1d(np.asarray(y, dtype=float))
    out = np.zeros(y.shape)
    small = y <= SURROGATE_SERIES_MAX
    if small.any():
        ys = y[small]
        term = np.ones(ys.shape)
        harmonic = 0.0
        total = np.zeros(ys.shape)
        for k in range(1, 120):
            term = term * (-ys) / (k * k)
            harmonic += 1.0 / k
            total = total + term * harmonic
            if np.all(np.abs(term) * harmonic < 1e-17):
                break
        out[small] = total
    big = ~small
    if big.any():
        yb = y[big]
        k0 = bessel_k0(2j * np.sqrt(yb))
        out[big] = k0.real + (EULER_GAMMA + 0.5 * np.log(yb)) * bessel_j0(yb)
    return out


def q_x_surrogate(q, cfg=DEFAULT_CONFIG):
    """q_x(t): the inversion integral with K0(r sqrt(2z)) replaced by its
    logarithmic leading term, taken at the reference radius r_ref = q.r.
    """
    t = q._time()
    x, r = q.x_radius, q.r
    log_t = math.log(t)
    c = reference_constant(r)
    log_ratio = math.log(x / r)
    rho0, rho1 = _rho_limits(q, log_t, cfg)

    def f(rho):
        v = np.exp(2.0 * rho)
        log_u = 2.0 * rho - log_t
        lg = log_u - c
        weight = -2.0 / (lg * lg + PI * PI)
        log_y = 2.0 * math.log(x) + log_u - LN2
        y = np.exp(log_y)
        s1 = np.where(y < 1e-300, 1.0, bessel_j0(y))
        s2 = _harmonic_bessel_sum(y)
        return weight * (s2 - log_ratio * s1) * np.exp(-v) * v

    pts = _rho_breakpoints(rho0, rho1, log_t, x)
    val, err = integrate(f, pts, epsabs=cfg.abs_tol, epsrel=cfg.rel_tol,
                         limit=cfg.max_subdivisions)
    # q_x t = int [...] e^{-v} dv = 2 int [...] e^{-v} v d rho
    return Evaluation(2.0 * val / t, Method.CLOSED_FORM, 2.0 * err / t)


def _log_lorentz_tail(tau):
    """M(tau) = int_R exp(-tau e^v) dv / (v^2 + pi^2)."""
    v0 = math.log(_SMALL_DAMP / tau)
    v1 = math.log(_DAMPING_CUT / tau)

    def f(v):
        return np.exp(-tau * np.exp(v)) / (v * v + PI * PI)

    pts = np.unique(np.concatenate([np.linspace(v0, v1, 12), [0.0]]))
    pts = pts[(pts >= v0) & (pts <= v1)]
    val, err = integrate(f, pts, epsabs=1e-16, epsrel=1e-13)
    val += (math.atan(v0 / PI) + 0.5 * PI) / PI
    return val, err


def q_x_remark5(q, cfg=DEFAULT_CONFIG):
    """q_x(t) through the xi-representation, suited to xi = |x|/sqrt(t) large.

    With c the reference constant, t' = e^c t and f(y) = exp(-xi^2/2y)/y,

        q_x(t) = e^c [ int_1^inf f(y) e^{-(y-1) t'} dy
                       - int_0^1 f(y) W((1-y) t') dy ].

    The logarithmic singularity of W at y = 1 is removed by subtracting f(1),
    whose integral against W is (1 - M(t'))/t' in closed form.
    """
    t = q._time()
    c = reference_constant(q.r)
    tp = math.exp(c) * t
    half_xi2 = 0.5 * q.x_radius ** 2 / t

    # Everything is computed relative to f(1) = exp(-xi^2/2), which may
    # underflow long before the relative quantities do.
    def f(y):
        return np.exp(-half_xi2 * (1.0 / y - 1.0)) / y

    # First integral in s = (y - 1) t'.
    first, e1 = integrate(lambda s: f(1.0 + s / tp) * np.exp(-s),
                          [0.0, 1.0, 5.0, 15.0, 40.0], epsabs=1e-13,
                          epsrel=1e-12)
    first /= tp

    # Second integral: y in (0, 1 - d1] directly, delta = 1 - y in log scale.
    d1 = min(0.5, 1.0 / tp)

    def g_lin(y):
        lam_log = np.log((1.0 - y) * tp)
        return (f(y) - 1.0) * lambda_w_from_log(lam_log) / ((1.0 - y) * tp)

    pts = np.concatenate([[0.0], np.geomspace(1e-6, 1.0 - d1, 30)])
    if half_xi2 > 0:
        knee = 1.0 - np.array([0.03, 0.3, 1.0, 3.0, 30.0]) / half_xi2
        pts = np.unique(np.concatenate([pts, knee[(knee > 0) & (knee < 1 - d1)]]))
    # The pieces are O(1/t') and cancel down to O(1/(t' log t')); tolerances
    # sit just above the rounding floor of the pieces.
    second_a, e2 = integrate(g_lin, pts, epsabs=1e-13 / tp, epsrel=1e-11,
                             limit=cfg.max_subdivisions)

    def g_log(w):
        delta = np.exp(w)
        lam_log = w + math.log(tp)
        return (f(1.0 - delta) - 1.0) * lambda_w_from_log(lam_log)

    w_lo = math.log(d1) - 40.0
    # f(1 - delta) drops from 1 to 0 around delta = 1 / half_xi2.
    w_pts = np.linspace(w_lo, math.log(d1), 41)
    if half_xi2 > 0:
        knee = -math.log(half_xi2) + np.log([0.03, 0.3, 1.0, 3.0, 30.0])
        w_pts = np.unique(np.concatenate([w_pts, knee[(knee > w_lo)
                                                      & (knee < math.log(d1))]]))
    second_b, e3 = integrate(g_log, w_pts,
                             epsabs=1e-13, epsrel=1e-11,
                             limit=cfg.max_subdivisions)
    second_b /= tp

    m_val, e4 = _log_lorentz_tail(tp)
    singular = (1.0 - m_val) / tp

    scale = math.exp(c - half_xi2)
    value = scale * (first - second_a - second_b - singular)
    err = scale * (e1 / tp + e2 + e3 / tp + e4 / tp)
    return Evaluation(value, Method.CLOSED_FORM, err)
