"""Large-time asymptotic formulas for the disc hitting time.

All formulas are stated for a fixed reference radius ``r_ref`` through the
constant c = -2 gamma + log(2 / r_ref^2). Each approximation has a matching
``*_envelope`` function giving the order of magnitude of its error term with
the unknown constant set to one; the empirical constants live in
``disc_hitting/data/envelope_constants.json`` (see :mod:`calibration`).
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError
from .quadrature import integrate
from .special_fns import EULER_GAMMA, PI, exp_integral_e1, recip_gamma_series
from .w_ramanujan import lambda_w_from_log

PHI_ZERO = PI * PI / 6.0


@dataclass(frozen=True)
class Constants:
    """Reference radius and the derived centring constant c_ref."""

    r_ref: float = 1.0
    gamma_euler: float = EULER_GAMMA
    c_ref: float = field(init=False)

    def __post_init__(self):
        if not (self.r_ref > 0 and math.isfinite(self.r_ref)):
            raise DomainError(f"r_ref must be positive, got {self.r_ref}")
        c = -2.0 * self.gamma_euler + math.log(2.0 / self.r_ref ** 2)
        object.__setattr__(self, "c_ref", c)


DEFAULT_CONSTANTS = Constants()


@dataclass(frozen=True)
class Xi:
    """Similarity variable xi = |x| / sqrt(t)."""

    value: float

    @classmethod
    def of(cls, x_radius, t):
        return cls(x_radius / math.sqrt(t))

    @property
    def alpha(self):
        """xi^2 / 2, the argument of E1 and phi."""
        return 0.5 * self.value ** 2


def _check(x_radius, t, k):
    if not x_radius > k.r_ref:
        raise DomainError(f"|x| = {x_radius} must exceed r_ref = {k.r_ref}")
    if not t > 1.0:
        raise DomainError(f"asymptotic formulas need t > 1, got {t}")


def _lg_plus(v):
    return max(math.log(v), 0.0) if v > 0 else 0.0


def phi(alpha):
    """phi(alpha) = -int_1^inf e^{-alpha y} log(1 - 1/y) dy / y.

    With w = 1/y the integral becomes -int_0^1 e^{-alpha/w} log(1-w) dw / w.
    On [1/2, 1) the substitution 1 - w = e^{-v} turns the logarithmic endpoint
    singularity into the smooth, exponentially decaying factor v e^{-v}.
    """
    if alpha < 0 or math.isnan(alpha):
        raise DomainError(f"phi needs alpha >= 0, got {alpha}")
    if alpha == 0:
        return PHI_ZERO

    def inner(w):
        return -np.exp(-alpha / w) * np.log1p(-w) / w

    def outer(v):
        w = -np.expm1(-v)
        return v * np.exp(-v - alpha / w) / w

    # Both pieces are bounded by e^{-alpha}; scale the absolute tolerance.
    eps = 1e-16 * math.exp(-min(alpha, 700.0))
    brk = [0.0, 0.05, 0.15, 0.3, 0.5]
    a, _ = integrate(inner, brk, epsabs=eps, epsrel=1e-13)
    b, _ = integrate(outer, math.log(2.0) + np.array([0.0, 1.0, 3.0, 8.0, 20.0, 50.0]),
                     epsabs=eps, epsrel=1e-13)
    return a + b


def thm1_density(x_radius, t, k=DEFAULT_CONSTANTS):
    """Leading term 2 log(|x|/r_ref) e^c W(e^c t) of the density."""
    _check(x_radius, t, k)
    # e^c W(e^c t) = (lambda W(lambda)) / t with lambda = e^c t.
    lam_w = lambda_w_from_log(k.c_ref + math.log(t))
    return 2.0 * math.log(x_radius / k.r_ref) * lam_w / t


def thm1_envelope(x_radius, t):
    """(1 + log+|x|) / (t log^2 t) * min(x^2, t) / t."""
    lt = math.log(t)
    return (1.0 + _lg_plus(x_radius)) / (t * lt * lt) * min(x_radius ** 2, t) / t


def thm2_density(x_radius, t, k=DEFAULT_CONSTANTS):
    """Gaussian-corrected density approximation, sharp when x^2 / t is bounded.

    log(e^c x^2 / 2) e^{-x^2/2t} / (t log^2(e^c t)), plus the term
    2 gamma log+(t / x^2) / (t log^3 t) which is present only for x^2 < t.
    """
    _check(x_radius, t, k)
    x2 = x_radius * x_radius
    lc = k.c_ref + math.log(t)
    lead = (k.c_ref + math.log(0.5 * x2)) * math.exp(-0.5 * x2 / t) / (t * lc * lc)
    if x2 < t:
        lt = math.log(t)
        lead += 2.0 * k.gamma_euler * _lg_plus(t / x2) / (t * lt ** 3)
    return lead


def thm2_envelope(x_radius, t):
    """1/(t log^3 t) for x^2 < t; (1 + log^2(x^2/t)) / (x^2 log^3 t) otherwise."""
    x2 = x_radius * x_radius
    lt3 = math.log(t) ** 3
    if x2 < t:
        return 1.0 / (t * lt3)
    return (1.0 + math.log(x2 / t) ** 2) / (x2 * lt3)


def _cdf_pieces(x_radius, t, k):
    alpha = Xi.of(x_radius, t).alpha
    lc = k.c_ref + math.log(t)
    return alpha, lc, exp_integral_e1(alpha), phi(alpha)


def thm3_cdf_raw(x_radius, t, k=DEFAULT_CONSTANTS):
    """A_x(t) without clamping; this is the function A'(t) differentiates."""
    _check(x_radius, t, k)
    _, lc, e1, ph = _cdf_pieces(x_radius, t, k)
    return (1.0 - k.gamma_euler / lc) * e1 / lc + ph / (lc * lc)


def thm3_cdf(x_radius, t, k=DEFAULT_CONSTANTS):
    """A_x(t), the asymptotic form of P_x[hit by time t], clamped to [0, 1]."""
    return min(max(thm3_cdf_raw(x_radius, t, k), 0.0), 1.0)


def thm3_envelope(x_radius, t):
    """|log(xi/2)| / log^3 t for x^2 < t; log^2(2 xi) / (xi^2 log^3 t) otherwise."""
    xi = Xi.of(x_radius, t).value
    lt3 = math.log(t) ** 3
    if xi < 1.0:
        return abs(math.log(0.5 * xi)) / lt3
    return math.log(2.0 * xi) ** 2 / (xi * xi * lt3)


def thm3_cdf_derivative(x_radius, t, k=DEFAULT_CONSTANTS):
    """d/dt A_x(t) in closed form (three terms)."""
    _check(x_radius, t, k)
    alpha, lc, e1, ph = _cdf_pieces(x_radius, t, k)
    x2 = x_radius * x_radius
    first = (k.c_ref + math.log(0.5 * x2)) * math.exp(-alpha) / (t * lc * lc)
    return first + 2.0 * (k.gamma_euler * e1 - ph) / (t * lc ** 3)


def remark4_coefficients(n_terms):
    """Bracket coefficients d_1..d_n of the small-xi survival expansion.

    Integrating lambda W(lambda) ~ sum c_n (log lambda)^{-n-1} against
    d(lambda)/lambda from e^c t to infinity turns c_n into c_n / n, so
    d = (1, -gamma, gamma^2 - pi^2/6, ...).
    """
    if not 1 <= n_terms <= 30:
        raise ValueError("n_terms must lie in 1..30")
    c = recip_gamma_series(max(n_terms, 1))
    return [c[n] / n for n in range(1, n_terms + 1)]


def remark4_tail(x_radius, t, k=DEFAULT_CONSTANTS, n_terms=3):
    """P_x[hit after t] ~ (2 log(|x|/r_ref) / L) sum_n d_n L^{1-n}, L = log(e^c t).

    Valid for x^2 < t; a RuntimeWarning is issued otherwise.
    """
    _check(x_radius, t, k)
    if x_radius ** 2 >= t:
        warnings.warn("remark4_tail is meant for x^2 < t", RuntimeWarning,
                      stacklevel=2)
    lc = k.c_ref + math.log(t)
    bracket = sum(d / lc ** n for n, d in enumerate(remark4_coefficients(n_terms)))
    return 2.0 * math.log(x_radius / k.r_ref) / lc * bracket


def remark4_envelope(x_radius, t):
    """xi^2 log|x| / log^2 t."""
    xi2 = x_radius ** 2 / t
    return xi2 * abs(math.log(x_radius)) / math.log(t) ** 2
