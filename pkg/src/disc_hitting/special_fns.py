"""Special functions: K0, K1, J0, E1 and the reciprocal-Gamma coefficients.

K0/K1 accept complex arguments on the principal branch -pi < arg z < pi and
are vectorised over numpy arrays. Three regimes are used:

* ``|z| <= 3``: ascending series with incrementally accumulated harmonic
  numbers;
* ``3 < |z| <= 20``: Temme's continued fraction (Steed's algorithm), or the
  analytic continuation ``K0(z) = K0(-z) -+ i pi I0(z)`` deep in the left
  half-plane where the continued fraction overflows;
* ``|z| > 20``: the Hankel asymptotic expansion, truncated at the smallest
  term.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction

import numpy as np

from .errors import DomainError, PrecisionError
from .quadrature import integrate

EULER_GAMMA = 0.57721566490153286060651209
PI = 3.14159265358979323846264338
LN2 = 0.69314718055994530941723212

SERIES_RADIUS = 3.0
ASYMPTOTIC_RADIUS = 20.0
_SERIES_REL = 1e-18
_SERIES_CAP = 200

# zeta(k) - 1, k = 2..31, to 22 significant digits. Storing the excess over
# one keeps the absolute precision of the large-k entries, which the
# reciprocal-Gamma recurrence needs.
ZETA_MINUS_ONE = {
    2: "6.449340668482264364724e-1", 3: "2.020569031595942853997e-1",
    4: "8.2323233711138191516e-2", 5: "3.692775514336992633137e-2",
    6: "1.734306198444913971452e-2", 7: "8.349277381922826839798e-3",
    8: "4.077356197944339378685e-3", 9: "2.008392826082214417853e-3",
    10: "9.94575127818085337146e-4", 11: "4.941886041194645587023e-4",
    12: "2.46086553308048298638e-4", 13: "1.227133475784891467518e-4",
    14: "6.124813505870482925855e-5", 15: "3.058823630702049355173e-5",
    16: "1.528225940865187173257e-5", 17: "7.6371976378997622736e-6",
    18: "3.817293264999839856462e-6", 19: "1.908212716553938925657e-6",
    20: "9.53962033872796113152e-7", 21: "4.769329867878064631167e-7",
    22: "2.384505027277329900036e-7", 23: "1.192199259653110730678e-7",
    24: "5.960818905125947961244e-8", 25: "2.980350351465228018606e-8",
    26: "1.490155482836504123466e-8", 27: "7.450711789835429491981e-9",
    28: "3.725334024788457054819e-9", 29: "1.862659723513049006404e-9",
    30: "9.313274324196681828718e-10", 31: "4.656629065033784072989e-10",
}
ZETA = {k: 1.0 + float(v) for k, v in ZETA_MINUS_ONE.items()}
_EULER_GAMMA_DIGITS = "0.577215664901532860606512090082"


class Method(str, Enum):
    SERIES = "series"
    CONTINUED_FRACTION = "continued_fraction"
    ASYMPTOTIC = "asymptotic"
    QUADRATURE = "quadrature"
    FOURIER_SINE = "fourier_sine"
    FOURIER_COSINE = "fourier_cosine"
    BRANCH_CUT = "branch_cut"
    CLOSED_FORM = "closed_form"


@dataclass(frozen=True)
class Evaluation:
    """A numeric result with the method that produced it and an error bound."""

    value: float | complex
    method: Method
    error_estimate: float

    def __post_init__(self):
        if not self.error_estimate >= 0:
            raise ValueError("error_estimate must be non-negative")

    def __float__(self):
        return float(self.value)


def _check_branch(z):
    if np.any(z == 0):
        raise DomainError("K0/K1 are singular at z = 0")
    on_cut = (z.real < 0) & (z.imag == 0)
    # -0.0 imaginary parts are tolerated only through bessel_k0_negreal.
    if np.any(on_cut):
        raise DomainError(
            "argument on the negative real axis; use bessel_k0_negreal for the "
            "+0i / -0i boundary values"
        )


def _series_k01(z):
    """Ascending series for K0(z) and F(z) = z K1(z), |z| small."""
    q = 0.25 * z * z
    log_half = np.log(0.5 * z) + EULER_GAMMA
    term = np.ones_like(z)            # q^k / (k!)^2
    harmonic = np.zeros(z.shape)      # H_k
    k0 = -log_half * term
    # F(z) = 1 + 2q log(z/2) I1~ - q sum (psi(k+1)+psi(k+2)) q^k/(k!(k+1)!)
    f_log = np.zeros_like(z)
    f_psi = np.zeros_like(z)
    for k in range(_SERIES_CAP):
        if k > 0:
            term = term * q / (k * k)
            harmonic = harmonic + 1.0 / k
            k0 = k0 + term * (harmonic - log_half)
        tk1 = term / (k + 1)           # q^k / (k! (k+1)!)
        f_log = f_log + tk1
        f_psi = f_psi + tk1 * (2 * harmonic + 1.0 / (k + 1) - 2 * EULER_GAMMA)
        if np.all(np.abs(term) <= _SERIES_REL * np.abs(k0)):
            break
    f = 1.0 + 2.0 * q * np.log(0.5 * z) * f_log - q * f_psi
    return k0, f


def _series_i0(z):
    q = 0.25 * z * z
    term = np.ones_like(z)
    total = np.ones_like(z)
    for k in range(1, _SERIES_CAP):
        term = term * q / (k * k)
        total = total + term
        if np.all(np.abs(term) <= _SERIES_REL * np.abs(total)):
            break
    return total


def _steed_k01(z):
    """Temme's CF2 for K0 and K1 (Re z >= 0 or moderately beyond, |z| > 3)."""
    b = 2.0 * (1.0 + z)
    d = 1.0 / b
    h = d.copy()
    delh = d.copy()
    q1 = np.zeros_like(z)
    q2 = np.ones_like(z)
    a1 = 0.25
    q = np.full_like(z, a1)
    c = a1
    a = -a1
    s = 1.0 + q * delh
    for i in range(1, 400):
        a -= 2 * i
        c = -a * c / (i + 1.0)
        qnew = (q1 - b * q2) / a
        q1, q2 = q2, qnew
        q = q + c * qnew
        b = b + 2.0
        d = 1.0 / (b + a * d)
        delh = (b * d - 1.0) * delh
        h = h + delh
        dels = q * delh
        s = s + dels
        if np.all(np.abs(dels) < 1e-17 * np.abs(s)):
            break
    h = a1 * h
    k0_scaled = np.sqrt(PI / (2.0 * z)) / s
    k1_scaled = k0_scaled * (z + 0.5 - h) / z
    return k0_scaled, k1_scaled


def _asymptotic_scaled(z, nu):
    """e^z K_nu(z) from the Hankel expansion, truncated at the smallest term."""
    mu = 4.0 * nu * nu
    term = np.ones_like(z)
    total = np.ones_like(z)
    prev = np.full(z.shape, np.inf)
    active = np.ones(z.shape, dtype=bool)
    for k in range(1, 60):
        term = term * (mu - (2 * k - 1) ** 2) / (k * 8.0 * z)
        mag = np.abs(term)
        active &= (mag < prev) & (mag > 1e-18 * np.abs(total))
        if not active.any():
            break
        total = np.where(active, total + term, total)
        prev = mag
    return np.sqrt(PI / (2.0 * z)) * total


def _k01_scaled(z):
    """e^z K0(z) and e^z K1(z) for |z| > SERIES_RADIUS."""
    k0 = np.empty_like(z)
    k1 = np.empty_like(z)
    mag = np.abs(z)
    arg = np.abs(np.angle(z))
    asym = mag > ASYMPTOTIC_RADIUS
    steed = ~asym & ((arg <= 0.5 * PI) | ((arg <= 0.7 * PI) & (mag >= 6.0)))
    refl = ~asym & ~steed
    if asym.any():
        k0[asym] = _asymptotic_scaled(z[asym], 0)
        k1[asym] = _asymptotic_scaled(z[asym], 1)
    if steed.any():
        k0[steed], k1[steed] = _steed_k01(z[steed])
    if refl.any():
        # K_nu(z) = K_nu(-z) -+ i pi I_nu(z) style continuation across Re z = 0.
        zr = z[refl]
        w = -zr
        sign = np.where(zr.imag >= 0, -1.0, 1.0)
        kw0, kw1 = _steed_k01(w)
        i0 = _series_i0(zr)
        i1 = _series_i1(zr)
        ez = np.exp(zr)
        k0[refl] = ez * (np.exp(-w) * kw0 + sign * 1j * PI * i0)
        # K1(z e^{+-i pi}) = -K1(z) -+ i pi I1(z), with I1 odd.
        k1[refl] = ez * (-np.exp(-w) * kw1 - sign * 1j * PI * i1)
    return k0, k1


def _series_i1(z):
    q = 0.25 * z * z
    term = 0.5 * z
    total = term.copy()
    for k in range(1, _SERIES_CAP):
        term = term * q / (k * (k + 1))
        total = total + term
        if np.all(np.abs(term) <= _SERIES_REL * np.abs(total)):
            break
    return total


def _as_complex(z):
    arr = np.asarray(z, dtype=complex)
    return np.atleast_1d(arr), arr.ndim == 0


def _unwrap(values, scalar):
    return complex(values[0]) if scalar else values


def _k01(z, scaled=False):
    k0 = np.empty_like(z)
    f = np.empty_like(z)
    small = np.abs(z) <= SERIES_RADIUS
    if small.any():
        zs = z[small]
        k0s, fs = _series_k01(zs)
        if scaled:
            ez = np.exp(zs)
            k0s, fs = k0s * ez, fs * ez
        k0[small], f[small] = k0s, fs
    big = ~small
    if big.any():
        zb = z[big]
        k0b, k1b = _k01_scaled(zb)
        if not scaled:
            ez = np.exp(-zb)
            k0b, k1b = k0b * ez, k1b * ez
        k0[big], f[big] = k0b, zb * k1b
    return k0, f


def bessel_k0(z):
    """Modified Bessel function K0 on the principal branch.

    Accepts a scalar or array; raises DomainError at z = 0 and on the negative
    real axis.
    """
    zz, scalar = _as_complex(z)
    _check_branch(zz)
    return _unwrap(_k01(zz)[0], scalar)


def bessel_k0e(z):
    """Exponentially scaled e^z K0(z)."""
    zz, scalar = _as_complex(z)
    _check_branch(zz)
    return _unwrap(_k01(zz, scaled=True)[0], scalar)


def bessel_k1(z):
    zz, scalar = _as_complex(z)
    _check_branch(zz)
    return _unwrap(_k01(zz)[1] / zz, scalar)


def bessel_f(z):
    """F(z) = z K1(z) = -z K0'(z); F(0+) = 1 but z = 0 itself is rejected."""
    zz, scalar = _as_complex(z)
    _check_branch(zz)
    return _unwrap(_k01(zz)[1], scalar)


def bessel_k0_negreal(u, side):
    """Boundary value of K0(sqrt(2 z)) as z -> -u +- 0i, u > 0.

    ``side`` is ``+1`` for the upper (+0i) edge and ``-1`` for the lower edge.
    On that edge sqrt(2z) = +-i sqrt(2u) and log(z/2) = log(u/2) +- i pi, so
    the ascending series becomes a real alternating series plus a constant
    imaginary shift.
    """
    if side not in (1, -1, "+", "-"):
        raise ValueError("side must be +1 or -1")
    sgn = 1 if side in (1, "+") else -1
    uu = np.asarray(u, dtype=float)
    scalar = uu.ndim == 0
    uu = np.atleast_1d(uu)
    if np.any(~(uu > 0)):
        raise DomainError("bessel_k0_negreal requires u > 0")
    out = np.empty(uu.shape, dtype=complex)
    arg = np.sqrt(2.0 * uu)
    small = arg <= SERIES_RADIUS
    if small.any():
        us = uu[small]
        q = -0.5 * us
        shift = 0.5 * (np.log(0.5 * us) + sgn * 1j * PI) + EULER_GAMMA
        term = np.ones(us.shape)
        harmonic = np.zeros(us.shape)
        total = -shift * term
        for k in range(1, _SERIES_CAP):
            term = term * q / (k * k)
            harmonic = harmonic + 1.0 / k
            total = total + term * (harmonic - shift)
            if np.all(np.abs(term) <= _SERIES_REL * np.abs(total)):
                break
        out[small] = total
    if (~small).any():
        out[~small] = _k01(sgn * 1j * arg[~small])[0]
    return _unwrap(out, scalar)


def bessel_j0(y):
    """J0(2 sqrt(y)) = sum_k (-y)^k / (k!)^2 for y >= 0.

    Series for y <= 9; above that the trapezoid rule on the periodic integral
    (1/pi) int_0^pi cos(2 sqrt(y) sin theta) d theta, which converges
    geometrically once the node count exceeds the argument.
    """
    yy = np.asarray(y, dtype=float)
    scalar = yy.ndim == 0
    yy = np.atleast_1d(yy)
    if np.any(yy < 0):
        raise DomainError("bessel_j0 requires y >= 0")
    out = np.empty(yy.shape)
    small = yy <= 9.0
    if small.any():
        ys = yy[small]
        term = np.ones(ys.shape)
        total = np.ones(ys.shape)
        for k in range(1, 80):
            term = term * (-ys) / (k * k)
            total = total + term
            if np.all(np.abs(term) < 1e-18):
                break
        out[small] = total
    big = np.flatnonzero(~small)
    for i in big:
        x = 2.0 * math.sqrt(yy[i])
        n = int(x) + 40
        theta = PI * np.arange(n) / n
        out[i] = np.mean(np.cos(x * np.sin(theta)))
    return float(out[0]) if scalar else out


def exp_integral_e1(a):
    """E1(a) = int_a^inf e^{-u}/u du for a > 0.

    Below 1: E1(a) = -gamma - log a - int_0^a (e^{-u} - 1)/u du with the last
    integral summed as a power series. Above: e^{-a} int_0^inf e^{-v}/(a + v) dv
    by adaptive quadrature.
    """
    aa = np.asarray(a, dtype=float)
    scalar = aa.ndim == 0
    aa = np.atleast_1d(aa)
    if np.any(~(aa > 0)):
        raise DomainError("exp_integral_e1 requires a > 0")
    out = np.empty(aa.shape)
    for i, x in enumerate(aa):
        if x < 1.0:
            term = 1.0
            acc = 0.0
            for k in range(1, 60):
                term *= -x / k
                acc += term / k
                if abs(term) < 1e-18:
                    break
            out[i] = -EULER_GAMMA - math.log(x) - acc
        elif x > 745.0:
            out[i] = 0.0
        else:
            val, _ = integrate(lambda v, x=x: np.exp(-v) / (x + v),
                               [0.0, 1.0, 4.0, 12.0, 40.0], epsabs=1e-17,
                               epsrel=1e-14)
            out[i] = math.exp(-x) * val
    return float(out[0]) if scalar else out


def recip_gamma_series(n_max):
    """Coefficients c_0..c_{n_max} of z / Gamma(1 - z) = sum c_n z^n / n!.

    Uses log Gamma(1 - z) = gamma z + sum_{k>=2} zeta(k) z^k / k and the
    exponential recurrence f_n = (1/n) sum_k k g_k f_{n-k}.
    """
    if not isinstance(n_max, (int, np.integer)) or n_max < 1:
        raise ValueError("n_max must be an integer >= 1")
    if n_max > 30:
        raise PrecisionError("zeta table supports n_max <= 30")
    # The coefficients f_n = c_{n+1}/(n+1)! fall off like 1/n! while the
    # recurrence sums O(1) terms, so double precision cancels away every
    # digit by n ~ 25. Exact rational arithmetic on the stored decimals
    # leaves the table precision as the only error source.
    g = [Fraction(0), -Fraction(_EULER_GAMMA_DIGITS)]
    g += [-(1 + Fraction(ZETA_MINUS_ONE[k])) / k for k in range(2, n_max)]
    f = [Fraction(1)]
    for n in range(1, n_max):
        f.append(sum(k * g[k] * f[n - k] for k in range(1, n + 1)) / n)
    coeffs = [0.0]
    for n in range(1, n_max + 1):
        coeffs.append(float(math.factorial(n) * f[n - 1]))
    return coeffs
