"""The function W(lambda) = int_0^inf e^{-lambda u} du / ((log u)^2 + pi^2).

Four independent evaluation routes are provided:

* direct quadrature (the reference), after the substitution u = e^s / lambda
  which turns lambda W(lambda) into a Gumbel-kernel integral;
* the sine and cosine Fourier integrals, summed lobe by lobe with
  repeated-averaging acceleration of the alternating tail;
* the 1/log(lambda) asymptotic series with coefficients of z / Gamma(1 - z).
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .errors import ConvergenceError, DomainError
from .quadrature import gauss_legendre_panels, integrate
from .special_fns import PI, Method, recip_gamma_series

# lambda W(lambda) = int exp(s - e^s) / ((s - log lambda)^2 + pi^2) ds.
# The kernel is below 3e-22 outside [S_LO, S_HI].
S_LO, S_HI = -50.0, 4.0
_KERNEL_TAIL = math.exp(S_LO) + math.exp(S_HI - math.exp(S_HI))

_NODES, _WEIGHTS = gauss_legendre_panels(S_LO, S_HI, 108, order=16)
_KERNEL_W = _WEIGHTS * np.exp(_NODES - np.exp(_NODES))

ASYMPTOTIC_WARN_LOG = 2.0


@dataclass(frozen=True)
class BouwkampSeries:
    """Coefficients c_0..c_N of lambda W(lambda) ~ sum c_n (log lambda)^(-n-1)."""

    coeffs: tuple

    def __post_init__(self):
        if len(self.coeffs) < 2 or self.coeffs[0] != 0.0 or self.coeffs[1] != 1.0:
            raise ValueError("Bouwkamp coefficients must start with c_0 = 0, c_1 = 1")

    @classmethod
    def build(cls, n):
        return cls(tuple(recip_gamma_series(n)))

    def partial_sum(self, log_lam, n_terms):
        """sum_{n=1}^{n_terms} c_n L^{-n-1} and the first omitted term."""
        total = 0.0
        for n in range(1, n_terms + 1):
            total += self.coeffs[n] / log_lam ** (n + 1)
        nxt = n_terms + 1
        omitted = (abs(self.coeffs[nxt] / log_lam ** (nxt + 1))
                   if nxt < len(self.coeffs) else float("nan"))
        return total, omitted


@dataclass(frozen=True)
class WEvaluation:
    lam: float
    value: float
    method: Method
    error_estimate: float


def _check_lambda(lam):
    if not lam > 0 or not math.isfinite(lam):
        raise DomainError(f"W(lambda) needs a finite lambda > 0, got {lam}")


def lambda_w_from_log(log_lam):
    """lambda W(lambda) as a function of log(lambda); vectorised.

    Fixed composite Gauss-Legendre on the Gumbel kernel. The Lorentzian factor
    has poles pi away from the real axis, so 16-point panels of width 1/2 are
    accurate to rounding for every log_lam.
    """
    L = np.asarray(log_lam, dtype=float)
    flat = np.atleast_1d(L).ravel()
    out = np.empty(flat.shape)
    # Chunked so that large batches from the adaptive integrator stay small.
    for i in range(0, flat.size, 2048):
        d = _NODES[None, :] - flat[i:i + 2048, None]
        out[i:i + 2048] = (1.0 / (d * d + PI * PI)) @ _KERNEL_W
    return float(out[0]) if L.ndim == 0 else out.reshape(L.shape)


def w_values(lam):
    """Vectorised W(lambda) for internal callers."""
    lam = np.asarray(lam, dtype=float)
    return lambda_w_from_log(np.log(lam)) / lam


def w_quadrature(lam):
    """W(lambda) by adaptive quadrature over the whole real line in log u."""
    _check_lambda(lam)
    L = math.log(lam)

    def f(s):
        d = s - L
        return np.exp(s - np.exp(s)) / (d * d + PI * PI)

    pts = np.unique(np.clip([S_LO, -30.0, -10.0, -3.0, 0.0, S_HI, L], S_LO, S_HI))
    val, err = integrate(f, pts, epsabs=1e-18, epsrel=1e-13)
    err += _KERNEL_TAIL / PI ** 2
    return WEvaluation(lam, val / lam, Method.QUADRATURE, err / lam)


# ---------------------------------------------------------------------------
# Oscillatory engine


def _h(t):
    lt = np.log(t)
    return 1.0 / (lt * lt + 0.25 * PI * PI)


def _g(t):
    lt = np.log(t)
    return lt / (lt * lt + 0.25 * PI * PI)


def _euler_average(partial):
    """Repeatedly average consecutive partial sums; returns last two levels."""
    level = np.asarray(partial, dtype=float)
    prev = level[-1]
    while level.size > 1:
        prev = level[-1]
        level = 0.5 * (level[:-1] + level[1:])
    return level[0], prev


def oscillatory_integral(envelope, freq, kind, depth=30, head_t=math.e ** 2,
                         min_head_lobes=30, max_head_lobes=4000, gauss_order=20,
                         tol=1e-10, epsabs=1e-13):
    """int_0^inf envelope(t) * trig(freq t) dt for trig = sin or cos.

    The range is cut at zeros of the trigonometric factor. The head (up to
    ``head_t``, with between ``min_head_lobes`` and ``max_head_lobes`` lobes)
    is integrated adaptively; the alternating tail of ``depth`` lobes is
    integrated with a fixed Gauss rule and its partial sums accelerated by
    repeated averaging. The tail sum only depends on the envelope being smooth
    on the scale of a lobe near the cut, which is why the head can stop short
    of ``head_t`` at high frequency.
    ``epsabs`` is the absolute head tolerance on the returned value.
    Returns (value, error_estimate).
    """
    if kind not in ("sin", "cos"):
        raise ValueError("kind must be 'sin' or 'cos'")
    trig = np.sin if kind == "sin" else np.cos
    offset = 0.0 if kind == "sin" else 0.5
    # Work in tau = freq * t so zeros sit at (n + offset) * pi.
    n_head = int(math.ceil(head_t * freq / PI - offset))
    n_head = max(min_head_lobes, min(n_head, max_head_lobes))
    zeros = (np.arange(n_head + 1) + offset) * PI
    if kind == "cos":
        zeros = np.concatenate([[0.0], zeros])
    else:
        zeros[0] = 0.0
    brk = zeros
    # Log-scale breakpoints near the origin keep the 1/log t behaviour tame.
    tau1 = freq * 1.0
    extra = [tau1] if 0 < tau1 < zeros[-1] else []
    small = [z for z in freq * np.array([1e-12, 1e-8, 1e-5, 1e-3, 1e-1])
             if z < zeros[1]]
    brk = np.unique(np.concatenate([brk, extra, small]))

    def head_f(tau):
        return envelope(tau / freq) * trig(tau)

    head, head_err = integrate(head_f, brk, epsabs=epsabs * freq,
                               epsrel=1e-13, limit=400000)

    x, w = np.polynomial.legendre.leggauss(gauss_order)
    lo = zeros[-1] + PI * np.arange(depth)
    centre = lo + 0.5 * PI
    nodes = centre[:, None] + 0.5 * PI * x[None, :]
    lobes = (envelope(nodes / freq) * trig(nodes)) @ (0.5 * PI * w)
    partial = np.cumsum(lobes)
    accel, prev = _euler_average(partial)
    tail_err = abs(accel - prev)
    if tail_err > tol * max(1.0, abs(head + accel)):
        raise ConvergenceError(
            f"lobe acceleration did not settle within {depth} lobes "
            f"(last change {tail_err:.3g})"
        )
    return (head + accel) / freq, (head_err + tail_err) / freq


def w_fourier(lam, variant, depth=30):
    """W(lambda) from the sine or cosine Fourier representation."""
    _check_lambda(lam)
    if variant in ("sine", "sin"):
        val, err = oscillatory_integral(_h, lam, "sin", depth=depth)
        return WEvaluation(lam, val - math.exp(-lam), Method.FOURIER_SINE, err)
    if variant in ("cosine", "cos"):
        val, err = oscillatory_integral(_g, lam, "cos", depth=depth)
        return WEvaluation(lam, 2.0 / PI * val + math.exp(-lam),
                           Method.FOURIER_COSINE, 2.0 / PI * err)
    raise ValueError("variant must be 'sine' or 'cosine'")


def w_negative_side_check(lam, depth=30):
    """(1/2 pi) int e^{-i lam u} / log(-i u) du for lam < 0.

    Folding u and -u together gives
    (1/pi) int_0^inf [log u cos(mu u) - (pi/2) sin(mu u)] / (log^2 u + pi^2/4) du
    with mu = |lam|; both pieces come from the same lobe engine.
    """
    if not lam < 0 or not math.isfinite(lam):
        raise DomainError("w_negative_side_check needs a finite lambda < 0")
    mu = -lam
    c, _ = oscillatory_integral(_g, mu, "cos", depth=depth)
    s, _ = oscillatory_integral(_h, mu, "sin", depth=depth)
    return c / PI - 0.5 * s


def w_asymptotic(lam, n_terms):
    """Truncated 1/log(lambda) series for W(lambda).

    The error estimate is the magnitude of the first omitted term. A
    RuntimeWarning is issued when |log lambda| < 2, where the series is not
    useful.
    """
    _check_lambda(lam)
    if lam == 1.0:
        raise DomainError("asymptotic series undefined at lambda = 1")
    if not 1 <= n_terms <= 30:
        raise ValueError("n_terms must lie in 1..30")
    L = math.log(lam)
    if abs(L) < ASYMPTOTIC_WARN_LOG:
        warnings.warn(f"|log lambda| = {abs(L):.3g} < {ASYMPTOTIC_WARN_LOG}: "
                      "asymptotic series unreliable", RuntimeWarning,
                      stacklevel=2)
    series = BouwkampSeries.build(min(n_terms + 1, 30))
    total, omitted = series.partial_sum(L, n_terms)
    if math.isnan(omitted):
        omitted = abs(series.coeffs[n_terms] / L ** (n_terms + 1))
    return WEvaluation(lam, total / lam, Method.ASYMPTOTIC, omitted / lam)
