"""Monte Carlo estimates of disc hitting times.

The distance |B_t| of planar Brownian motion from the origin is a Bessel(2)
process, dR = dW + dt / (2R), and it reaches level r exactly when B enters
the disc. Paths are advanced by Euler-Maruyama with a step proportional to the
squared distance from the barrier, so steps shrink as a path closes in.

Random numbers come from numpy's counter-based Philox generator. Paths are
grouped into fixed blocks of ``BLOCK_SIZE`` consecutive indices and block b
uses the key (seed, b). A path's random stream therefore depends only on the
seed and its index, never on how blocks are spread over worker processes.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

BLOCK_SIZE = 4096
_SEED_MASK = (1 << 64) - 1


@dataclass(frozen=True)
class McConfig:
    n_paths: int
    seed: int
    t_max: float
    time_grid: tuple
    step_scale: float = 0.05
    # Largest allowed step far from the barrier, before scaling.
    dt_cap: float = 1.0
    # A path closer than hit_tol * r to the barrier counts as a hit.
    hit_tol: float = 1e-6

    def __post_init__(self):
        object.__setattr__(self, "time_grid", tuple(float(v) for v in self.time_grid))
        if int(self.n_paths) != self.n_paths or self.n_paths < 1:
            raise ValueError("n_paths must be a positive integer")
        if not (0 <= self.seed <= _SEED_MASK):
            raise ValueError("seed must be a 64-bit unsigned integer")
        if not (self.t_max > 0 and math.isfinite(self.t_max)):
            raise ValueError("t_max must be positive and finite")
        if not 0 < self.step_scale <= 1:
            raise ValueError("step_scale must lie in (0, 1]")
        if not (self.dt_cap > 0 and 0 < self.hit_tol < 1):
            raise ValueError("dt_cap must be positive and hit_tol in (0, 1)")
        grid = np.asarray(self.time_grid)
        if grid.size and (np.any(np.diff(grid) <= 0) or grid[0] <= 0
                          or grid[-1] > self.t_max):
            raise ValueError("time_grid must be strictly increasing in (0, t_max]")


@dataclass(frozen=True)
class SurvivalCurve:
    times: np.ndarray
    survival: np.ndarray
    std_err: np.ndarray
    n_paths: int

    def rows(self):
        return [{"t": float(t), "survival": float(s), "std_err": float(e)}
                for t, s, e in zip(self.times, self.survival, self.std_err)]


@dataclass(frozen=True)
class HittingHistogram:
    """Per-bin density estimates of the hitting time.

    ``censored_mass`` is the fraction of paths still outside the disc at
    t_max and ``outside_mass`` the fraction that hit before the first edge or
    after the last one, so that sum(density * widths) + both masses = 1.
    """

    edges: np.ndarray
    density: np.ndarray
    std_err: np.ndarray
    censored_mass: float
    outside_mass: float
    n_paths: int = field(default=0)


def _block_generator(seed, block):
    return np.random.Generator(np.random.Philox(key=(block << 64) | seed))


def _simulate_block(args):
    r, x, cfg, block = args
    start = block * BLOCK_SIZE
    n = min(BLOCK_SIZE, cfg.n_paths - start)
    rng = _block_generator(cfg.seed, block)
    s, cap, t_max = cfg.step_scale, cfg.dt_cap, cfg.t_max
    barrier = r * (1.0 + cfg.hit_tol)
    t_end = t_max * (1.0 - 1e-14)

    tau = np.full(n, np.inf)
    idx = np.arange(n)
    R = np.full(n, float(x))
    t = np.zeros(n)
    if x <= barrier:
        tau[:] = 0.0
        return tau
    while idx.size:
        d = R - r
        dt = np.minimum(s * np.minimum(d * d, cap), t_max - t)
        z = rng.standard_normal(idx.size)
        R = R + dt / (2.0 * R) + np.sqrt(dt) * z
        t = t + dt
        hit = R <= barrier
        if hit.any():
            tau[idx[hit]] = t[hit]
        keep = ~hit & (t < t_end)
        if not keep.all():
            idx, R, t = idx[keep], R[keep], t[keep]
    return tau


def default_workers():
    """Worker cap from the WORKERS environment variable, else all CPUs."""
    env = os.environ.get("WORKERS")
    if env is not None:
        try:
            n = int(env)
        except ValueError:
            raise ValueError(f"WORKERS must be a positive integer, got {env!r}")
        if n < 1:
            raise ValueError(f"WORKERS must be a positive integer, got {env!r}")
        return n
    return os.cpu_count() or 1


def simulate_hitting_times(q, cfg, workers=None):
    """Hitting times of ``cfg.n_paths`` paths started at |x|; inf if censored."""
    if not q.x_radius > q.r:
        raise ValueError("start radius must exceed disc radius")
    n_blocks = -(-cfg.n_paths // BLOCK_SIZE)
    jobs = [(q.r, q.x_radius, cfg, b) for b in range(n_blocks)]
    workers = default_workers() if workers is None else workers
    if workers > 1 and n_blocks > 1:
        with ProcessPoolExecutor(max_workers=min(workers, n_blocks)) as pool:
            parts = list(pool.map(_simulate_block, jobs))
    else:
        parts = [_simulate_block(j) for j in jobs]
    return np.concatenate(parts)


def survival_from_times(tau, times):
    times = np.asarray(times, dtype=float)
    n = tau.size
    srt = np.sort(tau)
    # Number of paths with hitting time > T.
    surv = (n - np.searchsorted(srt, times, side="right")) / n
    err = np.sqrt(surv * (1.0 - surv) / n)
    return SurvivalCurve(times, surv, err, n)


def simulate_survival(q, cfg, workers=None):
    """Estimate P_x[hit after T] on ``cfg.time_grid`` with binomial errors."""
    tau = simulate_hitting_times(q, cfg, workers)
    return survival_from_times(tau, cfg.time_grid)


def hitting_time_histogram(q, cfg, bin_edges, workers=None):
    """Histogram of hitting times normalised to a density per bin."""
    edges = np.asarray(bin_edges, dtype=float)
    if edges.ndim != 1 or edges.size < 2 or np.any(np.diff(edges) <= 0):
        raise ValueError("bin_edges must be a sorted sequence of >= 2 values")
    if edges[0] < 0 or edges[-1] > cfg.t_max:
        raise ValueError("bin_edges must lie within [0, t_max]")
    tau = simulate_hitting_times(q, cfg, workers)
    n = tau.size
    counts, _ = np.histogram(tau[np.isfinite(tau)], bins=edges)
    frac = counts / n
    widths = np.diff(edges)
    density = frac / widths
    std_err = np.sqrt(frac * (1.0 - frac) / n) / widths
    hit = tau[np.isfinite(tau)]
    censored = (n - hit.size) / n
    outside = float(np.count_nonzero((hit < edges[0]) | (hit > edges[-1]))) / n
    return HittingHistogram(edges, density, std_err, censored, outside, n)
