"""Empirical constants for the error envelopes of the asymptotic formulas.

The asymptotic results carry O(.) terms with unnamed constants. Here each one
is measured as the largest ratio |approximation - truth| / envelope over a
fixed grid, with the branch-cut inverter as the truth, then multiplied by a
safety margin and stored in a versioned JSON file. Tests compare against the
stored values, so they are regression bounds rather than proved ones.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path

from . import asymptotics as asy
from .hitting_density import HittingQuery, cdf, density_branchcut, q_x_surrogate
from .special_fns import EULER_GAMMA, bessel_j0
from .w_ramanujan import lambda_w_from_log

SCHEMA_VERSION = 1
MARGIN = 1.25
DEFAULT_PATH = Path(__file__).resolve().parent / "data" / "envelope_constants.json"

DEFAULT_GRID = {
    "thm1_t": [1e3, 1e4, 1e5, 1e6, 1e7],
    "thm1_x": [2.0, 10.0, 50.0],
    "thm2_xi1_t": [1e3, 1e4, 1e5, 1e6, 1e7],
    "thm3_t": [1e3, 1e4, 1e5, 1e6],
    "thm3_x": [2.0, 10.0, 30.0, 50.0, 100.0],
    "remark2_x": [1.5, 2.0, 3.0, 5.0],
    "remark2_t": [1e4, 1e5, 1e6, 1e7, 1e8],
    "w_lambda": [1e6, 1e7, 1e8, 1e9, 1e10, 1e11, 1e12],
    "phi_alpha": [5.0, 10.0, 20.0, 40.0],
    "j0_y": [1.0, 10.0, 100.0, 1000.0, 10000.0],
    "gap_x": 10.0,
    "gap_t": [1e2, 1e3, 1e4, 1e5, 1e6],
}

# Any fitted ratio outside these ranges means something is broken.
SANITY = {
    "thm1": (0.0, 100.0),
    "thm2": (0.0, 100.0),
    "thm2_xi1": (0.0, 100.0),
    "thm3": (0.0, 100.0),
    "remark2": (0.0, 100.0),
    "w_sandwich": (0.0, 100.0),
    "phi_large": (0.0, 100.0),
    "j0_decay": (0.0, 10.0),
    "surrogate_gap": (0.0, 1e4),
}


class CalibrationError(RuntimeError):
    """A fitted envelope ratio is outside its sanity range."""


@dataclass(frozen=True)
class EnvelopeConstants:
    version: int
    margin: float
    constants: dict
    raw: dict
    grid: dict

    def __getitem__(self, name):
        return self.constants[name]

    def to_dict(self):
        return {"version": self.version, "margin": self.margin,
                "constants": self.constants, "raw": self.raw, "grid": self.grid}

    @classmethod
    def from_dict(cls, data):
        if data.get("version") != SCHEMA_VERSION:
            raise ValueError(f"unsupported envelope file version {data.get('version')!r}")
        return cls(data["version"], data["margin"], dict(data["constants"]),
                   dict(data["raw"]), dict(data["grid"]))


def _density(x, t):
    return density_branchcut(HittingQuery(1.0, x, t)).value


def measure(grid=None):
    """Return the raw maximal envelope ratios over ``grid``."""
    g = dict(DEFAULT_GRID if grid is None else grid)
    k = asy.Constants(1.0)
    raw = {}

    ratios1, ratios2 = [], []
    for x in g["thm1_x"]:
        for t in g["thm1_t"]:
            p = _density(x, t)
            ratios1.append(abs(asy.thm1_density(x, t, k) - p) / asy.thm1_envelope(x, t))
            ratios2.append(abs(asy.thm2_density(x, t, k) - p) / asy.thm2_envelope(x, t))
    raw["thm1"] = max(ratios1)
    raw["thm2"] = max(ratios2)

    vals = []
    for t in g["thm2_xi1_t"]:
        x = math.sqrt(t)
        p = _density(x, t)
        vals.append(abs(asy.thm2_density(x, t, k) / p - 1.0) * math.log(t))
    raw["thm2_xi1"] = max(vals)

    vals = []
    for x in g["thm3_x"]:
        for t in g["thm3_t"]:
            c = cdf(HittingQuery(1.0, x, t)).value
            vals.append(abs(asy.thm3_cdf(x, t, k) - c) / asy.thm3_envelope(x, t))
    raw["thm3"] = max(vals)

    vals = []
    for x in g["remark2_x"]:
        for t in g["remark2_t"]:
            if x * x <= t / math.log(t) ** 2:
                a, b = asy.thm1_density(x, t, k), asy.thm2_density(x, t, k)
                vals.append(abs(a - b) / b * math.log(t))
    raw["remark2"] = max(vals)

    vals = []
    for lam in g["w_lambda"]:
        L = math.log(lam)
        lw = lambda_w_from_log(L)
        vals.append(abs(lw * L * L - 1.0 + 2.0 * EULER_GAMMA / L) * L * L)
    raw["w_sandwich"] = max(vals)

    raw["phi_large"] = max(asy.phi(a) * a * math.exp(a) / math.log(a)
                           for a in g["phi_alpha"])
    raw["j0_decay"] = max(abs(bessel_j0(y)) * y ** 0.25 for y in g["j0_y"])

    vals = []
    x = g["gap_x"]
    for t in g["gap_t"]:
        q = HittingQuery(1.0, x, t)
        gap = abs(q_x_surrogate(q).value - density_branchcut(q).value)
        vals.append(gap * t * t / math.log(t))
    raw["surrogate_gap"] = max(vals)
    return {name: float(v) for name, v in raw.items()}, g


def calibrate(grid=None, margin=MARGIN):
    """Measure all ratios, check them against SANITY and build the constants."""
    raw, g = measure(grid)
    bad = [name for name, v in raw.items()
           if not (math.isfinite(v) and SANITY[name][0] < v < SANITY[name][1])]
    if bad:
        detail = ", ".join(f"{n}={raw[n]:.4g}" for n in bad)
        raise CalibrationError(f"envelope ratios outside sanity range: {detail}")
    constants = {name: margin * v for name, v in raw.items()}
    return EnvelopeConstants(SCHEMA_VERSION, margin, constants, raw, g)


def save(env, path=DEFAULT_PATH, force=False):
    path = Path(path)
    if path.exists() and not force:
        raise FileExistsError(f"{path} exists; pass force=True to overwrite")
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(env.to_dict(), indent=2, sort_keys=True) + "\n")


def load(path=DEFAULT_PATH):
    return EnvelopeConstants.from_dict(json.loads(Path(path).read_text()))
