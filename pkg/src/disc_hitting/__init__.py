"""Hitting time of a disc by planar Brownian motion.

Exact evaluation by branch-cut Laplace inversion, large-time asymptotic
formulas, and a Monte Carlo oracle for cross-checks.
"""

__version__ = "0.1.0"

from .errors import ConvergenceError, DomainError, PrecisionError  # noqa: E402
from .hitting_density import (HittingQuery, InversionConfig, cdf,  # noqa: E402
                              density_branchcut, laplace_transform, survival)

__all__ = [
    "ConvergenceError", "DomainError", "PrecisionError", "HittingQuery",
    "InversionConfig", "cdf", "density_branchcut", "laplace_transform",
    "survival", "__version__",
]
