"""Standard normal CDF, quantile and two-sided p-values.

The CDF goes through the complementary error function so the lower tail
keeps full relative precision (``normal_cdf(-8)`` is about 6.2e-16, not 0).
The quantile is Wichura's AS241 rational approximation as shipped in
:class:`statistics.NormalDist`.
"""

from __future__ import annotations

import math
from statistics import NormalDist

import numpy as np
from scipy import special

from .model import DomainError

_SQRT2 = math.sqrt(2.0)
_STD = NormalDist()

# smallest positive double; keeps p-values inside (0, 1]
P_FLOOR = math.ulp(0.0)


def normal_cdf(x: float) -> float:
    if not math.isfinite(x):
        raise DomainError(f"x must be finite, got {x!r}")
    return 0.5 * math.erfc(-x / _SQRT2)


def normal_quantile(p: float) -> float:
    if not (0.0 < p < 1.0):
        raise DomainError(f"p must be in (0,1), got {p!r}")
    return _STD.inv_cdf(p)


def p_value_two_sided(z: float) -> float:
    """``2 * (1 - Phi(|z|))``, computed as ``erfc(|z| / sqrt 2)``."""
    if not math.isfinite(z):
        raise DomainError(f"z must be finite, got {z!r}")
    return min(1.0, max(P_FLOOR, math.erfc(abs(z) / _SQRT2)))


def p_values_two_sided(z: np.ndarray) -> np.ndarray:
    """Vectorised :func:`p_value_two_sided`."""
    return np.clip(special.erfc(np.abs(z) / _SQRT2), P_FLOOR, 1.0)


def analytic_power(delta: float, alpha: float) -> float:
    """Power of a two-sided z-test at level ``alpha`` when the mean shift is ``delta``."""
    if not (0.0 < alpha < 1.0):
        raise DomainError(f"alpha must be in (0,1), got {alpha!r}")
    crit = normal_quantile(1.0 - alpha / 2.0)
    return normal_cdf(delta - crit) + normal_cdf(-delta - crit)

