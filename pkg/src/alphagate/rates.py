"""Analytic familywise / per-family error rates and alpha adjustments.

Everything here assumes independent tests with a common per-test level.
``1 - (1 - a)**k`` is evaluated as ``-expm1(k * log1p(-a))`` so it stays
accurate for tiny ``a`` and very large ``k``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .model import AlphaPolicy, Bonferroni, DomainError, Sidak, Specified, Unadjusted


@dataclass(frozen=True)
class RatePair:
    fwer: float
    pfer: float


def _check(alpha: float, k: int, name: str = "alpha") -> None:
    if isinstance(k, bool) or not isinstance(k, int) or k < 1:
        raise DomainError(f"k must be a positive integer, got {k!r}")
    if not (isinstance(alpha, (int, float)) and 0.0 < alpha < 1.0):
        raise DomainError(f"{name} must be in (0,1), got {alpha!r}")


def fwer_independent(alpha_constituent: float, k: int) -> float:
    """Probability of at least one false positive among ``k`` independent tests."""
    _check(alpha_constituent, k, "alpha_constituent")
    if k == 1:
        return float(alpha_constituent)
    return -math.expm1(k * math.log1p(-alpha_constituent))


def pfer(alpha_constituent: float, k: int) -> float:
    """Expected number of false positives among ``k`` tests."""
    _check(alpha_constituent, k, "alpha_constituent")
    return alpha_constituent * k


def sidak_adjust(alpha_joint: float, k: int) -> float:
    """Per-test level whose independent-tests FWER equals ``alpha_joint``."""
    _check(alpha_joint, k, "alpha_joint")
    if k == 1:
        return float(alpha_joint)
    return -math.expm1(math.log1p(-alpha_joint) / k)


def bonferroni_adjust(alpha_joint: float, k: int) -> float:
    """Per-test level whose PFER equals ``alpha_joint``."""
    _check(alpha_joint, k, "alpha_joint")
    return alpha_joint / k


def resolve_policy(policy: AlphaPolicy, k: int) -> float:
    """The per-test threshold a policy yields for a family of ``k`` tests."""
    if isinstance(k, bool) or not isinstance(k, int) or k < 1:
        raise DomainError(f"k must be a positive integer, got {k!r}")
    if isinstance(policy, Sidak):
        return sidak_adjust(policy.alpha_joint, k)
    if isinstance(policy, Bonferroni):
        return bonferroni_adjust(policy.alpha_joint, k)
    if isinstance(policy, (Unadjusted, Specified)):
        _check(policy.alpha, 1)
        return float(policy.alpha)
    raise DomainError(f"unknown policy {policy!r}")


def rates_for_family(policy: AlphaPolicy, k: int) -> RatePair:
    a = resolve_policy(policy, k)
    return RatePair(fwer_independent(a, k), pfer(a, k))
