"""Turning p-values into reject / fail-to-reject decisions.

Rejection is always the strict comparison ``p < alpha``; a p-value equal to
the threshold fails to reject. A hypothesis known only through a band
``[lower, upper)`` is decided whenever the whole band falls on one side of the
threshold and is Indeterminate otherwise.
"""

from __future__ import annotations

import itertools
from collections.abc import Sequence
from typing import Union

from .model import (
    DecisionBasis,
    DomainError,
    Family,
    FamilyDecision,
    Hypothesis,
    MissingPValueError,
    Outcome,
    PBand,
    Support,
    TestingPlan,
)
from .rates import resolve_policy

PValue = Union[float, PBand]

REDUNDANT_NOTE = (
    "REDUNDANT_CORRECTION: a family-level threshold was applied to separate individual inferences; "
    "these outcomes reproduce the reported decisions and are not a valid test of either kind"
)
JOINT_FAIL_NOTE = (
    "the intersection null was not rejected; reported as no support, though 'inconclusive' is an equally "
    "defensible reading"
)


def _check_alpha(alpha: float) -> None:
    if not (isinstance(alpha, (int, float)) and 0.0 < alpha < 1.0):
        raise DomainError(f"alpha must be in (0,1), got {alpha!r}")


def _check_p(p: PValue) -> None:
    if isinstance(p, PBand):
        if not (0.0 <= p.lower < p.upper <= 1.0):
            raise DomainError(f"invalid p_band {p!r}")
    elif not (isinstance(p, (int, float)) and 0.0 < p <= 1.0):
        raise DomainError(f"p-value must be in (0,1], got {p!r}")


def compare(p: PValue, alpha: float) -> Outcome:
    """Outcome of one test at threshold ``alpha``."""
    if isinstance(p, PBand):
        if p.upper <= alpha:
            return Outcome.REJECT
        if p.lower >= alpha:
            return Outcome.FAIL_TO_REJECT
        return Outcome.INDETERMINATE
    return Outcome.REJECT if p < alpha else Outcome.FAIL_TO_REJECT


def _check_family(p_values: Sequence[PValue], alpha: float) -> None:
    if len(p_values) == 0:
        raise DomainError("at least one p-value is required")
    for p in p_values:
        _check_p(p)
    _check_alpha(alpha)


def decide_union_intersection(p_values: Sequence[PValue], alpha_constituent: float) -> Outcome:
    """Joint decision on the intersection null: reject if any test is significant.

    The result says nothing about which member drove the rejection.
    """
    _check_family(p_values, alpha_constituent)
    outcomes = {compare(p, alpha_constituent) for p in p_values}
    if Outcome.REJECT in outcomes:
        return Outcome.REJECT
    if Outcome.INDETERMINATE in outcomes:
        return Outcome.INDETERMINATE
    return Outcome.FAIL_TO_REJECT


def decide_individual(p_value: PValue, alpha_individual: float) -> Outcome:
    _check_p(p_value)
    _check_alpha(alpha_individual)
    return compare(p_value, alpha_individual)


def decide_hybrid(p_values: Sequence[PValue], alpha_constituent: float) -> list[Outcome]:
    """Per-member decisions at an adjusted threshold.

    This is the invalid mix of a family-level threshold with member-level
    conclusions. It exists so published decisions can be reproduced and
    compared; :func:`evaluate_family` attaches a diagnostic whenever it is used.
    """
    _check_family(p_values, alpha_constituent)
    return [compare(p, alpha_constituent) for p in p_values]


def _label(outcomes: Sequence[Outcome]) -> Support:
    if all(o is Outcome.REJECT for o in outcomes):
        return Support.FULL
    if all(o is Outcome.FAIL_TO_REJECT for o in outcomes):
        return Support.NONE
    return Support.PARTIAL


def summarize_support(per_member_outcomes: Sequence[Outcome]) -> Support:
    if len(per_member_outcomes) == 0:
        raise DomainError("at least one outcome is required")
    open_slots = [i for i, o in enumerate(per_member_outcomes) if o is Outcome.INDETERMINATE]
    if not open_slots:
        return _label(per_member_outcomes)
    labels = set()
    for fill in itertools.product((Outcome.REJECT, Outcome.FAIL_TO_REJECT), repeat=len(open_slots)):
        resolved = list(per_member_outcomes)
        for i, o in zip(open_slots, fill):
            resolved[i] = o
        labels.add(_label(resolved))
        if len(labels) > 1:
            return Support.INDETERMINATE
    return labels.pop()


def member_p_values(family: Family, plan: TestingPlan) -> list[PValue]:
    out: list[PValue] = []
    for hid in family.members:
        h: Hypothesis = plan.hypothesis(hid)
        if h.p_value is not None:
            out.append(h.p_value)
        elif h.p_band is not None:
            out.append(h.p_band)
        else:
            raise MissingPValueError(hid)
    return out


def evaluate_family(family: Family, plan: TestingPlan, basis: DecisionBasis) -> FamilyDecision:
    ps = member_p_values(family, plan)
    basis = DecisionBasis(basis)

    if basis is DecisionBasis.INDIVIDUAL_AT_NOMINAL:
        alpha = plan.nominal_alpha
        outcomes = [decide_individual(p, alpha) for p in ps]
        return FamilyDecision(
            family_id=family.id,
            basis=basis,
            resolved_alpha_constituent=alpha,
            per_member_outcome=dict(zip(family.members, outcomes)),
            support=summarize_support(outcomes),
        )

    if basis is DecisionBasis.JOINT_UNION_INTERSECTION:
        # the joint reading always spans all k members, whatever mode was declared
        alpha = resolve_policy(family.policy, family.k)
        joint = decide_union_intersection(ps, alpha)
        support = {
            Outcome.REJECT: Support.FULL,
            Outcome.FAIL_TO_REJECT: Support.NONE,
            Outcome.INDETERMINATE: Support.INDETERMINATE,
        }[joint]
        return FamilyDecision(
            family_id=family.id,
            basis=basis,
            resolved_alpha_constituent=alpha,
            per_member_outcome={m: compare(p, alpha) for m, p in zip(family.members, ps)},
            support=support,
            joint_outcome=joint,
            notes=(JOINT_FAIL_NOTE,) if joint is Outcome.FAIL_TO_REJECT else (),
        )

    alpha = resolve_policy(family.policy, family.effective_k)
    outcomes = decide_hybrid(ps, alpha)
    return FamilyDecision(
        family_id=family.id,
        basis=basis,
        resolved_alpha_constituent=alpha,
        per_member_outcome=dict(zip(family.members, outcomes)),
        support=summarize_support(outcomes),
        notes=(REDUNDANT_NOTE,),
    )
