import dataclasses

import pytest
from hypothesis import given
from hypothesis import strategies as st

from alphagate.decisions import (
    REDUNDANT_NOTE,
    decide_hybrid,
    decide_individual,
    decide_union_intersection,
    evaluate_family,
    summarize_support,
)
from alphagate.model import (
    Bonferroni,
    DecisionBasis,
    DomainError,
    Hypothesis,
    InferenceMode,
    MissingPValueError,
    Outcome,
    PBand,
    Sidak,
    Support,
    Unadjusted,
)
from alphagate.rates import sidak_adjust

from conftest import make_plan

R, F, I = Outcome.REJECT, Outcome.FAIL_TO_REJECT, Outcome.INDETERMINATE


def test_union_intersection_examples():
    assert decide_union_intersection([0.011, 0.979, 0.150], sidak_adjust(0.05, 3)) is R
    assert decide_union_intersection([0.5, 0.5], 0.025) is F
    assert decide_union_intersection([0.010, 0.040], 0.025) is R


@pytest.mark.parametrize("p, alpha, expected", [(0.040, 0.05, R), (0.042, 0.05, R), (0.979, 0.05, F), (0.050, 0.050, F)])
def test_individual_examples(p, alpha, expected):
    assert decide_individual(p, alpha) is expected


def test_hybrid_examples():
    assert decide_hybrid([0.003, 0.048], 0.025) == [R, F]
    assert decide_hybrid([0.010, 0.040], 0.025) == [R, F]
    assert decide_hybrid([0.5], 0.025) == [F]


@pytest.mark.parametrize(
    "call",
    [
        lambda: decide_union_intersection([], 0.05),
        lambda: decide_union_intersection([0.0], 0.05),
        lambda: decide_union_intersection([0.2, 1.1], 0.05),
        lambda: decide_union_intersection([0.2], 1.0),
        lambda: decide_individual(0.0, 0.05),
        lambda: decide_individual(0.5, 0.0),
        lambda: decide_hybrid([], 0.05),
        lambda: summarize_support([]),
    ],
)
def test_domain_errors(call):
    with pytest.raises(DomainError):
        call()


@pytest.mark.parametrize(
    "outcomes, label",
    [
        ([R, F], Support.PARTIAL),
        ([R, R], Support.FULL),
        ([F], Support.NONE),
        ([F, F, F], Support.NONE),
        ([R, I], Support.INDETERMINATE),
        ([I], Support.INDETERMINATE),
        ([R, F, I], Support.PARTIAL),
    ],
)
def test_summarize_support(outcomes, label):
    assert summarize_support(outcomes) is label


def test_band_rule():
    assert decide_individual(PBand(0.0, 0.025), 0.025) is R
    assert decide_individual(PBand(0.025, 0.05), 0.025) is F
    assert decide_individual(PBand(0.025, 0.05), 0.05) is R
    assert decide_individual(PBand(0.01, 0.04), 0.025) is I
    assert decide_union_intersection([PBand(0.01, 0.04), 0.5], 0.025) is I
    assert decide_union_intersection([PBand(0.01, 0.04), 0.001], 0.025) is R


# -- evaluate_family ------------------------------------------------------------


def test_janssen_three_bases(janssen_plan):
    fam = janssen_plan.families[0]
    joint = evaluate_family(fam, janssen_plan, DecisionBasis.JOINT_UNION_INTERSECTION)
    assert joint.joint_outcome is R and joint.support is Support.FULL
    assert joint.resolved_alpha_constituent == 0.025

    indiv = evaluate_family(fam, janssen_plan, DecisionBasis.INDIVIDUAL_AT_NOMINAL)
    assert list(indiv.per_member_outcome.values()) == [R, R]
    assert indiv.support is Support.FULL and indiv.joint_outcome is None

    hybrid = evaluate_family(fam, janssen_plan, DecisionBasis.HYBRID_AS_REPORTED)
    assert list(hybrid.per_member_outcome.values()) == [R, F]
    assert hybrid.support is Support.PARTIAL
    assert REDUNDANT_NOTE in hybrid.notes


def test_joint_failure_carries_note():
    plan = make_plan([0.6, 0.7])
    d = evaluate_family(plan.families[0], plan, DecisionBasis.JOINT_UNION_INTERSECTION)
    assert d.joint_outcome is F and d.support is Support.NONE and d.notes


def test_individual_uses_plan_nominal(janssen_plan):
    plan = dataclasses.replace(janssen_plan, nominal_alpha=0.01)
    d = evaluate_family(plan.families[0], plan, DecisionBasis.INDIVIDUAL_AT_NOMINAL)
    assert list(d.per_member_outcome.values()) == [R, F]


def test_individual_mode_family_resolves_with_k1():
    plan = make_plan([0.010, 0.040], Bonferroni(0.05), mode=InferenceMode.INDIVIDUAL)
    hybrid = evaluate_family(plan.families[0], plan, DecisionBasis.HYBRID_AS_REPORTED)
    assert hybrid.resolved_alpha_constituent == 0.05
    joint = evaluate_family(plan.families[0], plan, DecisionBasis.JOINT_UNION_INTERSECTION)
    assert joint.resolved_alpha_constituent == 0.025


def test_missing_p_value_names_hypothesis(janssen_plan):
    plan = dataclasses.replace(janssen_plan, hypotheses=(janssen_plan.hypotheses[0], Hypothesis("H2")))
    with pytest.raises(MissingPValueError) as info:
        evaluate_family(plan.families[0], plan, DecisionBasis.HYBRID_AS_REPORTED)
    assert info.value.hypothesis_id == "H2"


# -- properties -------------------------------------------------------------------

pvals = st.floats(min_value=1e-9, max_value=1.0)
alphas = st.floats(min_value=1e-4, max_value=0.5)


@given(st.lists(pvals, min_size=1, max_size=12), alphas)
def test_union_intersection_equivalence(ps, a):
    assert (decide_union_intersection(ps, a) is R) == (R in decide_hybrid(ps, a))


@given(st.lists(pvals, min_size=1, max_size=12), alphas, st.randoms())
def test_permutation_invariance(ps, a, rnd):
    shuffled = list(ps)
    rnd.shuffle(shuffled)
    assert decide_union_intersection(ps, a) is decide_union_intersection(shuffled, a)


@given(st.lists(pvals, min_size=1, max_size=12), st.floats(0.001, 0.05), st.floats(0.001, 0.05))
def test_power_loss_subset(ps, a1, a2):
    alpha_c, nominal = min(a1, a2), max(a1, a2)
    hybrid = decide_hybrid(ps, alpha_c)
    indiv = [decide_individual(p, nominal) for p in ps]
    assert {i for i, o in enumerate(hybrid) if o is R} <= {i for i, o in enumerate(indiv) if o is R}


def test_power_loss_strict_witness():
    hybrid = decide_hybrid([0.010, 0.040], 0.025)
    indiv = [decide_individual(p, 0.05) for p in (0.010, 0.040)]
    assert hybrid.count(R) == 1 and indiv.count(R) == 2


@given(st.lists(st.floats(0.1, 1.0), min_size=1, max_size=8), st.data())
def test_strictness_flips_one_member(ps, data):
    alpha = 0.05
    i = data.draw(st.integers(0, len(ps) - 1))
    eps = 1e-9
    below = list(ps)
    above = list(ps)
    below[i], above[i] = alpha - eps, alpha + eps
    for decide in (lambda q: decide_hybrid(q, alpha), lambda q: [decide_individual(p, alpha) for p in q]):
        lo, hi = decide(below), decide(above)
        assert lo[i] is R and hi[i] is F
        assert [o for j, o in enumerate(lo) if j != i] == [o for j, o in enumerate(hi) if j != i]


def test_unadjusted_hybrid_equals_individual():
    plan = make_plan([0.01, 0.07], Unadjusted(0.05))
    fam = plan.families[0]
    h = evaluate_family(fam, plan, DecisionBasis.HYBRID_AS_REPORTED)
    i = evaluate_family(fam, plan, DecisionBasis.INDIVIDUAL_AT_NOMINAL)
    assert h.per_member_outcome == i.per_member_outcome


def test_sidak_family_joint(three_hypothesis_plan):
    fam = three_hypothesis_plan.families[0]
    d = evaluate_family(fam, three_hypothesis_plan, DecisionBasis.JOINT_UNION_INTERSECTION)
    assert d.resolved_alpha_constituent == sidak_adjust(0.05, 3)
    assert isinstance(fam.policy, Sidak) and d.support is Support.FULL
