"""Diagnose redundant corrections, missing adjustments and error-rate confusions."""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Optional

from .decisions import compare, evaluate_family, member_p_values
from .model import (
    Bonferroni,
    DecisionBasis,
    DescribedAnalysis,
    DomainError,
    Family,
    FamilyDecision,
    MissingPValueError,
    Outcome,
    Sidak,
    Specified,
    Support,
    TestingPlan,
    Unadjusted,
    describe_policy,
)
from .rates import fwer_independent, pfer, resolve_policy


class FindingCode(str, Enum):
    REDUNDANT_CORRECTION = "REDUNDANT_CORRECTION"
    MISSING_ADJUSTMENT = "MISSING_ADJUSTMENT"
    CONFUSION_I = "CONFUSION_I"
    CONFUSION_II = "CONFUSION_II"
    CONFUSION_III = "CONFUSION_III"
    HYPOTHESIS_FREE_FWER = "HYPOTHESIS_FREE_FWER"


@dataclass(frozen=True)
class LintFinding:
    code: FindingCode
    explanation: str
    quantities: dict
    family_id: Optional[str] = None
    reference: Optional[str] = None

    def to_dict(self) -> dict:
        return {
            "code": self.code.value,
            "family_id": self.family_id,
            "reference": self.reference,
            "explanation": self.explanation,
            "quantities": self.quantities,
        }


@dataclass(frozen=True)
class LintNote:
    """Informational remark that does not count as a finding."""

    family_id: str
    text: str

    def to_dict(self) -> dict:
        return {"family_id": self.family_id, "text": self.text}


@dataclass(frozen=True)
class ReclassificationReport:
    family_id: str
    decisions: dict[DecisionBasis, FamilyDecision]
    narrative: str
    notes: tuple[str, ...] = field(default=())

    @property
    def supports(self) -> dict[DecisionBasis, Support]:
        return {b: d.support for b, d in self.decisions.items()}


def is_adjusting(family: Family, nominal_alpha: float) -> bool:
    """Whether the family's threshold was lowered on account of multiplicity."""
    policy = family.policy
    if isinstance(policy, (Sidak, Bonferroni)):
        return family.effective_k >= 2
    if isinstance(policy, Specified):
        return policy.derived_from_correction and policy.alpha_constituent < nominal_alpha
    return False


def _claims_on(plan: TestingPlan, family: Family):
    joint = [c for c in plan.reported_inferences if c.target.is_joint and c.target.id == family.id]
    individual = [c for c in plan.reported_inferences if not c.target.is_joint and c.target.id in family.members]
    return joint, individual


def _power_cost(family: Family, plan: TestingPlan, alpha_c: float) -> dict:
    """Members that reject at the nominal level but not at ``alpha_c``."""
    lost, unsure = [], []
    try:
        ps = member_p_values(family, plan)
    except MissingPValueError:
        return {"power_cost": None, "power_cost_members": [], "power_cost_indeterminate": list(family.members)}
    for hid, p in zip(family.members, ps):
        at_c = compare(p, alpha_c)
        at_nominal = compare(p, plan.nominal_alpha)
        if at_c is Outcome.REJECT or at_nominal is Outcome.FAIL_TO_REJECT:
            continue
        if at_c is Outcome.FAIL_TO_REJECT and at_nominal is Outcome.REJECT:
            lost.append(hid)
        else:
            unsure.append(hid)
    return {"power_cost": len(lost), "power_cost_members": lost, "power_cost_indeterminate": unsure}


def _lint_family(plan: TestingPlan, family: Family) -> tuple[list[LintFinding], list[LintNote]]:
    findings: list[LintFinding] = []
    notes: list[LintNote] = []
    joint, individual = _claims_on(plan, family)

    if is_adjusting(family, plan.nominal_alpha):
        alpha_c = resolve_policy(family.policy, family.effective_k)
        if not joint and individual:
            quantities = {
                "alpha_constituent": alpha_c,
                "alpha_nominal": plan.nominal_alpha,
                "k": family.k,
                **_power_cost(family, plan, alpha_c),
            }
            findings.append(
                LintFinding(
                    code=FindingCode.REDUNDANT_CORRECTION,
                    family_id=family.id,
                    explanation=(
                        f"{describe_policy(family.policy)} lowers the per-test level to {alpha_c:.6g} for a joint "
                        f"inference about family {family.id}, but only individual inferences are reported; "
                        f"individual inferences need no adjustment and can use {plan.nominal_alpha:.6g}"
                    ),
                    quantities=quantities,
                )
            )
        elif joint and individual:
            notes.append(
                LintNote(
                    family.id,
                    "family carries a joint claim and individual claims; the individual claims at the adjusted "
                    "level may be partly redundant (interpretation, not flagged as a finding)",
                )
            )

    if isinstance(family.policy, Unadjusted) and family.k >= 2:
        for c in joint:
            a = family.policy.alpha_individual
            findings.append(
                LintFinding(
                    code=FindingCode.MISSING_ADJUSTMENT,
                    family_id=family.id,
                    reference=f"joint claim on {family.id}",
                    explanation=(
                        f"joint claim on family {family.id} rests on {family.k} unadjusted tests at {a:.6g}; "
                        f"the familywise error rate of that union-intersection test is "
                        f"{fwer_independent(a, family.k):.6g}, not {c.claimed_alpha:.6g}"
                    ),
                    quantities={
                        "alpha_constituent": a,
                        "k": family.k,
                        "fwer": fwer_independent(a, family.k),
                        "pfer": pfer(a, family.k),
                        "claimed_alpha": c.claimed_alpha,
                    },
                )
            )
    return findings, notes


def classify_confusion(analysis: DescribedAnalysis) -> Optional[LintFinding]:
    """Which error-rate confusion, if any, an extracted analysis commits."""
    n, t, k_used = analysis.n_inferences, analysis.tests_per_inference, analysis.k_used_for_correction
    for name, v in (("n_inferences", n), ("tests_per_inference", t), ("k_used_for_correction", k_used)):
        if v < 1:
            raise DomainError(f"{name} must be >= 1, got {v}")
    alpha = analysis.alpha
    ref = analysis.label or None
    if t != 1:
        return None
    if k_used == n and n > 1:
        free_fwer = fwer_independent(alpha, n)
        return LintFinding(
            code=FindingCode.CONFUSION_III,
            reference=ref,
            explanation=(
                f"{n} separate single-test inferences were treated as one family of k={n}; the resulting "
                f"familywise rate {free_fwer:.6g} refers to no null hypothesis, while each inference keeps "
                f"its own Type I error rate of {alpha:.6g}"
            ),
            quantities={
                "hypothesis_free_fwer": free_fwer,
                "hypothesis_free_pfer": pfer(alpha, n),
                "alpha_individual": alpha,
                "n_inferences": n,
                "rate_type": analysis.rate_type,
            },
        )
    if analysis.claim == "inflated_individual_rate":
        return LintFinding(
            code=FindingCode.CONFUSION_I,
            reference=ref,
            explanation=(
                f"running {n} individual tests does not raise the Type I error rate of any one of them; "
                f"each stays at {alpha:.6g}"
            ),
            quantities={"alpha_individual": alpha, "per_inference_error_rate": alpha, "n_inferences": n},
        )
    if analysis.claim == "inflated_family_rate":
        return LintFinding(
            code=FindingCode.CONFUSION_II,
            reference=ref,
            explanation=(
                "each inference rests on one test (k=1), so its familywise and per-family rates both equal "
                f"{alpha:.6g}"
            ),
            quantities={
                "alpha_individual": alpha,
                "fwer_per_inference": fwer_independent(alpha, 1),
                "pfer_per_inference": pfer(alpha, 1),
            },
        )
    return None


def lint_plan(plan: TestingPlan) -> list[LintFinding]:
    """Findings for every family (sorted by family id), then for each described analysis."""
    return _lint(plan)[0]


def lint_notes(plan: TestingPlan) -> list[LintNote]:
    return _lint(plan)[1]


def _lint(plan: TestingPlan) -> tuple[list[LintFinding], list[LintNote]]:
    findings: list[LintFinding] = []
    notes: list[LintNote] = []
    for family in sorted(plan.families, key=lambda f: f.id):
        f, n = _lint_family(plan, family)
        findings.extend(f)
        notes.extend(n)
    for i, analysis in enumerate(plan.described_analyses):
        finding = classify_confusion(analysis)
        if finding is not None:
            if finding.reference is None:
                finding = LintFinding(
                    finding.code, finding.explanation, finding.quantities, reference=f"described_analyses[{i}]"
                )
            findings.append(finding)
    return findings, notes


_BASIS_TEXT = {
    DecisionBasis.JOINT_UNION_INTERSECTION: "joint union-intersection test",
    DecisionBasis.INDIVIDUAL_AT_NOMINAL: "individual tests at the nominal level",
    DecisionBasis.HYBRID_AS_REPORTED: "hybrid (adjusted level, individual conclusions)",
}


def reclassify(family: Family, plan: TestingPlan) -> ReclassificationReport:
    decisions = {b: evaluate_family(family, plan, b) for b in DecisionBasis}
    parts = [f"{_BASIS_TEXT[b]}: {d.support.value} support" for b, d in decisions.items()]
    narrative = "; ".join(parts) + "."
    hybrid = decisions[DecisionBasis.HYBRID_AS_REPORTED].support
    valid = {decisions[DecisionBasis.JOINT_UNION_INTERSECTION].support, decisions[DecisionBasis.INDIVIDUAL_AT_NOMINAL].support}
    if hybrid not in valid:
        narrative += (
            f" The hybrid reading ({hybrid.value}) matches neither valid reading; the difference is an artifact "
            "of applying the family-level threshold to individual conclusions."
        )
    notes = tuple(dict.fromkeys(n for d in decisions.values() for n in d.notes))
    return ReclassificationReport(family_id=family.id, decisions=decisions, narrative=narrative, notes=notes)
