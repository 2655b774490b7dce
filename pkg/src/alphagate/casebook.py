"""Published cases shipped as plan documents, with their expected readings."""

from __future__ import annotations

import json
from dataclasses import dataclass
from importlib import resources

from .lint import FindingCode, LintFinding, LintNote, ReclassificationReport, lint_notes, lint_plan, reclassify
from .model import DecisionBasis, Support, TestingPlan, validate_plan
from .planio import plan_from_dict

CASE_IDS = ("gender_example", "prem_2021_h4", "clemens_2023_h1b", "janssen_2023_exp2")


class UnknownCaseError(LookupError):
    pass


@dataclass(frozen=True)
class CaseFixture:
    case_id: str
    plan: TestingPlan
    expected: dict[DecisionBasis, Support]
    provenance: str
    expect_redundant_correction: bool


@dataclass(frozen=True)
class CaseResult:
    fixture: CaseFixture
    reports: tuple[ReclassificationReport, ...]
    findings: tuple[LintFinding, ...]
    notes: tuple[LintNote, ...]

    @property
    def report(self) -> ReclassificationReport:
        return self.reports[0]

    @property
    def matches_expected(self) -> bool:
        has_redundant = any(f.code is FindingCode.REDUNDANT_CORRECTION for f in self.findings)
        return (
            self.report.supports == self.fixture.expected
            and has_redundant == self.fixture.expect_redundant_correction
        )


def load_case(case_id: str) -> CaseFixture:
    if case_id not in CASE_IDS:
        raise UnknownCaseError(f"unknown case {case_id!r}; known: {', '.join(CASE_IDS)}")
    raw = json.loads(resources.files(__package__).joinpath("cases", f"{case_id}.json").read_text(encoding="utf-8"))
    plan = plan_from_dict(raw["plan"])
    errors = validate_plan(plan)
    if errors:
        raise ValueError(f"fixture {case_id} is invalid: {'; '.join(map(str, errors))}")
    expected = {DecisionBasis(b): Support(s) for b, s in raw["expected"].items()}
    if set(expected) != set(DecisionBasis):
        raise ValueError(f"fixture {case_id} must give an expected label for every basis")
    return CaseFixture(
        case_id=raw["case_id"],
        plan=plan,
        expected=expected,
        provenance=raw["provenance"],
        expect_redundant_correction=raw["expect_redundant_correction"],
    )


def run_case(case_id: str) -> CaseResult:
    fixture = load_case(case_id)
    plan = fixture.plan
    return CaseResult(
        fixture=fixture,
        reports=tuple(reclassify(f, plan) for f in plan.families),
        findings=tuple(lint_plan(plan)),
        notes=tuple(lint_notes(plan)),
    )
