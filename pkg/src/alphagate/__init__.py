"""Decide when a multiple-testing correction is needed, compute it, and check it by simulation."""

__version__ = "0.1.0"

from .decisions import (
    decide_hybrid,
    decide_individual,
    decide_union_intersection,
    evaluate_family,
    summarize_support,
)
from .lint import FindingCode, LintFinding, ReclassificationReport, classify_confusion, lint_plan, reclassify
from .model import (
    Bonferroni,
    DecisionBasis,
    DescribedAnalysis,
    DomainError,
    Family,
    FamilyDecision,
    Hypothesis,
    InferenceClaim,
    InferenceMode,
    MissingPValueError,
    Outcome,
    PBand,
    Sidak,
    Specified,
    Support,
    Target,
    TestingPlan,
    Unadjusted,
    validate_plan,
)
from .planio import PlanFormatError, emit_plan, load_plan, parse_plan
from .rates import RatePair, bonferroni_adjust, fwer_independent, pfer, rates_for_family, resolve_policy, sidak_adjust
