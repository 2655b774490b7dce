"""Domain vocabulary: hypotheses, families, alpha policies, claims and decisions.

All types are frozen dataclasses. Constructors do not check ranges or
references; :func:`validate_plan` reports every violated invariant at once so
that a flawed plan can be diagnosed in a single pass.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Optional, Union

MAX_ID_LENGTH = 64
DEFAULT_NOMINAL_ALPHA = 0.05
SCHEMA_VERSION = 1


class DomainError(ValueError):
    """An argument lies outside the domain of a rate or decision function."""


class MissingPValueError(LookupError):
    """A hypothesis needed for a decision carries neither a p-value nor a band."""

    def __init__(self, hypothesis_id: str):
        super().__init__(f"hypothesis {hypothesis_id!r} has no p_value or p_band")
        self.hypothesis_id = hypothesis_id


class InferenceMode(str, Enum):
    INDIVIDUAL = "individual"
    UNION_INTERSECTION = "union_intersection"


class Outcome(str, Enum):
    REJECT = "reject"
    FAIL_TO_REJECT = "fail_to_reject"
    INDETERMINATE = "indeterminate"


class Support(str, Enum):
    FULL = "full"
    PARTIAL = "partial"
    NONE = "none"
    INDETERMINATE = "indeterminate"


class DecisionBasis(str, Enum):
    JOINT_UNION_INTERSECTION = "joint"
    INDIVIDUAL_AT_NOMINAL = "individual"
    HYBRID_AS_REPORTED = "hybrid"


# -- alpha policies ---------------------------------------------------------


@dataclass(frozen=True)
class Unadjusted:
    alpha_individual: float

    @property
    def alpha(self) -> float:
        return self.alpha_individual


@dataclass(frozen=True)
class Sidak:
    alpha_joint: float

    @property
    def alpha(self) -> float:
        return self.alpha_joint


@dataclass(frozen=True)
class Bonferroni:
    alpha_joint: float

    @property
    def alpha(self) -> float:
        return self.alpha_joint


@dataclass(frozen=True)
class Specified:
    """A stringent per-test level chosen up front, not derived from k.

    ``derived_from_correction`` marks a level that was in fact obtained by
    dividing down a conventional alpha; the linter treats only those as
    adjustments.
    """

    alpha_constituent: float
    derived_from_correction: bool = False

    @property
    def alpha(self) -> float:
        return self.alpha_constituent


AlphaPolicy = Union[Unadjusted, Sidak, Bonferroni, Specified]

POLICY_NAMES = {Unadjusted: "unadjusted", Sidak: "sidak", Bonferroni: "bonferroni", Specified: "specified"}


def policy_name(policy: AlphaPolicy) -> str:
    return POLICY_NAMES[type(policy)]


def describe_policy(policy: AlphaPolicy) -> str:
    return f"{policy_name(policy)}({policy.alpha:g})"


# -- plan structure ---------------------------------------------------------


@dataclass(frozen=True)
class PBand:
    """Half-open interval ``[lower, upper)`` known to contain the p-value."""

    lower: float
    upper: float


@dataclass(frozen=True)
class Hypothesis:
    id: str
    label: str = ""
    p_value: Optional[float] = None
    p_band: Optional[PBand] = None

    @property
    def has_result(self) -> bool:
        return self.p_value is not None or self.p_band is not None


@dataclass(frozen=True)
class Family:
    id: str
    members: tuple[str, ...]
    mode: InferenceMode
    policy: AlphaPolicy

    @property
    def k(self) -> int:
        return len(self.members)

    @property
    def effective_k(self) -> int:
        """Multiplicity used when resolving the policy.

        An individual-mode family makes one inference per member, so each
        inference rests on a single test.
        """
        return self.k if self.mode is InferenceMode.UNION_INTERSECTION else 1


@dataclass(frozen=True)
class Target:
    """What a reported inference is about: one hypothesis or one whole family."""

    kind: str  # "hypothesis" | "family"
    id: str

    @property
    def is_joint(self) -> bool:
        return self.kind == "family"


@dataclass(frozen=True)
class InferenceClaim:
    target: Target
    claimed_alpha: float
    claimed_outcome: Outcome


@dataclass(frozen=True)
class DescribedAnalysis:
    """A structured extract of how someone justified a correction.

    ``claim`` is what the author asserted about each separate inference:
    ``"inflated_individual_rate"``, ``"inflated_family_rate"`` or ``None``.
    """

    n_inferences: int
    tests_per_inference: int
    k_used_for_correction: int
    rate_type: str = "FWER"
    alpha: float = DEFAULT_NOMINAL_ALPHA
    claim: Optional[str] = None
    label: str = ""


@dataclass(frozen=True)
class TestingPlan:
    __test__ = False  # keep pytest from collecting this class

    hypotheses: tuple[Hypothesis, ...]
    families: tuple[Family, ...]
    reported_inferences: tuple[InferenceClaim, ...] = ()
    nominal_alpha: float = DEFAULT_NOMINAL_ALPHA
    described_analyses: tuple[DescribedAnalysis, ...] = ()
    schema_version: int = SCHEMA_VERSION

    def hypothesis(self, hid: str) -> Hypothesis:
        for h in self.hypotheses:
            if h.id == hid:
                return h
        raise KeyError(hid)

    def family(self, fid: str) -> Family:
        for f in self.families:
            if f.id == fid:
                return f
        raise KeyError(fid)

    def family_of(self, hid: str) -> Optional[Family]:
        for f in self.families:
            if hid in f.members:
                return f
        return None


# -- decisions --------------------------------------------------------------


@dataclass(frozen=True)
class FamilyDecision:
    family_id: str
    basis: DecisionBasis
    resolved_alpha_constituent: float
    per_member_outcome: dict[str, Outcome]
    support: Support
    joint_outcome: Optional[Outcome] = None
    notes: tuple[str, ...] = field(default=())


# -- validation -------------------------------------------------------------


@dataclass(frozen=True)
class PlanError:
    field: str
    rule: str

    def __str__(self) -> str:
        return f"{self.field}: {self.rule}"


def _is_probability(x) -> bool:
    return isinstance(x, (int, float)) and not isinstance(x, bool) and math.isfinite(x)


def _open_unit(x) -> bool:
    return _is_probability(x) and 0.0 < x < 1.0


def _check_id(value, where: str, errors: list[PlanError]) -> None:
    if not isinstance(value, str) or not value:
        errors.append(PlanError(where, "identifier must be a non-empty string"))
    elif len(value) > MAX_ID_LENGTH:
        errors.append(PlanError(where, f"identifier longer than {MAX_ID_LENGTH} characters"))


def _check_policy(policy, where: str, errors: list[PlanError]) -> None:
    if not isinstance(policy, tuple(POLICY_NAMES)):
        errors.append(PlanError(where, "unknown alpha policy"))
        return
    if not _open_unit(policy.alpha):
        errors.append(PlanError(where, "policy alpha must be in (0,1)"))


def validate_plan(plan: TestingPlan) -> list[PlanError]:
    """Return every violated structural invariant of ``plan``; empty if none."""
    errors: list[PlanError] = []
    if plan.schema_version != SCHEMA_VERSION:
        errors.append(PlanError("schema_version", f"unsupported version {plan.schema_version!r}"))
    if not _open_unit(plan.nominal_alpha):
        errors.append(PlanError("nominal_alpha", "nominal_alpha must be in (0,1)"))

    seen: set[str] = set()
    for i, h in enumerate(plan.hypotheses):
        where = f"hypotheses[{i}]"
        _check_id(h.id, f"{where}.id", errors)
        if h.id in seen:
            errors.append(PlanError(f"{where}.id", f"duplicate hypothesis id {h.id}"))
        seen.add(h.id)
        if h.p_value is not None and h.p_band is not None:
            errors.append(PlanError(where, "only one of p_value and p_band may be given"))
        if h.p_value is not None and not (_is_probability(h.p_value) and 0.0 < h.p_value <= 1.0):
            errors.append(PlanError(f"{where}.p_value", "p_value must be in (0,1]"))
        if h.p_band is not None:
            lo, hi = h.p_band.lower, h.p_band.upper
            if not (_is_probability(lo) and _is_probability(hi) and 0.0 <= lo < hi <= 1.0):
                errors.append(PlanError(f"{where}.p_band", "p_band requires 0 <= lower < upper <= 1"))

    family_ids: set[str] = set()
    owner: dict[str, str] = {}
    for i, f in enumerate(plan.families):
        where = f"families[{i}]"
        _check_id(f.id, f"{where}.id", errors)
        if f.id in family_ids:
            errors.append(PlanError(f"{where}.id", f"duplicate family id {f.id}"))
        family_ids.add(f.id)
        if not isinstance(f.mode, InferenceMode):
            errors.append(PlanError(f"{where}.mode", "mode must be individual or union_intersection"))
        _check_policy(f.policy, f"{where}.policy", errors)
        if len(f.members) < 1:
            errors.append(PlanError(f"{where}.members", "family must have at least one member (k >= 1)"))
        if len(set(f.members)) != len(f.members):
            errors.append(PlanError(f"{where}.members", "duplicate member"))
        for m in f.members:
            if m not in seen:
                errors.append(PlanError(f"{where}.members", f"unresolved member {m}"))
            elif m in owner and owner[m] != f.id:
                errors.append(PlanError(f"{where}.members", f"hypothesis {m} already belongs to family {owner[m]}"))
            else:
                owner[m] = f.id

    for i, c in enumerate(plan.reported_inferences):
        where = f"reported_inferences[{i}]"
        if c.target.kind == "hypothesis":
            if c.target.id not in seen:
                errors.append(PlanError(f"{where}.target", f"unresolved hypothesis {c.target.id}"))
        elif c.target.kind == "family":
            if c.target.id not in family_ids:
                errors.append(PlanError(f"{where}.target", f"unresolved family {c.target.id}"))
        else:
            errors.append(PlanError(f"{where}.target", "target must name a hypothesis or a family"))
        if not _open_unit(c.claimed_alpha):
            errors.append(PlanError(f"{where}.claimed_alpha", "claimed_alpha must be in (0,1)"))
        if c.claimed_outcome not in (Outcome.REJECT, Outcome.FAIL_TO_REJECT):
            errors.append(PlanError(f"{where}.claimed_outcome", "claimed_outcome must be reject or fail_to_reject"))

    for i, a in enumerate(plan.described_analyses):
        where = f"described_analyses[{i}]"
        for name in ("n_inferences", "tests_per_inference", "k_used_for_correction"):
            v = getattr(a, name)
            if not isinstance(v, int) or isinstance(v, bool) or v < 1:
                errors.append(PlanError(f"{where}.{name}", f"{name} must be an integer >= 1"))
        if a.rate_type not in ("FWER", "PFER"):
            errors.append(PlanError(f"{where}.rate_type", "rate_type must be FWER or PFER"))
        if not _open_unit(a.alpha):
            errors.append(PlanError(f"{where}.alpha", "alpha must be in (0,1)"))
        if a.claim not in (None, "inflated_individual_rate", "inflated_family_rate"):
            errors.append(PlanError(f"{where}.claim", "unknown claim"))
    return errors
