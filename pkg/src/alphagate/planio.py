"""JSON reading and writing of testing plans.

Structural problems (wrong types, missing or unknown keys) raise
:class:`PlanFormatError`. Range and reference checks are left to
:func:`alphagate.model.validate_plan`.
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import Any

from .model import (
    DEFAULT_NOMINAL_ALPHA,
    Bonferroni,
    DescribedAnalysis,
    Family,
    Hypothesis,
    InferenceClaim,
    InferenceMode,
    Outcome,
    PBand,
    Sidak,
    Specified,
    Target,
    TestingPlan,
    Unadjusted,
    policy_name,
)


class PlanFormatError(ValueError):
    pass


_POLICY_FIELDS = {
    "unadjusted": (Unadjusted, "alpha_individual"),
    "sidak": (Sidak, "alpha_joint"),
    "bonferroni": (Bonferroni, "alpha_joint"),
    "specified": (Specified, "alpha_constituent"),
}


def _keys(obj: Any, where: str, required: set[str], optional: set[str] = frozenset()) -> dict:
    if not isinstance(obj, dict):
        raise PlanFormatError(f"{where}: expected an object")
    missing = required - obj.keys()
    if missing:
        raise PlanFormatError(f"{where}: missing key(s) {sorted(missing)}")
    unknown = obj.keys() - required - optional
    if unknown:
        raise PlanFormatError(f"{where}: unknown key(s) {sorted(unknown)}")
    return obj


def _number(v: Any, where: str) -> float:
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise PlanFormatError(f"{where}: expected a number")
    return float(v)


def _integer(v: Any, where: str) -> int:
    if isinstance(v, bool) or not isinstance(v, int):
        raise PlanFormatError(f"{where}: expected an integer")
    return v


def _string(v: Any, where: str) -> str:
    if not isinstance(v, str):
        raise PlanFormatError(f"{where}: expected a string")
    return v


def _enum(cls, v: Any, where: str):
    try:
        return cls(v)
    except ValueError:
        choices = ", ".join(m.value for m in cls)
        raise PlanFormatError(f"{where}: expected one of {choices}") from None


def parse_policy(obj: Any, where: str = "policy"):
    if not isinstance(obj, dict) or "type" not in obj:
        raise PlanFormatError(f"{where}: expected an object with a 'type' key")
    kind = obj["type"]
    if kind not in _POLICY_FIELDS:
        raise PlanFormatError(f"{where}.type: expected one of {', '.join(_POLICY_FIELDS)}")
    cls, alpha_key = _POLICY_FIELDS[kind]
    if cls is Specified:
        _keys(obj, where, {"type", alpha_key}, {"derived_from_correction"})
        flag = obj.get("derived_from_correction", False)
        if not isinstance(flag, bool):
            raise PlanFormatError(f"{where}.derived_from_correction: expected a boolean")
        return Specified(_number(obj[alpha_key], f"{where}.{alpha_key}"), flag)
    _keys(obj, where, {"type", alpha_key})
    return cls(_number(obj[alpha_key], f"{where}.{alpha_key}"))


def emit_policy(policy) -> dict:
    kind = policy_name(policy)
    _, alpha_key = _POLICY_FIELDS[kind]
    out = {"type": kind, alpha_key: policy.alpha}
    if isinstance(policy, Specified):
        out["derived_from_correction"] = policy.derived_from_correction
    return out


def _parse_hypothesis(obj: Any, where: str) -> Hypothesis:
    _keys(obj, where, {"id"}, {"label", "p_value", "p_band"})
    p_value = obj.get("p_value")
    if p_value is not None:
        p_value = _number(p_value, f"{where}.p_value")
    band = obj.get("p_band")
    if band is not None:
        _keys(band, f"{where}.p_band", {"lower", "upper"})
        band = PBand(_number(band["lower"], f"{where}.p_band.lower"), _number(band["upper"], f"{where}.p_band.upper"))
    return Hypothesis(
        id=_string(obj["id"], f"{where}.id"),
        label=_string(obj.get("label", ""), f"{where}.label"),
        p_value=p_value,
        p_band=band,
    )


def _parse_family(obj: Any, where: str) -> Family:
    _keys(obj, where, {"id", "members", "mode", "policy"})
    members = obj["members"]
    if not isinstance(members, list):
        raise PlanFormatError(f"{where}.members: expected a list")
    return Family(
        id=_string(obj["id"], f"{where}.id"),
        members=tuple(_string(m, f"{where}.members[{j}]") for j, m in enumerate(members)),
        mode=_enum(InferenceMode, obj["mode"], f"{where}.mode"),
        policy=parse_policy(obj["policy"], f"{where}.policy"),
    )


def _parse_claim(obj: Any, where: str) -> InferenceClaim:
    _keys(obj, where, {"target", "claimed_alpha", "claimed_outcome"})
    target = obj["target"]
    if not isinstance(target, dict) or len(target) != 1 or not target.keys() <= {"hypothesis", "family"}:
        raise PlanFormatError(f"{where}.target: expected {{\"hypothesis\": id}} or {{\"family\": id}}")
    ((kind, tid),) = target.items()
    outcome = _enum(Outcome, obj["claimed_outcome"], f"{where}.claimed_outcome")
    return InferenceClaim(
        target=Target(kind, _string(tid, f"{where}.target.{kind}")),
        claimed_alpha=_number(obj["claimed_alpha"], f"{where}.claimed_alpha"),
        claimed_outcome=outcome,
    )


def _parse_analysis(obj: Any, where: str) -> DescribedAnalysis:
    _keys(
        obj,
        where,
        {"n_inferences", "tests_per_inference", "k_used_for_correction"},
        {"rate_type", "alpha", "claim", "label"},
    )
    claim = obj.get("claim")
    return DescribedAnalysis(
        n_inferences=_integer(obj["n_inferences"], f"{where}.n_inferences"),
        tests_per_inference=_integer(obj["tests_per_inference"], f"{where}.tests_per_inference"),
        k_used_for_correction=_integer(obj["k_used_for_correction"], f"{where}.k_used_for_correction"),
        rate_type=_string(obj.get("rate_type", "FWER"), f"{where}.rate_type"),
        alpha=_number(obj.get("alpha", DEFAULT_NOMINAL_ALPHA), f"{where}.alpha"),
        claim=None if claim is None else _string(claim, f"{where}.claim"),
        label=_string(obj.get("label", ""), f"{where}.label"),
    )


def _list(obj: dict, key: str) -> list:
    v = obj.get(key, [])
    if not isinstance(v, list):
        raise PlanFormatError(f"{key}: expected a list")
    return v


def plan_from_dict(obj: Any) -> TestingPlan:
    _keys(
        obj,
        "plan",
        {"schema_version", "hypotheses", "families", "reported_inferences"},
        {"nominal_alpha", "described_analyses"},
    )
    return TestingPlan(
        schema_version=_integer(obj["schema_version"], "schema_version"),
        hypotheses=tuple(_parse_hypothesis(h, f"hypotheses[{i}]") for i, h in enumerate(_list(obj, "hypotheses"))),
        families=tuple(_parse_family(f, f"families[{i}]") for i, f in enumerate(_list(obj, "families"))),
        reported_inferences=tuple(
            _parse_claim(c, f"reported_inferences[{i}]") for i, c in enumerate(_list(obj, "reported_inferences"))
        ),
        nominal_alpha=_number(obj.get("nominal_alpha", DEFAULT_NOMINAL_ALPHA), "nominal_alpha"),
        described_analyses=tuple(
            _parse_analysis(a, f"described_analyses[{i}]") for i, a in enumerate(_list(obj, "described_analyses"))
        ),
    )


def plan_to_dict(plan: TestingPlan) -> dict:
    hypotheses = []
    for h in plan.hypotheses:
        d: dict[str, Any] = {"id": h.id}
        if h.label:
            d["label"] = h.label
        if h.p_value is not None:
            d["p_value"] = h.p_value
        if h.p_band is not None:
            d["p_band"] = {"lower": h.p_band.lower, "upper": h.p_band.upper}
        hypotheses.append(d)
    out: dict[str, Any] = {
        "schema_version": plan.schema_version,
        "nominal_alpha": plan.nominal_alpha,
        "hypotheses": hypotheses,
        "families": [
            {"id": f.id, "members": list(f.members), "mode": f.mode.value, "policy": emit_policy(f.policy)}
            for f in plan.families
        ],
        "reported_inferences": [
            {
                "target": {c.target.kind: c.target.id},
                "claimed_alpha": c.claimed_alpha,
                "claimed_outcome": c.claimed_outcome.value,
            }
            for c in plan.reported_inferences
        ],
    }
    if plan.described_analyses:
        analyses = []
        for a in plan.described_analyses:
            d = {
                "n_inferences": a.n_inferences,
                "tests_per_inference": a.tests_per_inference,
                "k_used_for_correction": a.k_used_for_correction,
                "rate_type": a.rate_type,
                "alpha": a.alpha,
            }
            if a.claim is not None:
                d["claim"] = a.claim
            if a.label:
                d["label"] = a.label
            analyses.append(d)
        out["described_analyses"] = analyses
    return out


def parse_plan(text: str) -> TestingPlan:
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise PlanFormatError(f"invalid JSON: {exc}") from None
    return plan_from_dict(obj)


def emit_plan(plan: TestingPlan) -> str:
    return json.dumps(plan_to_dict(plan), indent=2) + "\n"


def load_plan(path) -> TestingPlan:
    return parse_plan(Path(path).read_text(encoding="utf-8"))
