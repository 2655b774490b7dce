"""Command-line entry point: ``alphagate {adjust,decide,lint,simulate,case}``.

Exit codes: 0 success, 1 findings under ``lint --strict``, 2 usage, parse,
validation or domain errors, 3 p-values missing for a decision.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
from typing import Optional, Sequence

from . import __version__
from .casebook import CASE_IDS, CaseResult, UnknownCaseError, run_case
from .decisions import evaluate_family
from .lint import LintFinding, LintNote, ReclassificationReport, lint_notes, lint_plan, reclassify
from .model import (
    Bonferroni,
    DecisionBasis,
    DomainError,
    FamilyDecision,
    MissingPValueError,
    Sidak,
    Specified,
    Unadjusted,
    describe_policy,
    validate_plan,
)
from .planio import PlanFormatError, emit_plan, load_plan
from .rates import fwer_independent, pfer, resolve_policy
from .simulation import CSV_COLUMNS, SimulationConfig, SimulationReport, simulate_rates

OUTPUT_SCHEMA_VERSION = 1
SEED_ENV = "ALPHAGATE_SEED"

EXIT_OK, EXIT_FINDINGS, EXIT_USAGE, EXIT_INCOMPLETE = 0, 1, 2, 3


class UsageError(Exception):
    pass


def fmt(x) -> str:
    if x is None:
        return "-"
    if isinstance(x, float):
        return f"{x:.6g}"
    if isinstance(x, (list, tuple)):
        return ", ".join(fmt(v) for v in x) or "-"
    return str(x)


def _envelope(command: str, **payload) -> dict:
    return {"schema": f"alphagate.{command}", "schema_version": OUTPUT_SCHEMA_VERSION, **payload}


def _dump_json(obj: dict) -> str:
    return json.dumps(obj, indent=2) + "\n"


def _md_table(header: Sequence[str], rows: Sequence[Sequence]) -> str:
    lines = ["| " + " | ".join(header) + " |", "|" + "---|" * len(header)]
    lines += ["| " + " | ".join(fmt(c) for c in r) + " |" for r in rows]
    return "\n".join(lines) + "\n"


def _csv(columns: Sequence[str], rows: Sequence[dict]) -> str:
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=list(columns), lineterminator="\n")
    w.writeheader()
    for r in rows:
        w.writerow({c: ("" if r[c] is None else r[c]) for c in columns})
    return buf.getvalue()


# -- serialisers ------------------------------------------------------------


def decision_to_dict(d: FamilyDecision) -> dict:
    return {
        "family_id": d.family_id,
        "basis": d.basis.value,
        "resolved_alpha_constituent": d.resolved_alpha_constituent,
        "per_member_outcome": {m: o.value for m, o in d.per_member_outcome.items()},
        "joint_outcome": None if d.joint_outcome is None else d.joint_outcome.value,
        "support": d.support.value,
        "notes": list(d.notes),
    }


def report_to_dict(r: ReclassificationReport) -> dict:
    return {
        "family_id": r.family_id,
        "decisions": {b.value: decision_to_dict(d) for b, d in r.decisions.items()},
        "narrative": r.narrative,
    }


def _decisions_md(decisions: Sequence[FamilyDecision]) -> str:
    rows = []
    for d in decisions:
        outcomes = ", ".join(f"{m}={o.value}" for m, o in d.per_member_outcome.items())
        joint = d.joint_outcome.value if d.joint_outcome else "-"
        rows.append((d.family_id, d.basis.value, d.resolved_alpha_constituent, outcomes, joint, d.support.value))
    out = _md_table(("family", "basis", "alpha", "member outcomes", "joint", "support"), rows)
    notes = dict.fromkeys(n for d in decisions for n in d.notes)
    if notes:
        out += "\n" + "".join(f"- note: {n}\n" for n in notes)
    return out


def _findings_md(findings: Sequence[LintFinding], notes: Sequence[LintNote]) -> str:
    if not findings:
        out = "No findings.\n"
    else:
        out = ""
        for f in findings:
            where = f.family_id or f.reference or "-"
            out += f"### {f.code.value} ({where})\n\n{f.explanation}\n\n"
            out += _md_table(("quantity", "value"), [(k, v) for k, v in f.quantities.items()]) + "\n"
    for n in notes:
        out += f"- note ({n.family_id}): {n.text}\n"
    return out


# -- commands ---------------------------------------------------------------


def _require_format(args, allowed: Sequence[str]) -> None:
    if args.format not in allowed:
        raise UsageError(f"--format {args.format} is not available for '{args.command}' (use {', '.join(allowed)})")


def cmd_adjust(args) -> tuple[str, int]:
    policy = Sidak(args.alpha_joint) if args.method == "sidak" else Bonferroni(args.alpha_joint)
    a = resolve_policy(policy, args.k)
    row = {
        "method": args.method,
        "alpha_joint": args.alpha_joint,
        "k": args.k,
        "alpha_constituent": a,
        "fwer": fwer_independent(a, args.k),
        "pfer": pfer(a, args.k),
    }
    if args.format == "csv":
        return _csv(list(row), [row]), EXIT_OK
    if args.format == "markdown":
        return _md_table(list(row), [list(row.values())]), EXIT_OK
    return _dump_json(_envelope("adjust", **row)), EXIT_OK


def _load_valid_plan(path: str):
    try:
        plan = load_plan(path)
    except OSError as exc:
        raise UsageError(f"cannot read plan: {exc}") from None
    except PlanFormatError as exc:
        raise UsageError(f"plan parse error: {exc}") from None
    errors = validate_plan(plan)
    if errors:
        raise UsageError("plan validation failed:\n" + "\n".join(f"  {e}" for e in errors))
    return plan


def cmd_decide(args) -> tuple[str, int]:
    _require_format(args, ("json", "markdown"))
    plan = _load_valid_plan(args.plan)
    bases = list(DecisionBasis) if args.basis == "all" else [DecisionBasis(args.basis)]
    if args.basis == "all":
        reports = [reclassify(f, plan) for f in plan.families]
        decisions = [d for r in reports for d in r.decisions.values()]
        if args.format == "markdown":
            return _decisions_md(decisions) + "\n" + "".join(f"- {r.family_id}: {r.narrative}\n" for r in reports), EXIT_OK
        return _dump_json(_envelope("decide", basis="all", reports=[report_to_dict(r) for r in reports])), EXIT_OK
    decisions = [evaluate_family(f, plan, b) for f in plan.families for b in bases]
    if args.format == "markdown":
        return _decisions_md(decisions), EXIT_OK
    return _dump_json(_envelope("decide", basis=args.basis, decisions=[decision_to_dict(d) for d in decisions])), EXIT_OK


def cmd_lint(args) -> tuple[str, int]:
    _require_format(args, ("json", "markdown"))
    plan = _load_valid_plan(args.plan)
    findings, notes = lint_plan(plan), lint_notes(plan)
    code = EXIT_FINDINGS if (findings and args.strict) else EXIT_OK
    if args.format == "markdown":
        return _findings_md(findings, notes), code
    payload = _envelope("lint", findings=[f.to_dict() for f in findings], notes=[n.to_dict() for n in notes])
    return _dump_json(payload), code


def _policy_from_flags(name: str, alpha: float, derived: bool = False):
    return {
        "unadjusted": lambda: Unadjusted(alpha),
        "sidak": lambda: Sidak(alpha),
        "bonferroni": lambda: Bonferroni(alpha),
        "specified": lambda: Specified(alpha, derived),
    }[name]()


def _parse_deltas(text: Optional[str], k: int) -> tuple[float, ...]:
    if text is None:
        return (0.0,) * k
    try:
        values = tuple(float(x) for x in text.split(","))
    except ValueError:
        raise UsageError(f"--delta must be a comma-separated list of numbers, got {text!r}") from None
    if len(values) == 1:
        return values * k
    return values


def _seed(args) -> int:
    if args.seed is not None:
        return args.seed
    env = os.environ.get(SEED_ENV)
    if env is None:
        return 0
    try:
        return int(env)
    except ValueError:
        raise UsageError(f"{SEED_ENV} must be an integer, got {env!r}") from None


def _simulation_md(r: SimulationReport) -> str:
    cfg = r.config
    head = (
        f"k={cfg.k}, rho={fmt(cfg.correlation)}, policy={describe_policy(cfg.policy)}, "
        f"alpha_resolved={fmt(r.alpha_resolved)}, replications={cfg.replications}, seed={cfg.seed}\n\n"
    )
    rows = [(row["metric"], row["estimate"], row["se"], row["analytic"]) for row in r.csv_rows()]
    return head + _md_table(("metric", "estimate", "se", "analytic"), rows) + "".join(f"\n- {n}" for n in r.notes) + "\n"


def cmd_simulate(args) -> tuple[str, int]:
    config = SimulationConfig(
        k=args.k,
        policy=_policy_from_flags(args.policy, args.alpha),
        effect_sizes=_parse_deltas(args.delta, args.k),
        correlation=args.rho,
        nominal_alpha=args.nominal_alpha,
        replications=args.reps,
        seed=_seed(args),
    )
    report = simulate_rates(config, workers=args.workers)
    if args.format == "csv":
        return _csv(CSV_COLUMNS, report.csv_rows()), EXIT_OK
    if args.format == "markdown":
        return _simulation_md(report), EXIT_OK
    return _dump_json(_envelope("simulate", **report.to_dict())), EXIT_OK


def case_to_dict(result: CaseResult) -> dict:
    fx = result.fixture
    return {
        "case_id": fx.case_id,
        "provenance": fx.provenance,
        "expected": {b.value: s.value for b, s in fx.expected.items()},
        "matches_expected": result.matches_expected,
        "reports": [report_to_dict(r) for r in result.reports],
        "findings": [f.to_dict() for f in result.findings],
        "notes": [n.to_dict() for n in result.notes],
    }


def cmd_case(args) -> tuple[str, int]:
    _require_format(args, ("json", "markdown"))
    try:
        result = run_case(args.id)
    except UnknownCaseError as exc:
        raise UsageError(str(exc)) from None
    if args.emit_plan:
        return emit_plan(result.fixture.plan), EXIT_OK
    if args.format == "markdown":
        fx = result.fixture
        out = f"## {fx.case_id}\n\n{fx.provenance}\n\n"
        out += _decisions_md([d for r in result.reports for d in r.decisions.values()])
        out += "".join(f"\n{r.narrative}\n" for r in result.reports) + "\n"
        out += _findings_md(result.findings, result.notes)
        return out, EXIT_OK
    return _dump_json(_envelope("case", **case_to_dict(result))), EXIT_OK


# -- argument parsing -------------------------------------------------------


def _probability(text: str) -> float:
    try:
        v = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if not 0.0 < v < 1.0:
        raise argparse.ArgumentTypeError(f"must be in (0,1), got {text}")
    return v


def _positive_int(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if v < 1:
        raise argparse.ArgumentTypeError(f"must be >= 1, got {text}")
    return v


def _correlation(text: str) -> float:
    try:
        v = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if not 0.0 <= v < 1.0:
        raise argparse.ArgumentTypeError(f"must be in [0,1), got {text}")
    return v


def _seed_arg(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if not 0 <= v < 2**64:
        raise argparse.ArgumentTypeError("seed must be an unsigned 64-bit integer")
    return v


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="alphagate", description="Decide when multiple-testing corrections apply.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    formats = ("json", "csv", "markdown")

    p = sub.add_parser("adjust", help="per-test alpha for a joint alpha and family size")
    p.add_argument("--alpha-joint", type=_probability, required=True)
    p.add_argument("--k", type=_positive_int, required=True)
    p.add_argument("--method", choices=("sidak", "bonferroni"), required=True)
    p.add_argument("--format", choices=formats, default="json")
    p.set_defaults(func=cmd_adjust)

    p = sub.add_parser("decide", help="evaluate a plan's families under one or all decision bases")
    p.add_argument("--plan", required=True)
    p.add_argument("--basis", choices=("joint", "individual", "hybrid", "all"), default="all")
    p.add_argument("--format", choices=formats, default="json")
    p.set_defaults(func=cmd_decide)

    p = sub.add_parser("lint", help="find redundant corrections and error-rate confusions")
    p.add_argument("--plan", required=True)
    p.add_argument("--strict", action="store_true", help="exit 1 when there are findings")
    p.add_argument("--format", choices=formats, default="json")
    p.set_defaults(func=cmd_lint)

    p = sub.add_parser("simulate", help="Monte Carlo error rates and power")
    p.add_argument("--k", type=_positive_int, required=True)
    p.add_argument("--alpha", type=_probability, default=0.05, help="the policy's alpha")
    p.add_argument("--policy", choices=("unadjusted", "sidak", "bonferroni", "specified"), default="unadjusted")
    p.add_argument("--nominal-alpha", type=_probability, default=0.05)
    p.add_argument("--rho", type=_correlation, default=0.0)
    p.add_argument("--delta", help="comma-separated effect sizes (one value is broadcast to all k)")
    p.add_argument("--reps", type=_positive_int, default=100_000)
    p.add_argument("--seed", type=_seed_arg, default=None, help=f"defaults to ${SEED_ENV}, then 0")
    p.add_argument("--workers", type=_positive_int, default=None)
    p.add_argument("--format", choices=formats, default="json")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("case", help="replay a published case")
    p.add_argument("--id", required=True, help=f"one of {', '.join(CASE_IDS)}")
    p.add_argument("--emit-plan", action="store_true", help="print the case's plan document instead")
    p.add_argument("--format", choices=formats, default="json")
    p.set_defaults(func=cmd_case)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        text, code = args.func(args)
    except (UsageError, DomainError) as exc:
        print(f"alphagate {args.command}: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except MissingPValueError as exc:
        print(f"alphagate {args.command}: {exc}", file=sys.stderr)
        return EXIT_INCOMPLETE
    sys.stdout.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
