import json

import pytest

from alphagate.model import (
    Bonferroni,
    Family,
    Hypothesis,
    InferenceClaim,
    InferenceMode,
    Outcome,
    PBand,
    Sidak,
    Target,
    TestingPlan,
    Unadjusted,
)


def make_plan(p_values, policy=None, mode=InferenceMode.UNION_INTERSECTION, claims="individual", family_id="F"):
    """A one-family plan over hypotheses H1..Hk."""
    hyps = []
    for i, p in enumerate(p_values, start=1):
        if isinstance(p, PBand):
            hyps.append(Hypothesis(f"H{i}", p_band=p))
        else:
            hyps.append(Hypothesis(f"H{i}", p_value=p))
    ids = tuple(h.id for h in hyps)
    family = Family(family_id, ids, mode, policy or Bonferroni(0.05))
    if claims == "individual":
        reported = tuple(InferenceClaim(Target("hypothesis", h), 0.025, Outcome.REJECT) for h in ids)
    elif claims == "joint":
        reported = (InferenceClaim(Target("family", family_id), 0.05, Outcome.REJECT),)
    elif claims == "both":
        reported = (InferenceClaim(Target("family", family_id), 0.05, Outcome.REJECT),) + tuple(
            InferenceClaim(Target("hypothesis", h), 0.025, Outcome.REJECT) for h in ids
        )
    else:
        reported = ()
    return TestingPlan(hypotheses=tuple(hyps), families=(family,), reported_inferences=reported)


@pytest.fixture
def three_hypothesis_plan():
    return make_plan([0.011, 0.979, 0.150], Sidak(0.05), claims="joint")


@pytest.fixture
def janssen_plan():
    return make_plan([0.003, 0.048], Bonferroni(0.05))


@pytest.fixture
def write_plan(tmp_path):
    def _write(obj, name="plan.json"):
        path = tmp_path / name
        path.write_text(obj if isinstance(obj, str) else json.dumps(obj))
        return str(path)

    return _write


def pytest_terminal_summary(terminalreporter):
    lines = []
    for outcome in ("passed", "failed"):
        for rep in terminalreporter.stats.get(outcome, []):
            if rep.when == "call" and "test_acceptance.py" in rep.nodeid:
                lines.append((rep.nodeid.split("::", 1)[1], outcome.upper()[:4]))
    if lines:
        terminalreporter.section("acceptance criteria")
        for name, status in sorted(lines):
            terminalreporter.write_line(f"{status}  {name}")
