import json
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ofl import UsageError
from ofl.actions import Action
from ofl.analysis import SamplePlan, estimate_strong
from ofl.metric import diameter
from ofl.solvers import (TRACE_COLUMNS, SolverConfig, SolverTrace, classify_outcome, lifschitz_iteration,
                         orbit_center_iteration, picard, residual, trace_csv)
from ofl.spaces import EuclideanSpace, IntervalSpace, LpSpace
from ofl.spaces.sequences import EventuallyConstSeqSpace, seq

IV = IntervalSpace()
PM = IntervalSpace(-1, 1)
E2 = EuclideanSpace(2)
CFG = SolverConfig()


def converged_to(trace, target, tol=1e-5):
    return trace.outcome.kind == "converged" and abs(float(trace.final) - target) < tol


def test_picard_examples():
    assert converged_to(picard(Action(PM, [{"name": "sa", "a": "1/2"}]), 0.7), 0.0)
    tr = picard(Action(IV, ["step"]), 0.3)
    assert tr.outcome.kind == "cycle_detected" and tr.outcome.period == 2
    assert set(tr.iterates[1:]) == {0.0, 1.0}
    assert converged_to(picard(Action(IV, ["square"]), 0.9), 0.0)


def test_picard_with_explicit_word():
    act = Action(IV, ["square"])
    tr = picard(act, 0.9, CFG.replace(word=(3,)))
    assert tr.iterates[1] == pytest.approx(0.9 ** 8)
    assert tr.notes == ["word=[3]"]


def test_orbit_center_examples():
    sq = orbit_center_iteration(Action(IV, ["square"]), 0.9)
    assert converged_to(sq, 0.0, 1e-12) and residual(Action(IV, ["square"]), sq.final) < CFG.epsilon
    step = orbit_center_iteration(Action(IV, ["step"]), 0.3)
    assert step.outcome.kind in ("cycle_detected", "budget_exhausted")
    prus = orbit_center_iteration(Action(EventuallyConstSeqSpace(), ["prus"]), seq(), CFG.replace(max_iter=40))
    assert prus.outcome.kind == "budget_exhausted"
    assert min(prus.residuals) > 0.05


def test_orbit_center_reports_unsupported_centers():
    act = Action(LpSpace(4, 1.5), [{"name": "shift_lp", "N": 4}])
    tr = orbit_center_iteration(act, np.array([0.5, 0.0, 0.0, 0.0]), CFG.replace(horizon=8, max_iter=3))
    assert tr.outcome.kind in ("unsupported", "cycle_detected", "budget_exhausted")
    assert tr.outcome.kind != "converged"


def test_lifschitz_examples():
    sq = lifschitz_iteration(Action(IV, ["square"]), 0.9, CFG.replace(k=1.5))
    assert converged_to(sq, 0.0)
    sa = lifschitz_iteration(Action(PM, [{"name": "sa", "a": "3/5"}]), Fraction(1, 2), CFG.replace(k=1.8, max_iter=500))
    assert converged_to(sa, 0.0)
    step = lifschitz_iteration(Action(IV, ["step"]), 0.3, CFG.replace(k=1.9))
    assert step.outcome.kind != "converged"
    assert "single oracle route, no case split" in step.notes


def test_lifschitz_without_oracle_is_unsupported():
    act = Action(EventuallyConstSeqSpace(), ["prus"])
    tr = lifschitz_iteration(act, seq())
    assert tr.outcome.kind == "unsupported" and tr.outcome.reason


def test_lifschitz_refusal_is_unsupported():
    from ofl.spaces import MaxNormSpace
    # away from the box faces the square lens is 2(1 + mu) r wide across the offset axis
    act = Action(MaxNormSpace(2, lo=[-5, -5], hi=[5, 5]), [{"name": "contraction", "factor": 0.5}])
    tr = lifschitz_iteration(act, np.array([0.8, 0.0]), CFG.replace(k=1.5))
    assert tr.outcome.kind == "unsupported" and "refused" in tr.outcome.reason


def _trace(points, space=IV, residuals=None):
    tr = SolverTrace("manual", space)
    for i, p in enumerate(points):
        tr.iterates.append(p)
        tr.steps.append({"j": i, "residual": 1.0 if residuals is None else residuals[i], "self_radius": 1.0})
    return tr


def test_classify_examples():
    assert classify_outcome(_trace([0.0, 0.0, 0.0], residuals=[0, 0, 0]), CFG).kind == "converged"
    out = classify_outcome(_trace([0.0, 1.0, 0.0, 1.0]), CFG)
    assert out.kind == "cycle_detected" and out.period == 2 and str(out) == "cycle_detected(period=2)"
    tr = _trace([0.1, 0.2, 0.3])
    tr.diverged_reason = "grew"
    assert classify_outcome(tr, CFG).kind == "diverged"
    assert classify_outcome(_trace([0.1, 0.2, 0.3]), CFG).kind == "budget_exhausted"
    tr.unsupported_reason = "no oracle"
    assert classify_outcome(tr, CFG).kind == "unsupported"


def test_prus_picard_trace_plateaus_at_one():
    act = Action(EventuallyConstSeqSpace(), ["prus"])
    tr = picard(act, seq(), CFG.replace(max_iter=60))
    assert tr.outcome.kind == "budget_exhausted" and set(tr.residuals) == {1.0}


CONVERGING = [
    ("square", lambda: Action(IV, ["square"]), 0.9),
    ("sa", lambda: Action(PM, [{"name": "sa", "a": "3/5"}]), 0.7),
    ("contraction", lambda: Action(E2, [{"name": "contraction", "factor": 0.5}]), np.array([0.5, 0.3])),
    ("rotations", lambda: Action(E2, [{"name": "rotation", "angle": 0.4}, {"name": "rotation", "angle": 1.3}],
                                 law="commuting", horizon=6), np.array([0.5, 0.3])),
]


@pytest.mark.parametrize("name,make,x0", CONVERGING, ids=[c[0] for c in CONVERGING])
def test_converged_runs_pass_an_independent_residual_check(name, make, x0):
    act = make()
    cfg = CFG.replace(horizon=min(64, act.horizon), k=1.5)
    for solver in (picard, orbit_center_iteration, lifschitz_iteration):
        tr = solver(act, x0, cfg)
        if tr.outcome.kind == "converged":
            x = tr.final
            assert all(act.space.distance(x, g(x)) < cfg.epsilon for g in act.generators)


@pytest.mark.parametrize("name,make,x0", CONVERGING, ids=[c[0] for c in CONVERGING])
def test_lifschitz_step_invariants(name, make, x0):
    act = make()
    tr = lifschitz_iteration(act, x0, CFG.replace(horizon=min(64, act.horizon), k=1.2 if name != "sa" else 1.8))
    assert tr.outcome.kind == "converged"
    st_ = tr.steps
    for a, b in zip(st_, st_[1:]):
        assert b["r_est"] <= a["alpha"] * a["r_est"] + 1e-6
        assert b["step"] <= a["step_bound"] + 1e-9
        assert a["step_bound"] == pytest.approx((a["alpha"] + 1 + CFG.mu) * a["r_est"])


@pytest.mark.parametrize("make,x0", [
    (lambda: Action(IV, ["square"]), 0.9),
    (lambda: Action(PM, [{"name": "sa", "a": "3/5"}]), 0.7),
    (lambda: Action(IV, [{"name": "contraction", "factor": 0.8, "center": 0.3}]), 0.9),
    (lambda: Action(E2, [{"name": "rotation", "angle": 0.9}]), np.array([0.4, -0.2])),
])
def test_orbit_diameter_bounded_by_strong_constant(make, x0):
    act = make()
    k = estimate_strong(act, SamplePlan(n_pairs=64, horizon=32)).value
    tr = orbit_center_iteration(act, x0, CFG.replace(horizon=32))
    for s in tr.steps:
        # pairs involving x itself are bounded by D(x, o(x)), so the factor is never below one
        assert s["orbit_diameter"] <= max(k, 1.0) * s["self_radius"] + 1e-9


@settings(max_examples=25)
@given(st.floats(0.05, 0.95), st.floats(-1, 1), st.floats(-1, 1))
def test_contraction_ratios_respect_the_normal_structure_bound(f, a, b):
    act = Action(E2, [{"name": "contraction", "factor": f, "center": 0.0}])
    x0 = np.array([a, b]) * 0.7
    tr = orbit_center_iteration(act, x0, CFG.replace(horizon=16, max_iter=20))
    c = E2.reference_constants()["normal_coeff"] * f ** 2
    for s in tr.steps:
        if s.get("ratio") is not None:
            assert s["ratio"] <= c + 0.05


def test_orbit_center_divergence_on_unbounded_orbits():
    act = Action(EuclideanSpace(2, radius=1.0), [{"name": "rotation", "angle": 0.3}])
    tr = orbit_center_iteration(act, np.array([0.9, 0.0]), CFG.replace(horizon=8, max_iter=5))
    assert diameter(E2, act.orbit(tr.iterates[0], 8).points) <= 2.0 + 1e-9
    assert tr.outcome.kind != "diverged"


def test_config_validation():
    with pytest.raises(UsageError):
        SolverConfig(epsilon=0)
    with pytest.raises(UsageError):
        SolverConfig(horizon=8, tail_start=8)
    with pytest.raises(UsageError):
        SolverConfig(mu=1.0)
    cfg = SolverConfig(horizon=40)
    assert cfg.tail_start == 20 and cfg.replace(horizon=10).tail_start == 5
    assert cfg.cycle_tol == pytest.approx(1e-7)


def test_trace_serialisation():
    tr = lifschitz_iteration(Action(IV, ["square"]), 0.9, CFG.replace(k=1.5))
    data = json.loads(tr.to_json())
    assert data["outcome"]["kind"] == "converged" and len(data["steps"]) == len(tr.steps)
    assert data["steps"][0]["x"] == 0.9
    lines = trace_csv(tr).strip().split("\n")
    assert lines[0].split(",") == TRACE_COLUMNS and len(lines) == len(tr.steps) + 1
    row = tr.summary_row()
    assert row["outcome"] == "converged" and row["iterations"] == len(tr.steps) - 1
