import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from ofl import DomainError, UsageError
from ofl.actions import Action
from ofl.analysis import (SamplePlan, analyze, check_hierarchy, check_star, estimate_orbit, estimate_strong,
                          estimate_uniform, sample_pairs, window_max)
from ofl.metric import sup_distance
from ofl.spaces import EuclideanSpace, IntervalSpace, LpSpace

IV = IntervalSpace()
SMALL = SamplePlan(n_pairs=48, horizon=16, n_words=8)


def test_identity_constants_are_one():
    rep = analyze(Action(IV, ["identity"]), SMALL, star_k=1.0)
    assert rep.k_uniform.value == rep.k_orbit.value == rep.k_strong.value == 1.0
    assert rep.star.passed
    assert check_hierarchy(rep).passed


def test_contraction_constants():
    act = Action(IV, [{"name": "contraction", "factor": 0.5}])
    assert estimate_uniform(act, SMALL).value == pytest.approx(0.5, abs=1e-12)
    # oracle: brute-force D(sx, o(sy)) / D(x, o(y)) over every word and pair at horizon 16
    rng = np.random.default_rng(3)
    best = 0.0
    for x, y in rng.uniform(0, 1, (200, 2)):
        oy = [y * 0.5 ** n for n in range(17)]
        for s in range(1, 9):
            osy = [y * 0.5 ** (s + n) for n in range(17 - s)]
            best = max(best, max(abs(x * 0.5 ** s - p) for p in osy) / max(abs(x - p) for p in oy))
    assert best <= 0.5 + 1e-12
    assert estimate_strong(act, SMALL).value == pytest.approx(0.5, abs=1e-9)


def test_square_map_is_not_uniformly_lipschitz():
    act = Action(IV, ["square"])
    est = estimate_uniform(act, SamplePlan(n_pairs=4096, horizon=8, n_words=4))
    assert est.unbounded and est.value > 10
    w = est.witness
    assert max(w["x"], w["y"]) == 1.0 and min(w["x"], w["y"]) > 0.95


def test_square_map_orbit_ratio_approaches_two():
    act = Action(IV, ["square"])
    pairs = [(y / 2, y) for y in (0.9, 0.99, 0.999)]
    k = estimate_orbit(act, SamplePlan(n_pairs=len(pairs) + 2, horizon=32, extra_pairs=pairs)).value
    assert 1.9 < k < 2.0


def test_sign_flip_orbit_bound():
    act = Action(IntervalSpace(-1, 1, rational_share=0.5), [{"name": "sa", "a": "1/2"}])
    assert estimate_orbit(act, SamplePlan(n_pairs=128, horizon=32)).value <= 1.5 + 1e-9


def test_step_map_ratio_is_two_at_half_one():
    act = Action(IV, ["step"])
    plan = SamplePlan(n_pairs=1, horizon=8, extra_pairs=[(0.5, 1.0)], derived=False)
    est = estimate_orbit(act, plan)
    assert est.value == 2.0 and (est.witness["x"], est.witness["y"]) == (0.5, 1.0)


def test_lp_shift_strong_constant():
    act = Action(LpSpace(8, 2.0), [{"name": "shift_lp", "N": 8}])
    plan = SamplePlan(n_pairs=32, horizon=16, x_points=[np.zeros(8)])
    assert estimate_strong(act, plan).value == pytest.approx(math.sqrt(2), abs=1e-9)


def test_star_examples():
    sq = Action(IV, ["square"])
    rep = check_star(sq, 1.0, SamplePlan(n_pairs=500, horizon=16, n_words=8))
    assert rep.passed and rep.n_gated == 500
    step = Action(IV, ["step"])
    plan = SamplePlan(n_pairs=64, horizon=16)
    assert check_star(step, 2.0, plan).passed
    bad = check_star(step, 1.9, plan)
    assert not bad.passed and (bad.witness["x"], bad.witness["y"]) == (0.5, 1.0)
    assert check_star(Action(IV, ["identity"]), 1.0, plan).passed
    with pytest.raises(DomainError):
        check_star(step, 0.0, plan)


def test_star_gate_is_respected():
    act = Action(IV, ["square"])
    rep = check_star(act, 0.5, SamplePlan(n_pairs=64, horizon=8))
    w = rep.witness
    x, y = w["x"], w["y"]
    ox = act.orbit(x, 8).points
    oy = act.orbit(y, 8).points
    assert sup_distance(IV, x, oy) <= sup_distance(IV, x, ox) + 1e-9
    assert w["D_x_oy"] == pytest.approx(sup_distance(IV, x, oy))


def test_hierarchy_on_builtin_laws():
    e2 = EuclideanSpace(2)
    rot = Action(e2, [{"name": "rotation", "angle": 0.4}, {"name": "rotation", "angle": 1.3}], law="commuting",
                 horizon=4)
    rep = analyze(rot, SamplePlan(n_pairs=24, horizon=4, n_words=6))
    res = check_hierarchy(rep)
    assert res.passed and set(res.checks) == {"orbit_le_uniform", "orbit_le_strong", "strong_le_orbit"}
    for name in ("square", "step", "contraction"):
        assert check_hierarchy(analyze(Action(IV, [name]), SMALL)).passed
    free = Action(e2, ["rotation", "reflection"], law="free", horizon=3)
    res = check_hierarchy(analyze(free, SamplePlan(n_pairs=16, horizon=3, n_words=4)))
    assert "strong_le_orbit" not in res.checks and res.passed


def test_free_law_horizon_is_capped():
    free = Action(EuclideanSpace(2), ["rotation", "reflection"], law="free")
    with pytest.raises(UsageError):
        analyze(free, SamplePlan(n_pairs=4, horizon=5))


def test_reports_are_deterministic():
    act = Action(IntervalSpace(-1, 1), [{"name": "sa", "a": "3/5"}])
    plan = SamplePlan(seed=7, n_pairs=64, horizon=16)
    a, b = analyze(act, plan, 1.8), analyze(act, plan, 1.8)
    assert a.to_json() == b.to_json() and a.witness_csv() == b.witness_csv()
    c = analyze(act, plan.replace(seed=8), 1.8)
    assert c.to_json() != a.to_json()


def test_workers_do_not_change_the_report():
    act = Action(IV, ["square"])
    plan = SamplePlan(seed=2, n_pairs=40, horizon=8)
    assert analyze(act, plan).to_json() == analyze(act, plan.replace(workers=2)).to_json()


@given(st.floats(0.01, 0.99), st.floats(0.01, 0.99), st.integers(1, 6), st.integers(1, 24))
def test_orbit_ratio_non_increasing_in_horizon(x, y, s, H):
    act = Action(IV, ["square"])
    if abs(x - y) < 1e-6:
        return
    num = abs(x ** (2 ** s) - y ** (2 ** s))
    r1 = num / sup_distance(IV, x, act.orbit(y, H).points)
    r2 = num / sup_distance(IV, x, act.orbit(y, H + 5).points)
    assert r2 <= r1 + 1e-15


@given(st.lists(st.floats(-5, 5), min_size=3, max_size=30), st.integers(1, 10))
def test_window_max_matches_brute_force(values, width):
    C = np.array(values)
    if width > len(C):
        return
    want = [max(C[j:j + width]) for j in range(len(C) - width + 1)]
    assert np.array_equal(window_max(C, width), want)


def test_plan_validation_and_pair_order():
    with pytest.raises(DomainError):
        SamplePlan(n_pairs=0)
    plan = SamplePlan(n_pairs=10, extra_pairs=[(0.1, 0.2)])
    pairs = sample_pairs(IV, plan)
    assert len(pairs) == 10 and pairs[0] == (0.1, 0.2)
    assert pairs == sample_pairs(IV, plan)
