import itertools
import time
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from ofl import ConfigError, UsageError, WordError
from ofl.actions import (Action, PreorderPolicy, check_inclusion_Ss_in_sS, is_totally_preordered, make_action,
                         preorder_for)
from ofl.maps import MAPS, builtin_maps, make_map, map_params
from ofl.spaces import EuclideanSpace, IntervalSpace, LpSpace
from ofl.spaces.sequences import EventuallyConstSeqSpace, SeqPoint, seq

IV = IntervalSpace()
E2 = EuclideanSpace(2)


def test_evaluate_examples():
    sq = Action(IV, ["square"])
    assert sq.evaluate(sq.identity_word, 0.37) == 0.37
    assert sq.evaluate((3,), 0.5) == 0.00390625
    sa = Action(IntervalSpace(-1, 1), [{"name": "sa", "a": "1/2"}])
    out = sa.evaluate((2,), Fraction(1, 3))
    assert out == Fraction(1, 12) and isinstance(out, Fraction)


def test_orbit_examples():
    step = Action(IV, ["step"])
    orb = step.orbit(1.0, 4)
    assert list(orb.points) == [1.0, 0.0, 1.0, 0.0, 1.0]
    assert sorted(orb.as_set(IV)) == [0.0, 1.0]
    assert orb.includes_base and orb.points[0] == 1.0
    sq = Action(IV, ["square"])
    assert list(sq.orbit(0.5, 3).points) == [0.5, 0.25, 0.0625, 0.00390625]
    assert sq.orbit(0.0, 9).as_set(IV) == [0.0]


def test_orbit_entries_match_evaluate():
    act = Action(E2, [{"name": "rotation", "angle": 0.3}, {"name": "rotation", "angle": 1.1}], law="commuting", horizon=4)
    x = np.array([0.4, 0.1])
    tab = act.orbit(x)
    for w, p in zip(tab.words, tab.points):
        assert np.allclose(p, act.evaluate(w, x))
    free = Action(E2, ["rotation", {"name": "reflection", "scale": 0.5}], law="free", horizon=3)
    tab = free.orbit(x)
    assert len(tab) == free.count_words(3) == 15
    for w, p in zip(tab.words, tab.points):
        assert np.allclose(p, free.evaluate(w, x))


@given(st.floats(0, 1), st.integers(0, 20), st.integers(1, 20))
def test_tail_orbit_is_inside_orbit(x, start, extra):
    act = Action(IV, ["square"])
    H = start + extra
    full = set(act.orbit(x, H).points)
    assert set(act.tail_orbit(x, start, H).points) <= full


def test_tail_orbit_rejects_bad_start():
    with pytest.raises(UsageError):
        Action(IV, ["square"]).tail_orbit(0.5, 10, 4)


def test_builtin_map_examples():
    assert make_map("step")(0.3) == 1.0
    out = make_map("prus")(seq())
    assert out.prefix == (1.0,) and out.tail == 0.0
    sh = make_map({"name": "shift_lp", "N": 3})
    assert np.array_equal(sh(np.array([0.0, 0.0, 1.0])), [1.0, 0.0, 0.0])
    assert np.array_equal(sh(np.array([1.0, 0.0, 0.0])), [0.0, 1.0, 0.0])
    assert np.array_equal(sh(np.array([0.2, 0.1, 0.0])), [1.0, 0.0, 0.0])
    assert {"sa", "square", "step", "shift_lp", "prus"} <= set(builtin_maps())
    with pytest.raises(ConfigError):
        make_map("nope")
    with pytest.raises(ConfigError):
        make_map({"name": "sa", "a": 1.5})


def test_map_params_round_trip():
    for name in MAPS:
        g = make_map(name)
        assert make_map(map_params(g)) == g


def test_sign_flip_fixed_point_and_discontinuity():
    S = make_map({"name": "sa", "a": "1/2"})
    assert S(Fraction(0)) == 0 and S(0.0) == 0.0
    for q in (Fraction(1, 3), Fraction(-2, 5), Fraction(7, 9)):
        # an exact rational and an arbitrarily close generic point land 2a|x| apart
        gap = abs(float(S(q)) - S(float(q) + 1e-12))
        assert gap == pytest.approx(2 * 0.5 * abs(float(q)), abs=1e-9)


def test_prus_is_an_isometry():
    sp = EventuallyConstSeqSpace()
    T = make_map("prus")
    rng = np.random.default_rng(0)
    for x, y in zip(sp.sample(rng, 10_000), sp.sample(rng, 10_000)):
        assert abs(sp.distance(T(x), T(y)) - sp.distance(x, y)) <= 1e-12


def test_prus_has_no_fixed_point_on_iterates():
    sp = EventuallyConstSeqSpace()
    T = make_map("prus")
    rng = np.random.default_rng(1)
    seen = 0
    for x in sp.sample(rng, 5_000):
        for _ in range(200):
            # d(x, Tx) >= |x_1 - (1 + limsup x)| or a gap further down the sequence; never 0
            assert sp.distance(x, T(x)) > 0
            x = T(x)
            seen += 1
    assert seen == 10 ** 6


def test_prus_orbit_of_zero_is_bounded_by_one():
    act = Action(EventuallyConstSeqSpace(), ["prus"])
    orb = act.orbit(seq(), 64).points
    assert max(EventuallyConstSeqSpace().distance(p, q) for p, q in itertools.combinations(orb, 2)) == 1.0


def test_commuting_law_is_verified():
    Action(E2, [{"name": "rotation", "angle": 0.2}, {"name": "rotation", "angle": 0.7}], law="commuting")
    with pytest.raises(UsageError):
        Action(E2, ["rotation", "reflection"], law="commuting")
    with pytest.raises(UsageError):
        Action(IV, ["square", "step"], law="single")


def test_word_validation():
    act = Action(IV, ["square"])
    with pytest.raises(WordError):
        act.evaluate((1, 2), 0.3)
    with pytest.raises(WordError):
        act.evaluate((-1,), 0.3)
    free = Action(E2, ["rotation", "reflection"], law="free")
    with pytest.raises(WordError):
        free.evaluate((0, 2), np.zeros(2))


def test_word_enumeration_counts():
    comm = Action(E2, [{"name": "rotation", "angle": 0.2}, {"name": "rotation", "angle": 0.7}], law="commuting")
    assert len(comm.words(5)) == comm.count_words(5) == 21
    assert comm.words(1) == [(0, 0), (1, 0), (0, 1)]
    free = Action(E2, ["rotation", "reflection"], law="free")
    assert len(free.words(4, min_length=1)) == 2 + 4 + 8 + 16


def test_free_composition_order():
    free = Action(E2, [{"name": "rotation", "angle": 0.5}, "reflection"], law="free")
    x = np.array([0.3, 0.4])
    R, F = free.generators
    assert np.allclose(free.evaluate((0, 1), x), R(F(x)))
    assert free.compose((0,), (1,)) == (0, 1)
    assert free.is_tail_of((0, 0, 1), (0, 1)) and not free.is_tail_of((1, 0), (1,))


def test_preorder_policy():
    single = PreorderPolicy("single")
    words = [(n,) for n in range(6)]
    assert single.check_total(words)[0] and single.check_reflexive_transitive(words)
    comm = PreorderPolicy("commuting", 2)
    ws = [(a, b) for a in range(3) for b in range(3)]
    assert comm.check_reflexive_transitive(ws)
    ok, pair = comm.check_total(ws)
    assert not ok and not comm.leq(*pair) and not comm.leq(pair[1], pair[0])
    free = PreorderPolicy("free", 2)
    assert free.leq((1,), (0, 1)) and not free.leq((0,), (0, 1))


def test_total_preorder_detection():
    assert is_totally_preordered(Action(IV, ["square"]))
    # powers of one rotation: every pair of words is related through the maps themselves
    same = Action(E2, [{"name": "rotation", "angle": 0.5}, {"name": "rotation", "angle": 0.5}], law="commuting", horizon=4)
    assert is_totally_preordered(same)
    assert preorder_for(same).law == "commuting"


def test_inclusion_examples():
    assert check_inclusion_Ss_in_sS(Action(IV, ["square"])).passed
    rot = Action(E2, [{"name": "rotation", "angle": 0.2}, {"name": "rotation", "angle": 0.7}], law="commuting")
    assert check_inclusion_Ss_in_sS(rot).passed
    # a rotation and an unscaled reflection generate a dihedral group, where the inclusion always holds
    group = Action(E2, [{"name": "rotation", "angle": 1.0}, "reflection"], law="free")
    assert check_inclusion_Ss_in_sS(group).passed
    bad = Action(E2, [{"name": "rotation", "angle": 1.0}, {"name": "reflection", "scale": 0.5}], law="free")
    rep = check_inclusion_Ss_in_sS(bad)
    assert not rep.passed and rep.witness is not None and "point" in rep.witness


def test_make_action_from_description():
    act = make_action(IntervalSpace(-1, 1), {"generators": [{"name": "sa", "a": "3/5"}], "horizon": 16})
    assert act.law == "single" and act.horizon == 16
    assert act.describe()["generators"][0] == {"name": "sa", "a": "3/5"}


def test_sample_words_prefers_short_words():
    act = Action(IV, ["square"])
    ws = act.sample_words(np.random.default_rng(0), 8, 64)
    assert ws[:4] == [(1,), (2,), (3,), (4,)] and len(ws) == 8 and ws == sorted(ws)
