"""Reproduction suite: one function per worked example, each returning check rows.

Rows hold only seeded, deterministic quantities so that ``summary.csv``
is byte-identical across runs; wall-clock times go to ``report.json``.
"""
from __future__ import annotations

import csv
import io
import math
import time
from dataclasses import asdict, dataclass
from fractions import Fraction

import numpy as np

from .actions import Action
from .analysis import SamplePlan, analyze, check_hierarchy, check_star, estimate_orbit, estimate_strong
from .constants import estimate_kappa, estimate_normal_coeff
from .metric import diameter
from .scenarios import builtin_scenario
from .solvers import SolverConfig, lifschitz_iteration, orbit_center_iteration, picard
from .spaces import EventuallyConstSeqSpace, IntervalSpace, LpSpace, make_space
from .spaces.sequences import seq

SUMMARY_COLUMNS = ["criterion", "check", "value", "target", "pass", "invariant"]


@dataclass
class Row:
    criterion: int
    check: str
    value: str
    target: str
    passed: bool
    invariant: bool = False

    def as_list(self) -> list:
        return [self.criterion, self.check, self.value, self.target, "PASS" if self.passed else "FAIL",
                "yes" if self.invariant else "no"]


def _f(v) -> str:
    if isinstance(v, float):
        return "nan" if math.isnan(v) else f"{v:.9g}"
    return str(v)


def step_map(seed: int = 0) -> list:
    sc = builtin_scenario("remark-4-6")
    sp = sc.build_space()
    act = sc.build_action(sp)
    rep = analyze(act, sc.sample_plan(sp, seed=seed))
    k, wit = rep.k_orbit.value, rep.k_orbit.witness
    pair = (float(wit["x"]), float(wit["y"]))
    rows = [Row(1, "k_orbit", _f(k), "2 +- 1e-9", abs(k - 2.0) <= 1e-9),
            Row(1, "k_orbit witness", f"({pair[0]:g}, {pair[1]:g})", "(0.5, 1)", pair == (0.5, 1.0))]
    cfg = sc.solver_config(seed=seed).replace(k=1.9)
    for name, fn in (("lifschitz", lifschitz_iteration), ("orbit_center", orbit_center_iteration)):
        tr = fn(act, sc.start_point(sp), cfg)
        rows.append(Row(1, f"{name} outcome", str(tr.outcome), "not converged", tr.outcome.kind != "converged"))
    return rows


def sign_flip(seed: int = 0) -> list:
    rows = []
    sp = IntervalSpace(-1.0, 1.0, rational_share=0.5)
    for a in ("1/4", "1/2", "3/5"):
        af = float(Fraction(a))
        act = Action(sp, [{"name": "sa", "a": a}])
        k = estimate_orbit(act, SamplePlan(seed=seed, n_pairs=256, horizon=64)).value
        rows.append(Row(2, f"a={a} k_orbit", _f(k), f"<= {_f(3 * af + 0.01)}", k <= 3 * af + 0.01))
        tr = lifschitz_iteration(act, Fraction(1, 2), SolverConfig(k=min(3 * af, 1.9), max_iter=500, seed=seed))
        res, x = tr.steps[-1]["residual"], float(tr.final)
        ok = tr.outcome.kind == "converged" and res < 1e-6 and abs(x) < 1e-5
        rows.append(Row(2, f"a={a} lifschitz", f"{tr.outcome} x={x:.3g} res={res:.3g}",
                        "converged to 0, residual < 1e-6", ok))
    return rows


def square_map(seed: int = 0) -> list:
    sc = builtin_scenario("example-4-4")
    sp = sc.build_space()
    act = sc.build_action(sp)
    star = check_star(act, 1.0, SamplePlan(seed=seed, n_pairs=10_000, horizon=32, n_words=8))
    rows = [Row(3, "star k=1 margin", _f(star.worst_margin), "<= 1e-9 on 1e4 gated pairs",
                star.passed and star.n_gated >= 10_000),
            Row(3, "star gated pairs", str(star.n_gated), ">= 10000", star.n_gated >= 10_000)]
    plan = sc.sample_plan(sp, horizon=32, seed=seed)
    k = estimate_orbit(act, plan).value
    rows.append(Row(3, "k_orbit on (y/2, y)", _f(k), "> 1.9", k > 1.9))
    tr = orbit_center_iteration(act, sc.start_point(sp), sc.solver_config(seed=seed))
    x = float(tr.final)
    rows.append(Row(3, "orbit_center", f"{tr.outcome} x={x:.3g}", "converged to 0",
                    tr.outcome.kind == "converged" and abs(x) < 1e-6))
    return rows


def lp_shift(seed: int = 0) -> list:
    rows = []
    for p in (1.0, 2.0, 4.0):
        sp = LpSpace(8, p)
        act = Action(sp, [{"name": "shift_lp", "N": 8}])
        plan = SamplePlan(seed=seed, n_pairs=64, horizon=64, x_points=[np.zeros(8)])
        k = estimate_strong(act, plan).value
        want = 2 ** (1 / p)
        rows.append(Row(4, f"p={p:g} k_strong", _f(k), f"{want:.6f} +- 0.02", abs(k - want) <= 0.02))
        cfg = SolverConfig(seed=seed, max_iter=100)
        for name, fn in (("picard", picard), ("orbit_center", orbit_center_iteration)):
            tr = fn(act, np.zeros(8), cfg)
            rows.append(Row(4, f"p={p:g} {name}", str(tr.outcome), "not converged", tr.outcome.kind != "converged"))
    return rows


def prus_map(seed: int = 0) -> list:
    sp = EventuallyConstSeqSpace()
    act = Action(sp, ["prus"])
    T = act.generators[0]
    rng = np.random.default_rng([seed, 5])
    xs, ys = sp.sample(rng, 10_000), sp.sample(rng, 10_000)
    err = max(abs(sp.distance(T(x), T(y)) - sp.distance(x, y)) for x, y in zip(xs, ys))
    rows = [Row(5, "isometry max error", _f(err), "<= 1e-12 on 1e4 pairs", err <= 1e-12)]
    orb = act.orbit(seq(), 64).points
    bound = max(diameter(sp, orb), max(sp.distance(seq(), p) for p in orb))
    rows.append(Row(5, "orbit of 0 bound", _f(bound), "<= 1", bound <= 1 + 1e-12))
    tr = orbit_center_iteration(act, seq(), SolverConfig(seed=seed, max_iter=200))
    res = min(tr.residuals[:201])
    rows.append(Row(5, "min residual j<=200", _f(res), ">= 0.9", res >= 0.9))
    rows.append(Row(5, "orbit_center outcome", str(tr.outcome), "not converged", tr.outcome.kind != "converged"))
    return rows


def kappa_brackets(seed: int = 0, budget: int = 100_000) -> list:
    rows = []
    b = estimate_kappa(make_space({"type": "interval"}), budget, seed)
    rows.append(Row(6, "interval kappa", f"[{b.lower:.6f}, {b.upper:.6f}]", "lower >= 1.8, upper = 2",
                    b.lower >= 1.8 and b.upper == 2.0))
    b = estimate_kappa(make_space({"type": "euclidean", "n": 2}), budget, seed)
    rows.append(Row(6, "euclidean-2 kappa", f"[{b.lower:.6f}, {b.upper:.6f}]", "contains 1.414, width <= 0.25",
                    b.contains(1.414) and b.width <= 0.25))
    sp = make_space({"type": "maxnorm", "n": 2})
    b = estimate_kappa(sp, budget, seed)
    ok = b.upper <= 1.1 and b.certificate is not None and b.certificate.replay(sp)
    rows.append(Row(6, "maxnorm-2 kappa", f"[{b.lower:.6f}, {b.upper:.6f}]", "upper <= 1.1, replayable", ok))
    return rows


def normal_coeffs(seed: int = 0, n_sets: int = 100) -> list:
    rows = []
    for desc, label, check, target in (
            ({"type": "interval"}, "interval", lambda v: 0.48 <= v <= 0.52, "[0.48, 0.52]"),
            ({"type": "maxnorm", "n": 3}, "maxnorm-3", lambda v: 0.48 <= v <= 0.52, "[0.48, 0.52]"),
            ({"type": "euclidean", "n": 2}, "euclidean-2", lambda v: v >= 0.55, ">= 0.55")):
        est = estimate_normal_coeff(make_space(desc), n_sets, seed)
        rows.append(Row(7, f"{label} N", _f(est.value), target, check(est.value) and est.value <= 1))
    return rows


def builtin_actions() -> list:
    """(label, action, start point) for every builtin action used in the hierarchy checks."""
    out = []
    for name in ("example-3-5", "example-4-4", "remark-4-6", "example-4-7", "remark-5-8",
                 "commuting-rotations", "contraction-plane"):
        sc = builtin_scenario(name)
        sp = sc.build_space()
        out.append((name, sc.build_action(sp), sc.sample_plan(sp).replace(n_pairs=64),
                    sc.start_point(sp), sc.solver.horizon))
    iv = IntervalSpace(-1.0, 1.0, rational_share=0.5)
    for a in ("1/4", "1/2"):
        out.append((f"sa {a}", Action(iv, [{"name": "sa", "a": a}]), SamplePlan(n_pairs=64), Fraction(1, 2), 64))
    out.append(("identity", Action(IntervalSpace(), ["identity"]), SamplePlan(n_pairs=32), 0.3, 64))
    e2 = make_space({"type": "euclidean", "n": 2})
    out.append(("rotation+reflection", Action(e2, [{"name": "rotation", "angle": 1.0}, "reflection"], law="free",
                                              horizon=3), SamplePlan(n_pairs=32, horizon=3), np.array([0.5, 0.2]), 3))
    return out


def contraction_violations(trace, bound: float, slack: float = 0.05) -> list:
    """Steps where the tail radius D_j exceeds bound * D_{j-1} + slack."""
    radii = [s.get("tail_radius") for s in trace.steps if s.get("tail_radius") is not None]
    return [j for j in range(1, len(radii)) if radii[j] > bound * radii[j - 1] + slack]


def hierarchy(seed: int = 0) -> list:
    rows = []
    for label, act, plan, x0, H in builtin_actions():
        rep = analyze(act, plan.replace(seed=seed))
        res = check_hierarchy(rep)
        rows.append(Row(8, f"{label} hierarchy", " ".join(f"{k}={v}" for k, v in sorted(res.checks.items())),
                        "all true", res.passed, invariant=True))
        N = act.space.reference_constants().get("normal_coeff")
        if N is None or act.law == "free":
            continue
        c = N * rep.k_strong.value ** 2
        if c >= 1:
            continue
        tr = orbit_center_iteration(act, x0, SolverConfig(seed=seed, horizon=H, max_iter=50))
        if tr.outcome.kind != "converged":
            continue
        bad = contraction_violations(tr, c)
        rows.append(Row(8, f"{label} contraction", f"c={c:.6f} bad_steps={len(bad)}", "D_j <= c D_(j-1) + 0.05",
                        not bad, invariant=True))
    return rows


CRITERIA = {1: step_map, 2: sign_flip, 3: square_map, 4: lp_shift, 5: prus_map, 6: kappa_brackets,
            7: normal_coeffs, 8: hierarchy}


def run_repro(seed: int = 0, only=None) -> tuple[list, dict]:
    rows, timings = [], {}
    for c, fn in CRITERIA.items():
        if only and c not in only:
            continue
        t = time.perf_counter()
        rows += fn(seed)
        timings[c] = time.perf_counter() - t
    return rows, timings


def summary_csv(rows: list) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(SUMMARY_COLUMNS)
    for r in rows:
        w.writerow(r.as_list())
    return buf.getvalue()


def rows_json(rows: list) -> list:
    return [asdict(r) for r in rows]
