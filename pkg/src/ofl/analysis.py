"""Sampled estimates of the orbit-Lipschitz constants of an action.

Every estimate is a supremum of ratios over a finite sample, so it is a
lower bound for the true constant; orbits are truncated at the plan's
horizon, which shrinks the D(x, o(y)) denominators and pushes the ratios
back up.  Neither bias is corrected.

All three constants are computed on one shared sample.  A base pair
(x, y) is expanded to the derived pairs (x, u y) for every word u up to
the horizon, and the orbit of y is evaluated out to twice the horizon.
For a derived pair the farthest-point distance D(x, o(u y)) is taken over
every word w = v u of length at most 2H.  With that convention the
sampled values obey, pair by pair, the same inequalities the exact
constants do: the orbit ratio never exceeds the uniform one, and for
commuting generators the strong ratio never exceeds the largest orbit
ratio (and vice versa).
"""
from __future__ import annotations

import csv
import io
import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError, UsageError
from .metric import TOL

DENOM_FLOOR = 1e-9
UNBOUNDED = 10.0


@dataclass(frozen=True)
class SamplePlan:
    seed: int = 0
    n_pairs: int = 256
    horizon: int = 64
    n_words: int = 16
    x_points: tuple | None = None
    extra_pairs: tuple = ()
    tol: float = TOL
    derived: bool = True
    landmark_share: float = 0.25
    workers: int = 1

    def __post_init__(self):
        for name in ("n_pairs", "horizon", "n_words", "workers"):
            if getattr(self, name) < 1:
                raise DomainError(f"{name} must be >= 1")
        if self.x_points is not None:
            object.__setattr__(self, "x_points", tuple(self.x_points))
        object.__setattr__(self, "extra_pairs", tuple(tuple(p) for p in self.extra_pairs))

    def replace(self, **kw) -> "SamplePlan":
        d = {k: getattr(self, k) for k in self.__dataclass_fields__}
        d.update(kw)
        return SamplePlan(**d)


def sample_pairs(space, plan: SamplePlan) -> list:
    """Extra pairs, then landmark pairs, then random pairs; at most n_pairs in total."""
    rng = np.random.default_rng([plan.seed, 1])
    pairs = list(plan.extra_pairs)
    marks = space.landmarks()
    if plan.x_points is not None:
        pairs += [(x, y) for x in plan.x_points for y in marks]
    else:
        pairs += [(x, y) for x in marks for y in marks if space.distance(x, y) > plan.tol]
    need = plan.n_pairs - len(pairs)
    if need > 0:
        ys = space.sample(rng, need)
        if plan.x_points is not None:
            xs = [plan.x_points[i] for i in rng.integers(0, len(plan.x_points), need)]
        else:
            xs = space.sample(rng, need)
        if marks and plan.landmark_share > 0:
            swap = rng.random(need) < plan.landmark_share
            pick = rng.integers(0, len(marks), need)
            ys = [marks[j] if sw else y for y, sw, j in zip(ys, swap, pick)]
        pairs += list(zip(xs, ys))
    return pairs[: plan.n_pairs]


def _pad(rows: list, fill: int) -> np.ndarray:
    width = max((len(r) for r in rows), default=0) or 1
    out = np.full((len(rows), width), fill, dtype=np.int64)
    for i, r in enumerate(rows):
        out[i, : len(r)] = r
    return out


class WordGrid:
    """Index bookkeeping shared by every pair of one estimation run."""

    def __init__(self, action, horizon: int, words_s: list, derived: bool = True):
        self.action, self.H = action, horizon
        self.big = action.words(2 * horizon)
        self.index = {w: i for i, w in enumerate(self.big)}
        sentinel = len(self.big)
        self.S = list(words_s)
        self.U = action.words(horizon) if derived else [action.identity_word]
        self.u_idx = np.array([self.index[u] for u in self.U])
        self.tail_idx = _pad([[i for i, w in enumerate(self.big) if action.is_tail_of(w, u)] for u in self.U], sentinel)
        self.su_idx = np.array([[self.index[action.compose(s, u)] for u in self.U] for s in self.S])
        rows = []
        for s in self.S:
            for u in self.U:
                vs = action.words(horizon - action.length(u)) if derived else action.words(horizon)
                rows.append([self.index[action.compose(v, action.compose(s, u))] for v in vs
                             if action.compose(v, action.compose(s, u)) in self.index])
        self.strong_idx = _pad(rows, sentinel).reshape(len(self.S), len(self.U), -1)
        self.x_words = action.words(max(action.length(s) for s in self.S))


def _with_sentinel(a: np.ndarray) -> np.ndarray:
    return np.concatenate([a, np.full(a.shape[:-1] + (1,), -np.inf)], axis=-1)


def _pair_ratios(action, grid: WordGrid, x, y):
    """Ratio arrays of shape (|U|, |S|) for one base pair."""
    sp = action.space
    ytab = action.orbit_points(y, grid.big)
    ypts = [ytab[w] for w in grid.big]
    xtab = action.orbit_points(x, grid.x_words)
    sx = [xtab[s] for s in grid.S]
    C0 = _with_sentinel(sp.distances(x, ypts))
    Cs = _with_sentinel(sp.cross(sx, ypts))
    D_u = C0[grid.tail_idx].max(axis=1)
    d_u = C0[grid.u_idx]
    rows = np.arange(len(grid.S))[:, None]
    num = Cs[rows, grid.su_idx]
    strong_num = Cs[rows[:, :, None], grid.strong_idx].max(axis=2)
    with np.errstate(divide="ignore", invalid="ignore"):
        ok_D = D_u >= DENOM_FLOOR
        orbit = np.where(ok_D[None, :], num / D_u[None, :], np.nan)
        strong = np.where(ok_D[None, :], strong_num / D_u[None, :], np.nan)
        uniform = np.where(d_u[None, :] > DENOM_FLOOR, num / d_u[None, :], np.nan)
    return uniform.T, orbit.T, strong.T, ypts


@dataclass
class Estimate:
    value: float
    witness: dict | None
    n_ratios: int

    @property
    def unbounded(self) -> bool:
        return bool(self.value > UNBOUNDED)


def _scan_chunk(args):
    action, grid, pairs, offset, tol = args
    best = {k: (-math.inf, None) for k in ("uniform", "orbit", "strong")}
    counts = {k: 0 for k in best}
    for i, (x, y) in enumerate(pairs):
        if action.space.distance(x, y) <= tol:
            continue
        U, O, S, ypts = _pair_ratios(action, grid, x, y)
        for key, R in (("uniform", U), ("orbit", O), ("strong", S)):
            valid = ~np.isnan(R)
            n = int(valid.sum())
            if not n:
                continue
            counts[key] += n
            flat = np.where(valid, R, -np.inf)
            j = int(np.argmax(flat))
            v = float(flat.flat[j])
            if v > best[key][0]:
                ui, si = np.unravel_index(j, flat.shape)
                best[key] = (v, (offset + i, int(ui), int(si), x, y, ypts[grid.index[grid.U[ui]]]))
    return best, counts


def _run(action, plan: SamplePlan):
    if plan.horizon > 4 and action.law == "free" and action.m > 1:
        raise UsageError("free multi-generator actions need horizon <= 4")
    wrng = np.random.default_rng([plan.seed, 2])
    S = action.sample_words(wrng, plan.n_words, plan.horizon, min_length=1)
    grid = WordGrid(action, plan.horizon, S, plan.derived)
    pairs = sample_pairs(action.space, plan)
    chunks = np.array_split(np.arange(len(pairs)), plan.workers)
    jobs = [(action, grid, [pairs[i] for i in c], int(c[0]) if len(c) else 0, plan.tol) for c in chunks if len(c)]
    if plan.workers > 1:
        with ProcessPoolExecutor(plan.workers) as ex:
            parts = list(ex.map(_scan_chunk, jobs))
    else:
        parts = [_scan_chunk(j) for j in jobs]
    out = {}
    for key in ("uniform", "orbit", "strong"):
        best, n = (-math.inf, None), 0
        for b, c in parts:
            n += c[key]
            # chunks arrive in pair order, so a strict comparison keeps the first maximum
            if b[key][0] > best[0]:
                best = b[key]
        if n == 0:
            raise DomainError("degenerate sample: no pair produced a usable ratio")
        out[key] = _estimate(action, grid, best, n)
    return out, len(pairs)


def _estimate(action, grid, best, n) -> Estimate:
    v, (pair, ui, si, x, y, uy) = best
    sp = action.space
    w = {"pair_index": pair, "x": sp.to_json(x), "y": sp.to_json(uy), "base_y": sp.to_json(y),
         "s": list(grid.S[si]), "u": list(grid.U[ui])}
    return Estimate(v, w, n)


def estimate_uniform(action, plan: SamplePlan) -> Estimate:
    """Sampled sup of d(sx, sy) / d(x, y)."""
    return _run(action, plan)[0]["uniform"]


def estimate_orbit(action, plan: SamplePlan) -> Estimate:
    """Sampled sup of d(sx, sy) / D(x, o(y))."""
    return _run(action, plan)[0]["orbit"]


def estimate_strong(action, plan: SamplePlan) -> Estimate:
    """Sampled sup of D(sx, o(sy)) / D(x, o(y))."""
    return _run(action, plan)[0]["strong"]


# -- condition (star) -----------------------------------------------------------------

def window_max(C: np.ndarray, width: int) -> np.ndarray:
    """max(C[..., j : j + width]) for every admissible j, by doubling."""
    P, k = C, 1
    while 2 * k <= width:
        P = np.maximum(P[..., :-k], P[..., k:])
        k *= 2
    return np.maximum(P[..., : C.shape[-1] - width + 1], P[..., width - k:])


@dataclass
class StarReport:
    k: float
    passed: bool
    inconclusive: bool
    worst_margin: float
    n_gated: int
    n_tried: int
    witness: dict | None = None
    note: str = "inf over t truncated at the horizon: a pass is conservative, a failure is advisory"


def _star_pair(action, S, H, x, y, index3=None):
    sp = action.space
    if action.law == "single":
        g = action.generators[0]
        ypts, p = [], y
        for _ in range(3 * H + 1):
            ypts.append(p)
            p = g(p)
        xtab = action.orbit_points(x, [(n,) for n in range(H + 1)])
        xo = [xtab[(n,)] for n in range(H + 1)]
        Dxy = float(np.max(sp.distances(x, ypts[: H + 1])))
        Dxx = float(np.max(sp.distances(x, xo)))
        ss = [s[0] for s in S]
        C = sp.cross([xo[s] for s in ss], ypts)
        W = window_max(C, H + 1)  # W[i, j] = D(sx, o(T^j y)) truncated to H steps
        vals = np.array([W[i, s: s + H + 1] for i, s in enumerate(ss)])
        best_t = vals.argmin(axis=1)
        return Dxy, Dxx, vals.min(axis=1), best_t
    big, idx, tpos = index3
    ytab = action.orbit_points(y, big)
    ypts = [ytab[w] for w in big]
    hw = action.words(H)
    xtab = action.orbit_points(x, hw)
    Dxy = float(np.max(sp.distances(x, [ytab[w] for w in hw])))
    Dxx = float(np.max(sp.distances(x, [xtab[w] for w in hw])))
    C = _with_sentinel(sp.cross([xtab[s] for s in S], ypts))
    vals = C[np.arange(len(S))[:, None, None], idx].max(axis=2)
    return Dxy, Dxx, vals.min(axis=1), vals.argmin(axis=1)


def _star_candidates(sp, plan, rng):
    yield from plan.extra_pairs
    marks = sp.landmarks()
    for a in marks:
        for b in marks:
            if sp.distance(a, b) > plan.tol:
                yield a, b
    # diagonal pairs always pass the gate; for maps fixing everything they are the only ones that do
    for a in marks:
        yield a, a
    while True:
        yield from zip(sp.sample(rng, 1024), sp.sample(rng, 1024))


def check_star(action, k: float, plan: SamplePlan, max_tries: int | None = None) -> StarReport:
    """Worst margin of inf_t D(sx, o(tsy)) - k D(x, o(y)) over gated pairs.

    A pair is gated in when D(x, o(y)) <= D(x, o(x)) + tol.  Random pairs
    are drawn until ``plan.n_pairs`` of them pass the gate.
    """
    if not k > 0:
        raise DomainError("k must be positive")
    H = plan.horizon
    wrng = np.random.default_rng([plan.seed, 3])
    S = action.sample_words(wrng, min(plan.n_words, 8), H, min_length=1)
    index3 = None
    if action.law != "single":
        big = action.words(3 * H)
        pos = {w: i for i, w in enumerate(big)}
        T = action.words(H)
        rows = [[pos[action.compose(v, action.compose(t, s))] for v in action.words(H)] for s in S for t in T]
        index3 = (big, _pad(rows, len(big)).reshape(len(S), len(T), -1), T)
    sp = action.space
    rng = np.random.default_rng([plan.seed, 4])
    candidates = _star_candidates(sp, plan, rng)
    max_tries = max_tries or 20 * plan.n_pairs + len(plan.extra_pairs) + len(sp.landmarks()) * (len(sp.landmarks()) + 1)
    worst, wit, gated, tried = -math.inf, None, 0, 0
    while gated < plan.n_pairs and tried < max_tries:
        x, y = next(candidates)
        tried += 1
        Dxy, Dxx, vals, best_t = _star_pair(action, S, H, x, y, index3)
        if Dxy > Dxx + plan.tol:
            continue
        gated += 1
        margins = vals - k * Dxy
        i = int(np.argmax(margins))
        if margins[i] > worst:
            worst = float(margins[i])
            t = best_t[i] if action.law == "single" else index3[2][best_t[i]]
            wit = {"x": sp.to_json(x), "y": sp.to_json(y), "s": list(S[i]),
                   "t": [int(t)] if action.law == "single" else list(t),
                   "inf_t_D": float(vals[i]), "D_x_oy": Dxy}
    if gated == 0:
        return StarReport(k, False, True, math.nan, 0, tried)
    return StarReport(k, worst <= plan.tol, False, worst, gated, tried, wit)


# -- reports ---------------------------------------------------------------------------

@dataclass
class LipschitzReport:
    action: dict
    space: dict
    seed: int
    n_pairs: int
    horizon: int
    n_words: int
    k_uniform: Estimate
    k_orbit: Estimate
    k_strong: Estimate
    law: str
    star: StarReport | None = None
    notes: list = field(default_factory=list)

    def flat(self) -> dict:
        rec = {"space": self.space.get("type"), "action": "+".join(g["name"] for g in self.action["generators"]),
               "law": self.law, "seed": self.seed, "n_pairs": self.n_pairs, "horizon": self.horizon,
               "n_words": self.n_words}
        for key in ("k_uniform", "k_orbit", "k_strong"):
            e = getattr(self, key)
            rec[key] = e.value
            rec[f"{key}_unbounded"] = e.unbounded
            rec[f"{key}_n"] = e.n_ratios
            for wk, wv in (e.witness or {}).items():
                rec[f"{key}_witness_{wk}"] = wv
        if self.star is not None:
            rec.update({"star_k": self.star.k, "star_pass": self.star.passed,
                        "star_inconclusive": self.star.inconclusive,
                        "star_margin": self.star.worst_margin, "star_gated": self.star.n_gated})
        return rec

    def to_json(self) -> str:
        return json.dumps(self.flat(), sort_keys=True)

    def witness_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["constant", "value", "unbounded", "pair_index", "x", "y", "base_y", "s", "u"])
        for key in ("k_uniform", "k_orbit", "k_strong"):
            e = getattr(self, key)
            wt = e.witness or {}
            w.writerow([key, repr(e.value), e.unbounded, wt.get("pair_index"),
                        *(json.dumps(wt.get(c)) for c in ("x", "y", "base_y", "s", "u"))])
        return buf.getvalue()


def analyze(action, plan: SamplePlan, star_k: float | None = None) -> LipschitzReport:
    est, n = _run(action, plan)
    star = check_star(action, star_k, plan) if star_k is not None else None
    return LipschitzReport(action.describe(), action.space.describe(), plan.seed, n, plan.horizon,
                           plan.n_words, est["uniform"], est["orbit"], est["strong"], action.law, star)


@dataclass
class HierarchyResult:
    passed: bool
    checks: dict


def check_hierarchy(report: LipschitzReport, tol: float = TOL) -> HierarchyResult:
    """Orbit <= uniform and orbit <= strong always; strong <= orbit for one or commuting generators."""
    checks = {"orbit_le_uniform": report.k_orbit.value <= report.k_uniform.value + tol,
              "orbit_le_strong": report.k_orbit.value <= report.k_strong.value + tol}
    if report.law in ("single", "commuting"):
        checks["strong_le_orbit"] = report.k_strong.value <= report.k_orbit.value + tol
    return HierarchyResult(all(checks.values()), checks)
