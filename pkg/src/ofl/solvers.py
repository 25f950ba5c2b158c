"""Fixed-point iterations for semigroup actions and their outcome classification.

Three iterations share one trace format:

``picard``
    Repeats a single word from the start point.
``orbit_center_iteration``
    Moves to the Chebyshev center of a truncated orbit tail
    ``{s x : T0 <= |s| <= H}``; contraction is measured by the tail radius.
``lifschitz_iteration``
    Estimates ``r(x) = inf_y D(x, o(y))``, picks the word moving ``x`` the
    farthest and jumps to the center of the two-ball lens supplied by the
    space's regularity oracle.
"""
from __future__ import annotations

import csv
import io
import json
from dataclasses import asdict, dataclass, field
from typing import Any

import numpy as np

from .errors import UnsupportedOperation, UsageError
from .metric import TOL, chebyshev_center, diameter, sup_distance

OUTCOMES = ("converged", "cycle_detected", "diverged", "budget_exhausted", "unsupported")


@dataclass(frozen=True)
class SolverConfig:
    epsilon: float = 1e-6
    max_iter: int = 200
    horizon: int = 64
    tail_start: int | None = None
    k: float = 1.5
    mu: float = 0.01
    n_candidates: int = 32
    seed: int = 0
    word: tuple | None = None

    def __post_init__(self):
        if not self.epsilon > 0:
            raise UsageError("epsilon must be positive")
        if self.max_iter < 1 or self.horizon < 1:
            raise UsageError("max_iter and horizon must be >= 1")
        if self.tail_start is None:
            object.__setattr__(self, "tail_start", self.horizon // 2)
        if not 0 <= self.tail_start < self.horizon:
            raise UsageError(f"tail start {self.tail_start} must lie in [0, {self.horizon})")
        if not 0 < self.mu < 1:
            raise UsageError("mu must lie in (0, 1)")

    @property
    def cycle_tol(self) -> float:
        return self.epsilon / 10

    def replace(self, **kw) -> "SolverConfig":
        d = asdict(self)
        d.update(kw)
        if "horizon" in kw and "tail_start" not in kw:
            d["tail_start"] = None
        return SolverConfig(**d)


@dataclass
class Outcome:
    kind: str
    period: int | None = None
    point: Any = None
    reason: str = ""

    def __str__(self):
        return self.kind if self.period is None else f"{self.kind}(period={self.period})"


@dataclass
class SolverTrace:
    method: str
    space: Any
    iterates: list = field(default_factory=list)
    steps: list = field(default_factory=list)
    outcome: Outcome | None = None
    notes: list = field(default_factory=list)
    diverged_reason: str = ""
    unsupported_reason: str = ""

    @property
    def residuals(self) -> list:
        return [s["residual"] for s in self.steps]

    @property
    def final(self):
        return self.iterates[-1]

    def column(self, key: str) -> list:
        return [s.get(key) for s in self.steps]

    def records(self) -> list:
        out = []
        for s, x in zip(self.steps, self.iterates):
            rec = {k: _jsonable(v) for k, v in s.items()}
            rec["x"] = self.space.to_json(x)
            out.append(rec)
        return out

    def to_json(self) -> str:
        o = self.outcome
        return json.dumps({
            "method": self.method,
            "outcome": {"kind": o.kind, "period": o.period, "reason": o.reason,
                        "point": None if o.point is None else self.space.to_json(o.point)},
            "notes": self.notes,
            "steps": self.records(),
        }, indent=2, sort_keys=True)

    def summary_row(self) -> dict:
        last = self.steps[-1]
        return {"method": self.method, "outcome": self.outcome.kind, "period": self.outcome.period or "",
                "iterations": len(self.steps) - 1, "residual": f"{last['residual']:.6g}",
                "self_radius": f"{last['self_radius']:.6g}"}


def _jsonable(v):
    if isinstance(v, (np.floating, np.integer)):
        return v.item()
    if isinstance(v, tuple):
        return list(v)
    return v


def residual(action, x) -> float:
    """max over generators g of d(x, g x)."""
    return max(action.space.distance(x, g(x)) for g in action.generators)


def _orbit_stats(action, x, H: int) -> tuple[list, float, float]:
    orb = list(action.orbit(x, H).points)
    return orb, sup_distance(action.space, x, orb), diameter(action.space, orb)


def _record(action, trace: SolverTrace, x, H: int, **extra):
    orb, D, delta = _orbit_stats(action, x, H)
    step = {"j": len(trace.steps), "residual": residual(action, x), "self_radius": D, "orbit_diameter": delta,
            "step": None, "ratio": None}
    if trace.iterates:
        step["step"] = action.space.distance(x, trace.iterates[-1])
    step.update(extra)
    trace.iterates.append(x)
    trace.steps.append(step)
    return orb, step


def _repeat_lag(space, iterates: list, tol: float, max_lag: int) -> int | None:
    if len(iterates) < 2:
        return None
    last = iterates[-1]
    window = iterates[max(0, len(iterates) - 1 - max_lag):-1]
    d = space.distances(last, window)
    hits = np.nonzero(d < tol)[0]
    if not len(hits):
        return None
    return len(window) - int(hits[-1])


def classify_outcome(trace: SolverTrace, config: SolverConfig) -> Outcome:
    if trace.unsupported_reason:
        return Outcome("unsupported", reason=trace.unsupported_reason)
    if trace.steps and trace.steps[-1]["residual"] < config.epsilon:
        return Outcome("converged", point=trace.final)
    lag = _repeat_lag(trace.space, trace.iterates, config.cycle_tol, config.horizon)
    if lag is not None:
        return Outcome("cycle_detected", period=lag, point=trace.final)
    if trace.diverged_reason:
        return Outcome("diverged", reason=trace.diverged_reason)
    return Outcome("budget_exhausted", point=trace.final)


def _finish(trace, config):
    trace.outcome = classify_outcome(trace, config)
    return trace


def picard(action, x0, config: SolverConfig = SolverConfig()) -> SolverTrace:
    word = action.check_word(config.word) if config.word is not None else _first_generator(action)
    trace = SolverTrace("picard", action.space, notes=[f"word={list(word)}"])
    x = x0
    _record(action, trace, x, config.horizon)
    for _ in range(config.max_iter):
        if trace.steps[-1]["residual"] < config.epsilon:
            break
        if _repeat_lag(action.space, trace.iterates, config.cycle_tol, config.horizon):
            break
        x = action.evaluate(word, x)
        _record(action, trace, x, config.horizon)
    return _finish(trace, config)


def _first_generator(action) -> tuple:
    return (0,) if action.law == "free" else (1,) + (0,) * (action.m - 1)


def orbit_center_iteration(action, x0, config: SolverConfig = SolverConfig()) -> SolverTrace:
    """x_{j+1} = Chebyshev center of the orbit tail of x_j.

    D_j is the radius of that tail around its center; ``ratio`` is
    D_j / D_{j-1}, the quantity bounded by N(X) k^2 for strongly orbit
    k-Lipschitzian actions with a total preorder.
    """
    space, H, T0 = action.space, config.horizon, config.tail_start
    trace = SolverTrace("orbit_center", space, notes=[f"tail=[{T0}, {H}]"])
    if action.law == "free" and action.m > 1:
        trace.notes.append("free law: the tail preorder is not total")
    bound = space.domain_diameter()
    x, prev_D = x0, None
    _record(action, trace, x, H)
    for _ in range(config.max_iter):
        step = trace.steps[-1]
        if step["self_radius"] < config.epsilon or step["residual"] < config.epsilon:
            break
        if _repeat_lag(space, trace.iterates, config.cycle_tol, H):
            break
        if step["orbit_diameter"] > bound + TOL:
            trace.diverged_reason = "orbit diameter exceeds the domain bound"
            break
        tail = list(action.tail_orbit(x, T0, H).points)
        try:
            z, D = chebyshev_center(space, tail)
        except UnsupportedOperation as exc:
            trace.unsupported_reason = str(exc)
            break
        step["tail_radius"] = D
        step["ratio"] = None if prev_D is None or prev_D <= 0 else D / prev_D
        prev_D = D
        x = z
        _record(action, trace, x, H)
    return _finish(trace, config)


def estimate_r(action, x, candidates: list, H: int) -> tuple[float, Any]:
    """min over candidate y of D(x, o_H(y)) and the minimising y."""
    best, arg = np.inf, None
    for y in candidates:
        D = sup_distance(action.space, x, action.orbit(y, H).points)
        if D < best:
            best, arg = D, y
    return float(best), arg


def lifschitz_iteration(action, x0, config: SolverConfig = SolverConfig()) -> SolverTrace:
    """Regularity-oracle iteration.

    Each step always goes through the oracle with the sampled word s0 that
    moves x the most; no case split on the size of r is made.  The
    iteration stops as soon as r_est < eps / (1 + k0), where
    d(x, s x) <= (1 + k0) r_est guarantees a residual below eps.
    """
    space, H, mu = action.space, config.horizon, config.mu
    k0 = max(config.k, 1.0)
    rng = np.random.default_rng([config.seed, 41])
    trace = SolverTrace("lifschitz", space, notes=[f"k0={k0}", f"mu={mu}", "single oracle route, no case split"])
    if not space.has_regularity_oracle():
        trace.unsupported_reason = f"{space.kind} has no regularity oracle"
        trace.iterates.append(x0)
        trace.steps.append({"j": 0, "residual": residual(action, x0), "self_radius": np.nan,
                            "orbit_diameter": np.nan, "step": None, "ratio": None})
        return _finish(trace, config)
    x = x0
    orb, step = _record(action, trace, x, H)
    rises = 0
    for _ in range(config.max_iter):
        cands = orb[:16] + trace.iterates[-9:-1] + space.sample(rng, config.n_candidates)
        r, _ = estimate_r(action, x, cands, H)
        step["r_est"] = r
        if len(trace.steps) > 1:
            prev = trace.steps[-2]
            step["ratio"] = r / prev["r_est"] if prev["r_est"] > 0 else None
            rises = rises + 1 if r > prev["r_est"] * (1 + 1e-9) + TOL else 0
            if rises >= 3:
                trace.diverged_reason = "r_est increased on three consecutive steps"
                break
        if r < config.epsilon / (1 + k0) or step["residual"] < config.epsilon:
            break
        if _repeat_lag(space, trace.iterates, config.cycle_tol, H):
            break
        j = int(np.argmax(space.distances(x, orb)))
        s0x = orb[j]
        try:
            got = space.regularity_oracle(x, s0x, r, k0, mu)
        except UnsupportedOperation as exc:
            trace.unsupported_reason = str(exc)
            break
        if got is None:
            trace.unsupported_reason = f"oracle refused k0={k0} at r={r:.6g}"
            break
        z, alpha = got
        step["alpha"] = alpha
        step["s0_length"] = j
        step["step_bound"] = (alpha + 1 + mu) * r
        x = z
        orb, step = _record(action, trace, x, H)
    if "r_est" not in trace.steps[-1]:
        cands = orb[:16] + trace.iterates[-9:-1] + space.sample(rng, config.n_candidates)
        trace.steps[-1]["r_est"] = estimate_r(action, x, cands, H)[0]
    return _finish(trace, config)


SOLVERS = {"picard": picard, "orbit_center": orbit_center_iteration, "lifschitz": lifschitz_iteration}

TRACE_COLUMNS = ["j", "residual", "self_radius", "orbit_diameter", "step", "ratio", "r_est", "alpha"]


def trace_csv(trace: SolverTrace) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(TRACE_COLUMNS)
    for s in trace.steps:
        w.writerow(["" if s.get(c) is None else (f"{s[c]:.9g}" if isinstance(s[c], float) else s[c])
                    for c in TRACE_COLUMNS])
    return buf.getvalue()
