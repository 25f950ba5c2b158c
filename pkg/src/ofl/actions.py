"""Finitely generated semigroup actions, words, orbits and the tail preorder.

Words come in two shapes.  For the ``single`` and ``commuting`` laws a
word is a tuple of exponents, one per generator, so the semigroup is
(N^m, +).  For the ``free`` law a word is a tuple of generator indices,
read right to left: ``(0, 1)`` means "apply generator 1, then 0".
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Any

import numpy as np

from .errors import UsageError, WordError
from .maps import make_map, map_params
from .metric import TOL

LAWS = ("single", "commuting", "free")


@dataclass(frozen=True)
class OrbitTable:
    """A truncated orbit: ``points[i]`` is ``words[i]`` applied to ``base``."""

    base: Any
    words: tuple
    points: tuple
    horizon: int
    start: int = 0
    includes_base: bool = True

    def __len__(self):
        return len(self.points)

    def __iter__(self):
        return iter(self.points)

    def as_set(self, space, tol: float = TOL) -> list:
        """Distinct points, keeping the first representative of each cluster."""
        out: list = []
        for p in self.points:
            if not out or np.min(space.distances(p, out)) > tol:
                out.append(p)
        return out


class Action:
    """A semigroup generated by named maps acting on a space."""

    def __init__(self, space, generators, law: str | None = None, horizon: int = 64,
                 check_points: int = 64, seed: int = 0):
        gens = tuple(make_map(g) if isinstance(g, (str, dict)) else g for g in generators)
        if not gens:
            raise UsageError("an action needs at least one generator")
        law = law or ("single" if len(gens) == 1 else "free")
        if law not in LAWS:
            raise UsageError(f"unknown composition law {law!r}")
        if law == "single" and len(gens) != 1:
            raise UsageError("the single law takes exactly one generator")
        if horizon < 1:
            raise UsageError("horizon must be >= 1")
        self.space, self.generators, self.law, self.horizon = space, gens, law, horizon
        self.m = len(gens)
        if law == "commuting":
            bad = self.commutator_witness(space.sample(np.random.default_rng(seed), check_points))
            if bad is not None:
                raise UsageError(f"generators {bad[0]} and {bad[1]} do not commute at {bad[2]!r}")

    # -- description -----------------------------------------------------------
    @property
    def names(self) -> list:
        return [g.name for g in self.generators]

    def describe(self) -> dict:
        return {"law": self.law, "horizon": self.horizon, "generators": [map_params(g) for g in self.generators]}

    def __repr__(self):
        return f"Action({self.space.kind}, {'+'.join(self.names)}, law={self.law})"

    def commutator_witness(self, points, tol: float = 1e-9):
        for i, j in itertools.combinations(range(self.m), 2):
            gi, gj = self.generators[i], self.generators[j]
            for x in points:
                if self.space.distance(gi(gj(x)), gj(gi(x))) > tol:
                    return i, j, x
        return None

    # -- word algebra ----------------------------------------------------------
    @property
    def identity_word(self) -> tuple:
        return (0,) * self.m if self.law != "free" else ()

    def check_word(self, w) -> tuple:
        w = tuple(w) if not isinstance(w, (int, np.integer)) else (int(w),)
        if self.law == "free":
            if any(not (isinstance(i, (int, np.integer)) and 0 <= i < self.m) for i in w):
                raise WordError(f"free word {w} must list generator indices below {self.m}")
        elif len(w) != self.m or any(not isinstance(n, (int, np.integer)) or n < 0 for n in w):
            raise WordError(f"word {w} must be {self.m} nonnegative exponents")
        return tuple(int(i) for i in w)

    def length(self, w) -> int:
        return len(w) if self.law == "free" else int(sum(w))

    def compose(self, s, t) -> tuple:
        """The word for s . t, i.e. t first and then s."""
        if self.law == "free":
            return tuple(s) + tuple(t)
        return tuple(a + b for a, b in zip(s, t))

    def is_tail_of(self, w, u) -> bool:
        """True when w lies in S^1 u, i.e. w = v . u for some word v."""
        if self.law == "free":
            return len(w) >= len(u) and tuple(w[len(w) - len(u):]) == tuple(u)
        return all(a >= b for a, b in zip(w, u))

    def words(self, horizon: int | None = None, min_length: int = 0) -> list:
        """All words of length in [min_length, horizon] in graded lexicographic order."""
        H = self.horizon if horizon is None else horizon
        out = []
        for L in range(min_length, H + 1):
            if self.law == "free":
                out.extend(itertools.product(range(self.m), repeat=L))
            else:
                out.extend(w for w in _compositions(L, self.m))
        return out

    def count_words(self, horizon: int) -> int:
        if self.law == "free":
            return horizon + 1 if self.m == 1 else (self.m ** (horizon + 1) - 1) // (self.m - 1)
        return math.comb(horizon + self.m, self.m)

    def sample_words(self, rng, n: int, horizon: int | None = None, min_length: int = 1) -> list:
        """``n`` distinct words (all of them if there are few), in graded order.

        The shortest half of the budget is always taken; the rest is drawn
        at random from the longer words.
        """
        ws = self.words(horizon, min_length)
        if len(ws) <= n:
            return ws
        head = (n + 1) // 2
        idx = head + rng.choice(len(ws) - head, size=n - head, replace=False)
        return ws[:head] + [ws[i] for i in np.sort(idx)]

    # -- evaluation ------------------------------------------------------------
    def evaluate(self, w, x):
        w = self.check_word(w)
        if self.law == "free":
            for i in reversed(w):
                x = self.generators[i](x)
            return x
        for g, n in zip(self.generators, w):
            for _ in range(n):
                x = g(x)
        return x

    def orbit_points(self, x, words: list) -> dict:
        """Map each word of a prefix-closed graded list to its image of x."""
        table = {}
        for w in words:
            if self.length(w) == 0:
                table[w] = x
                continue
            if self.law == "free":
                table[w] = self.generators[w[0]](table[w[1:]])
            else:
                i = next(k for k, n in enumerate(w) if n > 0)
                prev = w[:i] + (w[i] - 1,) + w[i + 1:]
                table[w] = self.generators[i](table[prev])
        return table

    def orbit(self, x, horizon: int | None = None) -> OrbitTable:
        return self.tail_orbit(x, 0, horizon)

    def tail_orbit(self, x, start: int, horizon: int | None = None) -> OrbitTable:
        """Orbit entries whose word length lies in [start, horizon]."""
        H = self.horizon if horizon is None else horizon
        if H < 1:
            raise UsageError("horizon must be >= 1")
        if start > H:
            raise UsageError(f"tail start {start} exceeds horizon {H}")
        if self.law == "single":
            pts, p = [], x
            g = self.generators[0]
            for n in range(H + 1):
                if n >= start:
                    pts.append(p)
                if n < H:
                    p = g(p)
            return OrbitTable(x, tuple((n,) for n in range(start, H + 1)), tuple(pts), H, start)
        ws = self.words(H)
        table = self.orbit_points(x, ws)
        keep = [w for w in ws if self.length(w) >= start]
        return OrbitTable(x, tuple(keep), tuple(table[w] for w in keep), H, start)


def _compositions(total: int, parts: int):
    """Exponent vectors with the given sum, in lexicographically decreasing order."""
    if parts == 1:
        yield (total,)
        return
    for first in range(total, -1, -1):
        for rest in _compositions(total - first, parts - 1):
            yield (first,) + rest


@dataclass(frozen=True)
class PreorderPolicy:
    """The preorder s <= t iff t is in S^1 s, decided on word indices."""

    law: str
    m: int = 1

    def leq(self, s, t) -> bool:
        if self.law == "free":
            return len(t) >= len(s) and tuple(t[len(t) - len(s):]) == tuple(s)
        return all(a <= b for a, b in zip(s, t))

    def check_total(self, words) -> tuple[bool, tuple | None]:
        for s, t in itertools.combinations(words, 2):
            if not (self.leq(s, t) or self.leq(t, s)):
                return False, (s, t)
        return True, None

    def check_reflexive_transitive(self, words) -> bool:
        if not all(self.leq(w, w) for w in words):
            return False
        for a, b, c in itertools.product(words, repeat=3):
            if self.leq(a, b) and self.leq(b, c) and not self.leq(a, c):
                return False
        return True


def preorder_for(action: Action) -> PreorderPolicy:
    return PreorderPolicy(action.law, action.m)


def functional_leq(action: Action, s, t, points, max_length: int = 4, tol: float = 1e-9):
    """Search for u with u . s = t as maps on ``points``; returns u or None."""
    targets = [action.evaluate(t, x) for x in points]
    for u in action.words(max_length):
        w = action.compose(u, s)
        if all(action.space.distance(action.evaluate(w, x), y) <= tol for x, y in zip(points, targets)):
            return u
    return None


def is_totally_preordered(action: Action, n_words: int = 12, seed: int = 0, max_length: int = 4) -> bool:
    """Totality of the preorder, by word index first and by maps as a fallback."""
    if action.law == "single":
        return True
    rng = np.random.default_rng(seed)
    words = action.sample_words(rng, n_words, min(action.horizon, 4), min_length=0)
    pts = action.space.sample(rng, 4)
    policy = preorder_for(action)
    for s, t in itertools.combinations(words, 2):
        if policy.leq(s, t) or policy.leq(t, s):
            continue
        if functional_leq(action, s, t, pts, max_length) is None and functional_leq(action, t, s, pts, max_length) is None:
            return False
    return True


@dataclass
class InclusionReport:
    passed: bool
    checked: int
    law: str
    found: list = field(default_factory=list)
    witness: dict | None = None


def check_inclusion_Ss_in_sS(action: Action, samples: int = 16, seed: int = 0, word_length: int = 2,
                             search_length: int = 6, n_points: int = 4, tol: float = 1e-9) -> InclusionReport:
    """For sampled words p, s look for q with p . s = s . q as maps on sampled points.

    Commuting laws pass with q = p and are not searched.
    """
    if action.law in ("single", "commuting"):
        return InclusionReport(True, 0, action.law)
    rng = np.random.default_rng(seed)
    pts = action.space.sample(rng, n_points)
    words = action.words(word_length, min_length=1)
    pairs = list(itertools.product(words, repeat=2))
    if len(pairs) > samples:
        pairs = [pairs[i] for i in np.sort(rng.choice(len(pairs), samples, replace=False))]
    found = []
    candidates = action.words(search_length, min_length=1)
    for p, s in pairs:
        lhs = [action.evaluate(action.compose(p, s), x) for x in pts]
        q = next((q for q in candidates
                  if all(action.space.distance(action.evaluate(action.compose(s, q), x), y) <= tol
                         for x, y in zip(pts, lhs))), None)
        if q is None:
            return InclusionReport(False, len(found) + 1, action.law, found,
                                   {"p": list(p), "s": list(s), "point": action.space.to_json(pts[0]),
                                    "search_length": search_length})
        found.append({"p": list(p), "s": list(s), "q": list(q)})
    return InclusionReport(True, len(found), action.law, found)


def make_action(space, desc: dict) -> Action:
    desc = dict(desc)
    gens = desc.pop("generators")
    return Action(space, gens, law=desc.pop("law", None), horizon=desc.pop("horizon", 64), **desc)
