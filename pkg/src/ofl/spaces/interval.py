"""The compact interval [a, b] with the usual metric.

Points are Python numbers.  A :class:`fractions.Fraction` is an exact
rational; a float is treated as a generic (irrational) real.  Maps that
distinguish the two classes, such as the sign-flipping contraction, rely on
this convention.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from numbers import Rational

import numpy as np

from ..metric import TOL
from .base import Lens, MetricSpace


def is_rational(x) -> bool:
    return isinstance(x, Rational)


def as_floats(pts) -> np.ndarray:
    return np.fromiter((float(p) for p in pts), dtype=float, count=len(pts))


@dataclass(frozen=True)
class IntervalCover:
    lo: float
    hi: float

    def contains(self, p, tol: float = TOL) -> bool:
        return self.lo - tol <= float(p) <= self.hi + tol

    def witness_points(self) -> list:
        return [self.lo, self.hi]

    def dense_sample(self, rng, m: int) -> list:
        return list(np.linspace(self.lo, self.hi, m | 1))

    def describe(self) -> dict:
        return {"kind": "interval", "lo": self.lo, "hi": self.hi}


class IntervalLens(Lens):
    def __init__(self, lo: float, hi: float):
        self.lo, self.hi = lo, hi
        self.empty = lo > hi

    def center(self):
        return 0.5 * (self.lo + self.hi), 0.5 * (self.hi - self.lo)

    def far_pair(self):
        return self.lo, self.hi

    def sample(self, rng, n):
        return list(rng.uniform(self.lo, self.hi, n))


@dataclass(frozen=True)
class IntervalSpace(MetricSpace):
    a: float = 0.0
    b: float = 1.0
    rational_share: float = 0.0

    kind = "interval"

    def __post_init__(self):
        if not self.a < self.b:
            raise ValueError(f"need a < b, got [{self.a}, {self.b}]")
        if not 0.0 <= self.rational_share <= 1.0:
            raise ValueError("rational_share must lie in [0, 1]")

    def distance(self, x, y):
        return abs(float(x) - float(y))

    def distances(self, x, pts):
        return np.abs(as_floats(pts) - float(x))

    def cross(self, P, Q):
        return np.abs(as_floats(P)[:, None] - as_floats(Q)[None, :])

    def sample(self, rng, n):
        u = rng.uniform(self.a, self.b, n)
        if self.rational_share == 0.0:
            return list(u)
        exact = rng.random(n) < self.rational_share
        return [Fraction(v).limit_denominator(10_000) if e else float(v) for v, e in zip(u, exact)]

    def contains(self, x, tol=TOL):
        return self.a - tol <= float(x) <= self.b + tol

    def domain_diameter(self):
        return self.b - self.a

    def landmarks(self):
        a, b = self.a, self.b
        pts = [b, a, 0.5 * (a + b), a + 0.25 * (b - a), a + 0.75 * (b - a)]
        if self.rational_share > 0:
            pts += [Fraction(p).limit_denominator(10_000) for p in pts]
        return pts

    def ball_sample(self, rng, center, radius, n):
        c = float(center)
        return list(rng.uniform(max(self.a, c - radius), min(self.b, c + radius), n))

    def point_at_distance(self, rng, x, d):
        x = float(x)
        for y in ((x + d, x - d) if rng.random() < 0.5 else (x - d, x + d)):
            if self.contains(y, 0.0):
                return y
        return None

    def cover(self, pts):
        f = as_floats(pts)
        return IntervalCover(float(f.min()), float(f.max()))

    def center(self, pts):
        f = as_floats(pts)
        return 0.5 * (float(f.min()) + float(f.max()))

    def lens(self, x, y, R1, R2):
        x, y = float(x), float(y)
        return IntervalLens(max(x - R1, y - R2, self.a), min(x + R1, y + R2, self.b))

    def reference_constants(self):
        return {"kappa": 2.0, "normal_coeff": 0.5}

    def params(self):
        return {"a": self.a, "b": self.b, "rational_share": self.rational_share}

    def to_json(self, p):
        if is_rational(p) and not isinstance(p, bool):
            return {"rational": str(Fraction(p))}
        return float(p)

    def from_json(self, obj):
        if isinstance(obj, dict):
            return Fraction(obj["rational"])
        return float(obj)

    # the catalog of random admissible sets used by the normal-structure estimator
    def random_admissible(self, rng):
        u, v = sorted(rng.uniform(self.a, self.b, 2))
        return IntervalCover(float(u), float(v))

    def structured_sets(self):
        return [[self.a, self.b]]
