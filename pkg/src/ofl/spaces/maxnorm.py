"""R^n with the max norm, restricted to an axis-aligned box.

Balls are cubes, so every admissible set is a box and the admissible
cover of a finite set is its coordinate bounding box.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

from ..metric import TOL
from .base import Lens, MetricSpace


@dataclass(frozen=True, eq=False)
class BoxCover:
    lo: np.ndarray
    hi: np.ndarray

    def contains(self, p, tol=TOL) -> bool:
        p = np.asarray(p, dtype=float)
        return bool(np.all(p >= self.lo - tol) and np.all(p <= self.hi + tol))

    def witness_points(self) -> list:
        n = len(self.lo)
        if n > 10:
            return [self.lo.copy(), self.hi.copy()]
        return [np.where(mask, self.hi, self.lo) for mask in itertools.product([False, True], repeat=n)]

    def dense_sample(self, rng, m: int) -> list:
        n = len(self.lo)
        per_axis = max(3, int(round(m ** (1.0 / n))) | 1)
        if per_axis ** n <= 4 * m:
            axes = [np.linspace(l, h, per_axis) for l, h in zip(self.lo, self.hi)]
            grid = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, n)
            return list(grid)
        pts = rng.uniform(self.lo, self.hi, size=(m, n))
        return list(pts) + self.witness_points() + [0.5 * (self.lo + self.hi)]

    def describe(self) -> dict:
        return {"kind": "box", "lo": self.lo.tolist(), "hi": self.hi.tolist()}


class BoxLens(Lens):
    def __init__(self, lo: np.ndarray, hi: np.ndarray):
        self.lo, self.hi = lo, hi
        self.empty = bool(np.any(lo > hi))

    def center(self):
        return 0.5 * (self.lo + self.hi), float(np.max(0.5 * (self.hi - self.lo)))

    def far_pair(self):
        j = int(np.argmax(self.hi - self.lo))
        q = self.lo.copy()
        q[j] = self.hi[j]
        return self.lo.copy(), q

    def extremes(self):
        return BoxCover(self.lo, self.hi).witness_points()

    def sample(self, rng, n):
        return list(rng.uniform(self.lo, self.hi, size=(n, len(self.lo))))


@dataclass(frozen=True)
class MaxNormSpace(MetricSpace):
    n: int = 2
    lo: tuple = field(default=None)
    hi: tuple = field(default=None)

    kind = "maxnorm"

    def __post_init__(self):
        lo = (0.0,) * self.n if self.lo is None else tuple(float(v) for v in self.lo)
        hi = (1.0,) * self.n if self.hi is None else tuple(float(v) for v in self.hi)
        if len(lo) != self.n or len(hi) != self.n or any(l >= h for l, h in zip(lo, hi)):
            raise ValueError("bounds must be n pairs with lo < hi")
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)

    @property
    def _lo(self):
        return np.array(self.lo)

    @property
    def _hi(self):
        return np.array(self.hi)

    def distance(self, x, y):
        return float(np.max(np.abs(np.asarray(x, float) - np.asarray(y, float))))

    def distances(self, x, pts):
        P = np.asarray(pts, dtype=float).reshape(len(pts), self.n)
        return np.max(np.abs(P - np.asarray(x, float)), axis=1)

    def cross(self, P, Q):
        P = np.asarray(P, dtype=float).reshape(len(P), self.n)
        Q = np.asarray(Q, dtype=float).reshape(len(Q), self.n)
        return np.max(np.abs(P[:, None, :] - Q[None, :, :]), axis=2)

    def sample(self, rng, n):
        return list(rng.uniform(self._lo, self._hi, size=(n, self.n)))

    def contains(self, x, tol=TOL):
        return BoxCover(self._lo, self._hi).contains(x, tol)

    def domain_diameter(self):
        return float(np.max(self._hi - self._lo))

    def landmarks(self):
        mid = 0.5 * (self._lo + self._hi)
        pts = [mid]
        if self.n <= 3:
            pts += BoxCover(self._lo, self._hi).witness_points()
        return pts

    def ball_sample(self, rng, center, radius, n):
        c = np.asarray(center, float)
        lo = np.maximum(c - radius, self._lo)
        hi = np.minimum(c + radius, self._hi)
        return list(rng.uniform(lo, hi, size=(n, self.n)))

    def point_at_distance(self, rng, x, d):
        x = np.asarray(x, float)
        for _ in range(20):
            if rng.random() < 0.3:
                u = np.zeros(self.n)
                u[rng.integers(self.n)] = rng.choice([-1.0, 1.0])
            else:
                u = rng.uniform(-1, 1, self.n)
                u[rng.integers(self.n)] = rng.choice([-1.0, 1.0])
            y = x + d * u
            if self.contains(y, 0.0):
                return y
        return None

    def cover(self, pts):
        P = np.asarray(pts, dtype=float).reshape(len(pts), self.n)
        return BoxCover(P.min(axis=0), P.max(axis=0))

    def center(self, pts):
        P = np.asarray(pts, dtype=float).reshape(len(pts), self.n)
        return 0.5 * (P.min(axis=0) + P.max(axis=0))

    def lens(self, x, y, R1, R2):
        x, y = np.asarray(x, float), np.asarray(y, float)
        lo = np.maximum.reduce([x - R1, y - R2, self._lo])
        hi = np.minimum.reduce([x + R1, y + R2, self._hi])
        return BoxLens(lo, hi)

    def reference_constants(self):
        return {"kappa": 1.0 if self.n >= 2 else 2.0, "normal_coeff": 0.5}

    def params(self):
        return {"n": self.n, "lo": list(self.lo), "hi": list(self.hi)}

    def to_json(self, p):
        return [float(v) for v in np.asarray(p)]

    def from_json(self, obj):
        return np.asarray(obj, dtype=float)

    def random_admissible(self, rng):
        a = rng.uniform(self._lo, self._hi, size=(2, self.n))
        return BoxCover(a.min(axis=0), a.max(axis=0))

    def structured_sets(self):
        return [BoxCover(self._lo, self._hi).witness_points()]
