"""Eventually constant real sequences with the sup metric.

This is the smallest piece of l_inf that is closed under the
shift-and-prepend isometry: the limsup of an eventually constant sequence
is just its tail value, so the map can be evaluated exactly.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from ..metric import TOL
from .base import MetricSpace


@dataclass(frozen=True)
class SeqPoint:
    """(x_1, ..., x_m, t, t, t, ...) stored as ``prefix`` and ``tail``."""

    prefix: tuple
    tail: float

    def __post_init__(self):
        pre = [float(v) for v in self.prefix]
        t = float(self.tail)
        while pre and pre[-1] == t:
            pre.pop()
        object.__setattr__(self, "prefix", tuple(pre))
        object.__setattr__(self, "tail", t)

    @classmethod
    def trusted(cls, prefix: tuple, tail: float, array=None) -> "SeqPoint":
        """Skip normalisation; the caller guarantees float entries and no trailing tail values."""
        p = object.__new__(cls)
        object.__setattr__(p, "prefix", prefix)
        object.__setattr__(p, "tail", tail)
        if array is not None:
            p.__dict__["array"] = array
        return p

    @cached_property
    def array(self) -> np.ndarray:
        return np.asarray(self.prefix, dtype=float)

    def padded(self, m: int) -> np.ndarray:
        out = np.full(m, self.tail)
        out[: len(self.prefix)] = self.array
        return out

    def __getitem__(self, i: int) -> float:
        return self.prefix[i] if i < len(self.prefix) else self.tail

    @property
    def limsup(self) -> float:
        return self.tail


def seq(*prefix, tail=0.0) -> SeqPoint:
    return SeqPoint(tuple(prefix), tail)


def _stack(pts) -> tuple[np.ndarray, np.ndarray]:
    m = max(len(p.prefix) for p in pts)
    tails = np.array([p.tail for p in pts])
    P = np.repeat(tails[:, None], m, axis=1)
    for i, p in enumerate(pts):
        P[i, : len(p.prefix)] = p.array
    return P, tails


@dataclass(frozen=True, eq=False)
class SeqBoxCover:
    lo: np.ndarray
    hi: np.ndarray
    tail_lo: float
    tail_hi: float

    def contains(self, p, tol=TOL) -> bool:
        m = max(len(self.lo), len(p.prefix))
        v = p.padded(m)
        lo = np.concatenate([self.lo, np.full(m - len(self.lo), self.tail_lo)])
        hi = np.concatenate([self.hi, np.full(m - len(self.hi), self.tail_hi)])
        return bool(np.all(v >= lo - tol) and np.all(v <= hi + tol)
                    and self.tail_lo - tol <= p.tail <= self.tail_hi + tol)

    def witness_points(self) -> list:
        return [SeqPoint(tuple(self.lo), self.tail_lo), SeqPoint(tuple(self.hi), self.tail_hi)]

    def dense_sample(self, rng, m: int) -> list:
        out = self.witness_points()
        for _ in range(m):
            out.append(SeqPoint(tuple(rng.uniform(self.lo, self.hi)), float(rng.uniform(self.tail_lo, self.tail_hi))))
        return out

    def describe(self) -> dict:
        return {"kind": "seq_box", "lo": self.lo.tolist(), "hi": self.hi.tolist(),
                "tail": [self.tail_lo, self.tail_hi]}


@dataclass(frozen=True)
class EventuallyConstSeqSpace(MetricSpace):
    """All eventually constant sequences; samples come from a box.

    The space itself is unbounded like l_inf, so :meth:`contains` only
    asks for finite entries.  ``lo``, ``hi`` and ``max_prefix`` describe
    where :meth:`sample` draws from.
    """

    lo: float = -1.0
    hi: float = 1.0
    max_prefix: int = 8

    kind = "seq"

    def __post_init__(self):
        if not self.lo < self.hi or self.max_prefix < 0:
            raise ValueError("need lo < hi and max_prefix >= 0")

    def distance(self, x, y):
        m = max(len(x.prefix), len(y.prefix))
        gap = abs(x.tail - y.tail)
        if m:
            gap = max(gap, float(np.max(np.abs(x.padded(m) - y.padded(m)))))
        return gap

    def distances(self, x, pts):
        if not len(pts):
            return np.zeros(0)
        P, tails = _stack(list(pts) + [x])
        d = np.abs(tails[:-1] - tails[-1])
        if P.shape[1]:
            d = np.maximum(d, np.max(np.abs(P[:-1] - P[-1]), axis=1))
        return d

    def fast_diameter(self, pts) -> float:
        """In the sup metric the diameter is the widest coordinate range."""
        P, tails = _stack(list(pts))
        d = float(np.ptp(tails))
        if P.shape[1]:
            d = max(d, float(np.max(np.ptp(P, axis=0))))
        return d

    def sample(self, rng, n):
        out = []
        for _ in range(n):
            m = int(rng.integers(0, self.max_prefix + 1))
            out.append(SeqPoint(tuple(rng.uniform(self.lo, self.hi, m)), float(rng.uniform(self.lo, self.hi))))
        return out

    def contains(self, x, tol=TOL):
        return isinstance(x, SeqPoint) and math.isfinite(x.tail) and all(math.isfinite(v) for v in x.prefix)

    def domain_diameter(self):
        return math.inf

    def landmarks(self):
        return [seq(tail=0.0), seq(tail=self.lo), seq(tail=self.hi), seq(self.hi, tail=self.lo)]

    def point_at_distance(self, rng, x, d):
        i = int(rng.integers(0, len(x.prefix) + 1))
        if i == len(x.prefix):
            return SeqPoint(x.prefix, x.tail + rng.choice([-d, d]))
        pre = list(x.prefix)
        pre[i] += rng.choice([-d, d])
        return SeqPoint(tuple(pre), x.tail)

    def cover(self, pts):
        P, tails = _stack(pts)
        return SeqBoxCover(P.min(axis=0), P.max(axis=0), float(tails.min()), float(tails.max()))

    def center(self, pts):
        c = self.cover(pts)
        return SeqPoint(tuple(0.5 * (c.lo + c.hi)), 0.5 * (c.tail_lo + c.tail_hi))

    def reference_constants(self):
        return {"kappa": 1.0, "normal_coeff": 0.5}

    def params(self):
        return {"lo": self.lo, "hi": self.hi, "max_prefix": self.max_prefix}

    def to_json(self, p):
        return {"prefix": list(p.prefix), "tail": p.tail}

    def from_json(self, obj):
        return SeqPoint(tuple(obj["prefix"]), obj["tail"])

    def random_admissible(self, rng):
        return self.cover(self.sample(rng, 3))

    def structured_sets(self):
        return [[seq(self.lo, tail=self.hi), seq(self.hi, tail=self.lo)]]
