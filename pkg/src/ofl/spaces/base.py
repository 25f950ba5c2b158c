"""Common machinery for the concrete spaces."""
from __future__ import annotations

import math
from typing import Any

import numpy as np

from ..errors import DomainError, UnsupportedOperation
from ..metric import TOL


class Lens:
    """The intersection B(x, R1) ∩ B(y, R2) of two closed balls.

    Subclasses know the exact shape; :class:`SampledLens` only has samples.
    """

    empty = False

    def center(self) -> tuple[Any, float]:
        """Center and radius of a ball containing the whole lens."""
        raise NotImplementedError

    def far_pair(self):
        """Two lens points realising (or bounding below) its diameter, or None."""
        return None

    def extremes(self) -> list:
        """Exact boundary points worth checking during validation."""
        pair = self.far_pair()
        return [] if pair is None else list(pair)

    def sample(self, rng, n: int) -> list:
        raise NotImplementedError


class SampledLens(Lens):
    """Lens known only through rejection samples drawn from the first ball."""

    def __init__(self, space, x, y, R1, R2, rng, n: int = 256, max_draws: int = 20000):
        self.space, self.x, self.y, self.R1, self.R2 = space, x, y, R1, R2
        self._rng = rng
        self.points = self._draw(rng, n, max_draws)
        self.empty = not self.points

    def _draw(self, rng, n, max_draws):
        kept: list = []
        drawn = 0
        batch = max(4 * n, 64)
        while len(kept) < n and drawn < max_draws:
            cand = self.space.ball_sample(rng, self.x, self.R1, batch)
            drawn += batch
            if not cand:
                break
            d = self.space.distances(self.y, cand)
            kept.extend(p for p, di in zip(cand, d) if di <= self.R2)
        return kept[:n]

    def center(self):
        z = self.space.center(self.points)
        return z, float(np.max(self.space.distances(z, self.points)))

    def sample(self, rng, n):
        return self._draw(rng, n, 50 * n)


class MetricSpace:
    """Base class for bounded metric spaces with optional geometric oracles.

    Subclasses implement :meth:`distance`, :meth:`sample`, :meth:`contains`
    and :meth:`domain_diameter`; the oracles default to raising
    :class:`UnsupportedOperation`.
    """

    kind = "abstract"

    # -- metric ---------------------------------------------------------------
    def distance(self, x, y) -> float:
        raise NotImplementedError

    def distances(self, x, pts) -> np.ndarray:
        return np.array([self.distance(x, p) for p in pts], dtype=float)

    def cross(self, P, Q) -> np.ndarray:
        """Distance matrix between two point lists."""
        return np.array([self.distances(p, Q) for p in P], dtype=float).reshape(len(P), len(Q))

    def pairwise(self, pts) -> np.ndarray:
        return self.cross(pts, pts)

    # -- domain ---------------------------------------------------------------
    def sample(self, rng, n: int) -> list:
        raise NotImplementedError

    def contains(self, x, tol: float = TOL) -> bool:
        raise NotImplementedError

    def domain_diameter(self) -> float:
        raise NotImplementedError

    def landmarks(self) -> list:
        """Distinguished points mixed into every sample plan."""
        return []

    def ball_sample(self, rng, center, radius, n: int) -> list:
        """Points of B(center, radius) inside the domain (rejection by default)."""
        out: list = []
        for _ in range(50):
            cand = self.sample(rng, max(4 * n, 64))
            d = self.distances(center, cand)
            out.extend(p for p, di in zip(cand, d) if di <= radius)
            if len(out) >= n:
                break
        return out[:n]

    def point_at_distance(self, rng, x, d: float):
        """A domain point at distance exactly ``d`` from ``x``, or None."""
        raise UnsupportedOperation(f"{self.kind} cannot place points at a given distance")

    # -- oracles --------------------------------------------------------------
    def cover(self, pts):
        raise UnsupportedOperation(f"{self.kind} has no admissible-cover oracle")

    def center(self, pts):
        raise UnsupportedOperation(f"{self.kind} has no center oracle")

    def lens(self, x, y, R1: float, R2: float) -> Lens | None:
        """Exact lens description, or None when the space has none."""
        return None

    def has_regularity_oracle(self) -> bool:
        return type(self).lens is not MetricSpace.lens

    def regularity_oracle(self, x, y, r: float, k: float, mu: float):
        """Two-ball absorption: return ``(z, alpha)`` with alpha < 1, or None.

        The returned ball B(z, alpha*r) contains
        B(x, (1+mu) r) ∩ B(y, k (1+mu) r).  ``None`` means the lens is too
        wide for any ball of radius below ``r`` at this configuration.
        """
        check_regularity_args(self, x, y, r, k, mu)
        lens = self.lens(x, y, (1 + mu) * r, k * (1 + mu) * r)
        if lens is None:
            raise UnsupportedOperation(f"{self.kind} has no regularity oracle")
        if lens.empty:
            return x, 0.0
        z, rad = lens.center()
        alpha = rad / r
        if alpha >= 1.0:
            return None
        return z, alpha

    def reference_constants(self) -> dict:
        return {"kappa": None, "normal_coeff": None}

    # -- serialisation --------------------------------------------------------
    def params(self) -> dict:
        return {}

    def describe(self) -> dict:
        return {"type": self.kind, **self.params()}

    def to_json(self, p):
        return p

    def from_json(self, obj):
        return obj


def check_regularity_args(space, x, y, r, k, mu):
    if not r > 0:
        raise DomainError(f"radius must be positive, got {r}")
    if k < 1:
        raise DomainError(f"k must be >= 1, got {k}")
    if not 0 < mu < 1:
        raise DomainError(f"mu must lie in (0, 1), got {mu}")
    if space.distance(x, y) < (1 - mu) * r - TOL * max(1.0, r):
        raise DomainError("configuration violates d(x, y) >= (1 - mu) r")


def log_uniform(rng, lo: float, hi: float, n: int | None = None):
    return np.exp(rng.uniform(math.log(lo), math.log(hi), n))
