"""Functionals over finite point sets of an arbitrary metric space.

Every function takes the space as its first argument and a finite,
nonempty collection of points.  Points are whatever the space uses
(floats, numpy vectors, tree locations, ...); the space supplies the
distance.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Any, Sequence

import numpy as np

from .errors import DomainError, UsageError

#: Global comparison tolerance used by every ``<=`` check in the package.
TOL = 1e-9


@dataclass(frozen=True)
class PointSet:
    """A finite ordered collection of points tagged with the space they live in."""

    space: Any
    points: tuple

    def __post_init__(self):
        object.__setattr__(self, "points", tuple(self.points))
        if not self.points:
            raise DomainError("a PointSet must be nonempty")
        bad = next((p for p in self.points if not self.space.contains(p)), None)
        if bad is not None:
            raise DomainError(f"{bad!r} is not a point of {self.space.kind}")

    def __len__(self):
        return len(self.points)

    def __iter__(self):
        return iter(self.points)


@dataclass(frozen=True)
class BallSpec:
    center: Any
    radius: float

    def __post_init__(self):
        if self.radius < 0:
            raise DomainError(f"negative radius {self.radius}")

    def contains(self, space, p, tol: float = TOL) -> bool:
        return space.distance(self.center, p) <= self.radius + tol


def as_points(space, A) -> list:
    """Unwrap ``A`` into a list, checking emptiness and space identity."""
    if isinstance(A, PointSet):
        if A.space != space:
            raise UsageError(f"point set belongs to {A.space!r}, not {space!r}")
        pts = list(A.points)
    else:
        pts = list(A)
    if not pts:
        raise DomainError("empty point set")
    return pts


def sup_distance(space, x, A) -> float:
    """Farthest-point distance D(x, A) = max_a d(x, a)."""
    pts = as_points(space, A)
    return float(np.max(space.distances(x, pts)))


def diameter(space, A) -> float:
    pts = as_points(space, A)
    if len(pts) == 1:
        return 0.0
    fast = getattr(space, "fast_diameter", None)
    if fast is not None:
        return fast(pts)
    return float(np.max(space.pairwise(pts)))


def inner_radius(space, A) -> float:
    """Self-radius r(A) = min over x in A of D(x, A)."""
    pts = as_points(space, A)
    if len(pts) == 1:
        return 0.0
    return float(np.min(np.max(space.pairwise(pts), axis=1)))


def admissible_cover(space, A):
    """Smallest intersection of closed balls containing ``A``.

    Delegates to the space's cover oracle; spaces without one raise
    :class:`~ofl.errors.UnsupportedOperation`.
    """
    return space.cover(as_points(space, A))


def chebyshev_center(space, A) -> tuple[Any, float]:
    """Return ``(z, D(z, A))`` for the space's canonical near-center of ``A``."""
    pts = as_points(space, A)
    z = space.center(pts)
    return z, sup_distance(space, z, pts)


def farthest(space, x, A: Sequence) -> tuple[int, float]:
    """Index and value of the farthest point of ``A`` from ``x``."""
    d = space.distances(x, list(A))
    i = int(np.argmax(d))
    return i, float(d[i])
