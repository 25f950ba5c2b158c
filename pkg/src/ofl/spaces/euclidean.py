"""Euclidean balls and finite-dimensional l_p balls."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import stats

from ..errors import UnsupportedOperation
from ..metric import TOL
from .base import Lens, MetricSpace


def _circumsphere(R: list) -> tuple[np.ndarray, float]:
    """Smallest sphere through every point of R (at most n + 1 points)."""
    if not R:
        return None, -1.0
    p0 = R[0]
    if len(R) == 1:
        return p0.copy(), 0.0
    A = np.array([p - p0 for p in R[1:]])
    rhs = 0.5 * np.einsum("ij,ij->i", A, A)
    lam = np.linalg.lstsq(A @ A.T, rhs, rcond=None)[0]
    c = p0 + A.T @ lam
    return c, float(np.linalg.norm(c - p0))


def _welzl(P: list, R: list, dim: int):
    c, rad = _circumsphere(R)
    if len(R) == dim + 1:
        return c, rad
    for i, p in enumerate(P):
        if c is None or np.linalg.norm(p - c) > rad * (1 + 1e-12) + 1e-15:
            c, rad = _welzl(P[:i], R + [p], dim)
    return c, rad


def min_enclosing_ball(pts) -> tuple[np.ndarray, float]:
    """Minimum enclosing ball by Welzl's randomized incremental algorithm.

    The shuffle is seeded from the input size so results are reproducible.
    """
    P = np.asarray(pts, dtype=float)
    if P.ndim == 1:
        P = P[None, :]
    P = np.unique(P, axis=0)
    order = np.random.default_rng(len(P)).permutation(len(P))
    c, rad = _welzl([P[i] for i in order], [], P.shape[1])
    # final radius as the exact farthest distance so callers get D(c, A)
    return c, float(np.max(np.linalg.norm(P - c, axis=1)))


def unit_directions(n: int, m: int) -> np.ndarray:
    if n == 1:
        return np.array([[1.0], [-1.0]])
    if n == 2:
        t = 2 * np.pi * np.arange(m) / m
        return np.stack([np.cos(t), np.sin(t)], axis=1)
    g = np.random.default_rng(m).standard_normal((m, n))
    return g / np.linalg.norm(g, axis=1, keepdims=True)


@dataclass(frozen=True, eq=False)
class BallFamilyCover:
    """Intersection of a finite family of balls that each contain the generators.

    The true ball hull is the intersection over *all* such balls, so this
    set contains it; adding directions or radii only shrinks the family's
    intersection toward the hull.
    """

    points: np.ndarray
    centers: np.ndarray
    radii: np.ndarray

    @classmethod
    def build(cls, pts, n_dirs: int = 64, multiples=(1.0, 2.0, 8.0, 64.0)):
        P = np.asarray(pts, dtype=float)
        c0, r0 = min_enclosing_ball(P)
        centers, radii = [c0], [r0]
        if r0 > 0:
            U = unit_directions(P.shape[1], n_dirs)
            W = c0 - P
            for m in multiples[1:]:
                rho = m * r0
                for u in U:
                    uw = W @ u
                    t = float(np.min(uw + np.sqrt(np.maximum(uw**2 - np.einsum("ij,ij->i", W, W) + rho**2, 0.0))))
                    centers.append(c0 - t * u)
                    radii.append(rho)
        return cls(P, np.array(centers), np.array(radii))

    def contains(self, p, tol=TOL) -> bool:
        d = np.linalg.norm(self.centers - np.asarray(p, float), axis=1)
        return bool(np.all(d <= self.radii + tol))

    def witness_points(self) -> list:
        return list(self.points)

    def dense_sample(self, rng, m: int) -> list:
        c, r = self.centers[0], self.radii[0]
        out = list(self.points)
        n = self.points.shape[1]
        while len(out) < m + len(self.points):
            cand = c + r * uniform_ball(rng, 4 * m, n)
            d = np.linalg.norm(cand[:, None, :] - self.centers[None, :, :], axis=2)
            out.extend(cand[np.all(d <= self.radii + TOL, axis=1)])
        return out[: m + len(self.points)]

    def describe(self) -> dict:
        return {"kind": "ball_family", "n_balls": int(len(self.radii)),
                "meb_center": self.centers[0].tolist(), "meb_radius": float(self.radii[0])}


def uniform_ball(rng, m: int, n: int) -> np.ndarray:
    g = rng.standard_normal((m, n))
    g /= np.linalg.norm(g, axis=1, keepdims=True)
    return g * rng.random((m, 1)) ** (1.0 / n)


class BallLens(Lens):
    """Exact lens of two Euclidean balls, described in axis coordinates.

    The lens is symmetric about the line through the two centres, so the
    enclosing ball's centre sits on that line and the farthest lens points
    from it are the two tips on the axis or the ridge sphere where the
    boundaries meet.
    """

    def __init__(self, x, y, R1, R2, space=None):
        self.x, self.y, self.R1, self.R2 = x, y, R1, R2
        self.space = space
        diff = y - x
        d = float(np.linalg.norm(diff))
        self.d = d
        self.u = diff / d if d > 0 else np.eye(len(x))[0]
        self.empty = d > R1 + R2
        self.mode = "lens"
        if self.empty:
            return
        if d <= R2 - R1:
            self.mode = "ball1"
        elif d <= R1 - R2:
            self.mode = "ball2"
        else:
            x0 = (d * d + R1 * R1 - R2 * R2) / (2 * d)
            self.x0 = x0
            self.h = math.sqrt(max(R1 * R1 - x0 * x0, 0.0))
            self.a, self.b = d - R2, R1

    def _radius_at(self, c):
        return max(math.hypot(self.x0 - c, self.h), abs(self.b - c), abs(c - self.a))

    def _axis_center(self):
        if self.mode == "ball1":
            return 0.0, self.R1
        if self.mode == "ball2":
            return self.d, self.R2
        a, b, x0, h = self.a, self.b, self.x0, self.h
        cands = [x0, 0.5 * (a + b), a, b]
        for e in (a, b):
            if abs(e - x0) > 1e-15:
                cands.append((e * e - x0 * x0 - h * h) / (2 * (e - x0)))
        cands = [min(max(c, a), b) for c in cands]
        best = min(cands, key=self._radius_at)
        return best, self._radius_at(best)

    def center(self):
        c, rad = self._axis_center()
        z = self.x + c * self.u
        if self.space is not None:
            z = self.space.project(z)
        return z, rad

    def _perp(self):
        n = len(self.x)
        if n == 1:
            return None
        v = np.zeros(n)
        j = int(np.argmin(np.abs(self.u)))
        v[j] = 1.0
        v -= (v @ self.u) * self.u
        return v / np.linalg.norm(v)

    def far_pair(self):
        if self.mode == "ball1":
            return self._ball_pair(self.x, self.R1)
        if self.mode == "ball2":
            return self._ball_pair(self.y, self.R2)
        axial = (self.x + self.a * self.u, self.x + self.b * self.u)
        v = self._perp()
        if v is None:
            return axial
        if self.x0 <= 0:
            t, w = 0.0, self.R1
        elif self.x0 >= self.d:
            t, w = self.d, self.R2
        else:
            t, w = self.x0, self.h
        if 2 * w > self.b - self.a:
            mid = self.x + t * self.u
            return mid - w * v, mid + w * v
        return axial

    def extremes(self):
        if self.mode != "lens":
            return list(self.far_pair())
        pts = [self.x + self.a * self.u, self.x + self.b * self.u]
        v = self._perp()
        if v is not None:
            mid = self.x + self.x0 * self.u
            pts += [mid + self.h * v, mid - self.h * v]
        return pts

    def _ball_pair(self, c, R):
        v = self._perp()
        v = self.u if v is None else v
        return c - R * v, c + R * v

    def sample(self, rng, n):
        small, big = (self.x, self.y) if self.R1 <= self.R2 else (self.y, self.x)
        rs, rb = min(self.R1, self.R2), max(self.R1, self.R2)
        out: list = []
        for _ in range(200):
            cand = small + rs * uniform_ball(rng, max(4 * n, 64), len(self.x))
            keep = np.linalg.norm(cand - big, axis=1) <= rb
            if self.space is not None:
                keep &= np.linalg.norm(cand - self.space._c, axis=1) <= self.space.radius
            out.extend(cand[keep])
            if len(out) >= n:
                break
        return out[:n]


class _VectorSpace(MetricSpace):
    """Shared plumbing for spaces of numpy vectors inside a centred ball."""

    @property
    def _c(self):
        return np.zeros(self.dim) if self.center_point is None else np.asarray(self.center_point, float)

    def _norm(self, V):
        return np.linalg.norm(V, ord=self.p, axis=-1)

    def distance(self, x, y):
        return float(self._norm(np.asarray(x, float) - np.asarray(y, float)))

    def distances(self, x, pts):
        P = np.asarray(pts, dtype=float).reshape(len(pts), self.dim)
        return self._norm(P - np.asarray(x, float))

    def cross(self, P, Q):
        P = np.asarray(P, dtype=float).reshape(len(P), self.dim)
        Q = np.asarray(Q, dtype=float).reshape(len(Q), self.dim)
        return self._norm(P[:, None, :] - Q[None, :, :])

    def contains(self, x, tol=TOL):
        return self.distance(x, self._c) <= self.radius + tol

    def domain_diameter(self):
        return 2.0 * self.radius

    def project(self, z):
        """Nearest domain point for p = 2, identity inside the domain."""
        v = z - self._c
        nv = float(np.linalg.norm(v))
        return z if nv <= self.radius else self._c + v * (self.radius / nv)

    def point_at_distance(self, rng, x, d):
        x = np.asarray(x, float)
        for _ in range(50):
            g = rng.standard_normal(self.dim)
            y = x + d * g / self._norm(g)
            if self.contains(y, 0.0):
                return y
        return None

    def to_json(self, p):
        return [float(v) for v in np.asarray(p)]

    def from_json(self, obj):
        return np.asarray(obj, dtype=float)


@dataclass(frozen=True)
class EuclideanSpace(_VectorSpace):
    n: int = 2
    radius: float = 1.0
    center_point: tuple = field(default=None)

    kind = "euclidean"
    p = 2

    def __post_init__(self):
        if self.n < 1 or self.radius <= 0:
            raise ValueError("need n >= 1 and a positive radius")
        if self.center_point is not None:
            object.__setattr__(self, "center_point", tuple(float(v) for v in self.center_point))

    @property
    def dim(self):
        return self.n

    def sample(self, rng, n):
        return list(self._c + self.radius * uniform_ball(rng, n, self.n))

    def landmarks(self):
        c = self._c
        pts = [c]
        for i in range(self.n):
            e = np.zeros(self.n)
            e[i] = self.radius
            pts += [c + e, c - e]
        return pts

    def ball_sample(self, rng, center, radius, n):
        out: list = []
        c = np.asarray(center, float)
        for _ in range(50):
            cand = c + radius * uniform_ball(rng, max(4 * n, 64), self.n)
            out.extend(cand[np.linalg.norm(cand - self._c, axis=1) <= self.radius])
            if len(out) >= n:
                break
        return out[:n]

    def cover(self, pts):
        return BallFamilyCover.build(pts)

    def center(self, pts):
        return min_enclosing_ball(pts)[0]

    def lens(self, x, y, R1, R2):
        return BallLens(np.asarray(x, float), np.asarray(y, float), R1, R2, space=self)

    def jung_constant(self):
        return math.sqrt(self.n / (2.0 * (self.n + 1)))

    def reference_constants(self):
        return {"kappa": math.sqrt(2.0) if self.n >= 2 else 2.0, "normal_coeff": self.jung_constant()}

    def params(self):
        return {"n": self.n, "radius": self.radius,
                "center": None if self.center_point is None else list(self.center_point)}

    def random_admissible(self, rng):
        k = int(rng.integers(2, self.n + 3))
        return BallFamilyCover.build(self.sample(rng, k))

    def structured_sets(self):
        # regular simplex with unit edges: the extremal set for the Jung ratio
        n = self.n
        V = np.eye(n + 1)
        V -= V.mean(axis=0)
        basis = np.linalg.svd(V)[2][:n]
        S = V @ basis.T
        S /= np.linalg.norm(S[0] - S[1])
        return [list(self._c + 0.5 * self.radius * S)]


@dataclass(frozen=True)
class LpSpace(_VectorSpace):
    N: int = 8
    p: float = 2.0
    radius: float = 1.0

    kind = "lp"
    center_point = None

    def __post_init__(self):
        if self.N < 1 or not 1 <= self.p < math.inf or self.radius <= 0:
            raise ValueError("need N >= 1, 1 <= p < inf and a positive radius")

    @property
    def dim(self):
        return self.N

    def basis(self, i: int) -> np.ndarray:
        e = np.zeros(self.N)
        e[i] = self.radius
        return e

    def _uniform(self, rng, m):
        # Barthe-Guedon-Mendelson-Naor representation of the uniform l_p ball law
        g = stats.gennorm.rvs(self.p, size=(m, self.N), random_state=rng)
        e = rng.exponential(size=(m, 1))
        return g / (np.sum(np.abs(g) ** self.p, axis=1, keepdims=True) + e) ** (1.0 / self.p)

    def sample(self, rng, n):
        return list(self.radius * self._uniform(rng, n))

    def landmarks(self):
        return [np.zeros(self.N)] + [self.basis(i) for i in range(self.N)]

    def ball_sample(self, rng, center, radius, n):
        out: list = []
        c = np.asarray(center, float)
        for _ in range(50):
            cand = c + radius * self._uniform(rng, max(4 * n, 64))
            out.extend(cand[self._norm(cand) <= self.radius])
            if len(out) >= n:
                break
        return out[:n]

    def project(self, z):
        nz = float(self._norm(z))
        return z if nz <= self.radius else z * (self.radius / nz)

    def center(self, pts):
        P = np.asarray(pts, dtype=float).reshape(len(pts), self.N)
        if self.p == 2:
            return min_enclosing_ball(P)[0]
        if len(np.unique(P, axis=0)) == 1:
            return P[0].copy()
        import cvxpy as cp

        z = cp.Variable(self.N)
        t = cp.Variable()
        cons = [cp.norm(z - P[i], self.p) <= t for i in range(len(P))]
        cp.Problem(cp.Minimize(t), cons).solve(solver=cp.CLARABEL)
        if z.value is None:
            raise UnsupportedOperation("l_p center solve failed")
        return self.project(np.asarray(z.value, dtype=float))

    def reference_constants(self):
        return {"kappa": math.sqrt(2.0) if self.p == 2 and self.N >= 2 else None, "normal_coeff": None}

    def params(self):
        return {"N": self.N, "p": self.p, "radius": self.radius}
