"""Finite metric trees with points anywhere along the edges.

A point is a pair ``(edge_index, offset)`` where the offset is measured
from the edge's first endpoint.  Vertex points therefore have several
encodings; the metric does not care which one is used.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import cached_property

import networkx as nx
import numpy as np

from ..metric import TOL
from .base import Lens, MetricSpace

DEFAULT_EDGES = ((0, 1, 1.0), (1, 2, 1.0), (1, 3, 0.5), (0, 4, 0.8), (4, 5, 1.2), (4, 6, 0.7))


def four_point_ok(space, a, b, c, d, tol: float = 1e-12) -> bool:
    """Gromov's four-point condition: the two largest pair sums coincide."""
    s = sorted([space.distance(a, b) + space.distance(c, d),
                space.distance(a, c) + space.distance(b, d),
                space.distance(a, d) + space.distance(b, c)])
    return s[2] - s[1] <= tol * max(1.0, s[2])


def _arrays(pts):
    E = np.fromiter((p[0] for p in pts), dtype=int, count=len(pts))
    T = np.fromiter((p[1] for p in pts), dtype=float, count=len(pts))
    return E, T


@dataclass(frozen=True, eq=False)
class SubtreeCover:
    """cov(A) in a tree, with an exact membership test.

    p lies in every ball containing A iff d(c, p) <= D(c, A) for every
    centre c.  Along an edge that slack is piecewise linear and is
    smallest at vertices, at points of A, at p itself, or at midpoints of
    pairs from A, so checking those centres is enough.
    """

    space: "TreeSpace"
    points: tuple

    @cached_property
    def _centers(self):
        sp = self.space
        cs = list(self.points) + sp.vertex_points()
        for a, b in itertools.combinations(self.points, 2):
            cs.append(sp.geodesic_point(a, b, 0.5 * sp.distance(a, b)))
        return cs

    @cached_property
    def _radii(self):
        return np.max(self.space.cross(self._centers, list(self.points)), axis=1)

    def contains(self, p, tol=TOL) -> bool:
        cs = self._centers + [p]
        radii = np.append(self._radii, float(np.max(self.space.distances(p, list(self.points)))))
        return bool(np.all(self.space.distances(p, cs) <= radii + tol))

    def witness_points(self) -> list:
        return list(self.points)

    def dense_sample(self, rng, m: int) -> list:
        out = list(self.points)
        for _ in range(100):
            out.extend(q for q in self.space.sample(rng, 4 * m) if self.contains(q))
            if len(out) >= m:
                break
        return out[: max(m, len(self.points))]

    def describe(self) -> dict:
        return {"kind": "subtree", "generators": [list(p) for p in self.points]}


class TreeLens(Lens):
    def __init__(self, space, pieces):
        self.space = space
        self.pieces = pieces  # list of (edge, lo, hi)
        self.empty = not pieces

    def extremes(self):
        return [(e, v) for e, lo, hi in self.pieces for v in (lo, hi)]

    def far_pair(self):
        ext = self.extremes()
        D = self.space.pairwise(ext)
        i, j = np.unravel_index(int(np.argmax(D)), D.shape)
        return ext[i], ext[j]

    def center(self):
        p, q = self.far_pair()
        d = self.space.distance(p, q)
        return self.space.geodesic_point(p, q, 0.5 * d), 0.5 * d

    def sample(self, rng, n):
        lens = np.array([hi - lo for _, lo, hi in self.pieces])
        w = lens / lens.sum() if lens.sum() > 0 else np.full(len(lens), 1.0 / len(lens))
        idx = rng.choice(len(self.pieces), size=n, p=w)
        return [(self.pieces[i][0], float(rng.uniform(self.pieces[i][1], self.pieces[i][2]))) for i in idx]


@dataclass(frozen=True)
class TreeSpace(MetricSpace):
    edges: tuple = field(default=DEFAULT_EDGES)

    kind = "tree"

    def __post_init__(self):
        edges = tuple((int(u), int(v), float(L)) for u, v, L in self.edges)
        if any(L <= 0 for _, _, L in edges):
            raise ValueError("edge lengths must be positive")
        g = nx.Graph()
        g.add_weighted_edges_from(edges)
        if not nx.is_tree(g):
            raise ValueError("edges do not form a tree")
        object.__setattr__(self, "edges", edges)

    @cached_property
    def graph(self):
        g = nx.Graph()
        g.add_weighted_edges_from(self.edges)
        return g

    @cached_property
    def _vdist(self):
        nodes = sorted(self.graph.nodes)
        idx = {v: i for i, v in enumerate(nodes)}
        D = np.zeros((len(nodes), len(nodes)))
        for s, lengths in nx.all_pairs_dijkstra_path_length(self.graph):
            for t, L in lengths.items():
                D[idx[s], idx[t]] = L
        U = np.array([idx[u] for u, _, _ in self.edges])
        V = np.array([idx[v] for _, v, _ in self.edges])
        Ls = np.array([L for _, _, L in self.edges])
        return D, U, V, Ls, idx

    def _ends(self, E, T):
        D, U, V, Ls, _ = self._vdist
        return U[E], V[E], T, Ls[E] - T

    def distances(self, x, pts):
        if not len(pts):
            return np.zeros(0)
        D = self._vdist[0]
        E, T = _arrays(pts)
        xu, xv, xdu, xdv = self._ends(np.array([x[0]]), np.array([float(x[1])]))
        qu, qv, qdu, qdv = self._ends(E, T)
        best = np.minimum.reduce([
            xdu + D[xu, qu] + qdu, xdu + D[xu, qv] + qdv,
            xdv + D[xv, qu] + qdu, xdv + D[xv, qv] + qdv,
        ])
        same = E == x[0]
        best[same] = np.minimum(best[same], np.abs(T[same] - float(x[1])))
        return best

    def distance(self, x, y):
        return float(self.distances(x, [y])[0])

    def cross(self, P, Q):
        return np.array([self.distances(p, Q) for p in P]).reshape(len(P), len(Q))

    def sample(self, rng, n):
        Ls = self._vdist[3]
        E = rng.choice(len(Ls), size=n, p=Ls / Ls.sum())
        return [(int(e), float(rng.uniform(0, Ls[e]))) for e in E]

    def contains(self, x, tol=TOL):
        e, t = x
        return 0 <= e < len(self.edges) and -tol <= t <= self.edges[e][2] + tol

    def domain_diameter(self):
        return float(self._vdist[0].max())

    def vertex_points(self) -> list:
        seen, out = set(), []
        for e, (u, v, L) in enumerate(self.edges):
            for w, t in ((u, 0.0), (v, L)):
                if w not in seen:
                    seen.add(w)
                    out.append((e, t))
        return out

    def landmarks(self):
        return self.vertex_points() + [(e, 0.5 * L) for e, (_, _, L) in enumerate(self.edges)]

    def _vertex_point(self, w):
        for e, (u, v, L) in enumerate(self.edges):
            if u == w:
                return (e, 0.0)
            if v == w:
                return (e, L)
        raise KeyError(w)

    def geodesic_point(self, p, q, s: float):
        """The point at distance ``s`` from ``p`` on the geodesic toward ``q``."""
        d = self.distance(p, q)
        s = min(max(s, 0.0), d)
        if p[0] == q[0]:
            return (p[0], p[1] + s * np.sign(q[1] - p[1]))
        # leave p's edge through whichever endpoint lies on the path to q
        u, v, L = self.edges[p[0]]
        ends = [(u, p[1]), (v, L - p[1])]
        a, da = min(ends, key=lambda w: w[1] + self.distance(self._vertex_point(w[0]), q))
        if s <= da:
            return (p[0], p[1] - s if a == u else p[1] + s)
        path = nx.shortest_path(self.graph, a, self._last_vertex(a, q), weight="weight")
        walked = da
        for w0, w1 in zip(path, path[1:]):
            e, L = self._edge_between(w0, w1)
            if s <= walked + L:
                off = s - walked
                return (e, off if self.edges[e][0] == w0 else L - off)
            walked += L
        # remaining distance lies on q's own edge
        off = s - walked
        u, v, L = self.edges[q[0]]
        return (q[0], off if path[-1] == u else L - off)

    def _last_vertex(self, a, q):
        u, v, L = self.edges[q[0]]
        D, _, _, _, idx = self._vdist
        return u if D[idx[a], idx[u]] + q[1] <= D[idx[a], idx[v]] + (L - q[1]) else v

    def _edge_between(self, w0, w1):
        for e, (u, v, L) in enumerate(self.edges):
            if {u, v} == {w0, w1}:
                return e, L
        raise KeyError((w0, w1))

    def point_at_distance(self, rng, x, d):
        for _ in range(50):
            q = self.sample(rng, 1)[0]
            if self.distance(x, q) >= d:
                return self.geodesic_point(x, q, d)
        return None

    def _edge_interval(self, e, x, R):
        u, v, L = self.edges[e]
        if x[0] == e:
            return x[1] - R, x[1] + R
        du = self.distance(self._vertex_point(u), x)
        dv = self.distance(self._vertex_point(v), x)
        if du < dv:
            return 0.0, R - du
        return L - (R - dv), L

    def cover(self, pts):
        return SubtreeCover(self, tuple(pts))

    def center(self, pts):
        pts = list(pts)
        if len(pts) == 1:
            return pts[0]
        D = self.pairwise(pts)
        i, j = np.unravel_index(int(np.argmax(D)), D.shape)
        return self.geodesic_point(pts[i], pts[j], 0.5 * D[i, j])

    def lens(self, x, y, R1, R2):
        pieces = []
        for e, (_, _, L) in enumerate(self.edges):
            a1, b1 = self._edge_interval(e, x, R1)
            a2, b2 = self._edge_interval(e, y, R2)
            lo, hi = max(a1, a2, 0.0), min(b1, b2, L)
            if lo <= hi:
                pieces.append((e, lo, hi))
        return TreeLens(self, pieces)

    def reference_constants(self):
        return {"kappa": 2.0, "normal_coeff": 0.5}

    def params(self):
        return {"edges": [list(e) for e in self.edges]}

    def to_json(self, p):
        return [int(p[0]), float(p[1])]

    def from_json(self, obj):
        return (int(obj[0]), float(obj[1]))

    def random_admissible(self, rng):
        return SubtreeCover(self, tuple(self.sample(rng, int(rng.integers(2, 5)))))

    def structured_sets(self):
        return [self.vertex_points()]
