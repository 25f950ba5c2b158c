"""Monte Carlo estimates of the Lifschitz characteristic and the normal-structure coefficient.

The Lifschitz characteristic is bracketed from both sides:

* ``lower`` is the largest k in [1, 2] for which some (mu, alpha) grid
  point survived every sampled two-ball configuration.  It is a
  probabilistic bound, not a proof.
* ``upper`` is the smallest k for which a *certificate* was found: a
  configuration with d(x, y) >= r and two points p, q of
  B(x, r) ∩ B(y, k r) at distance 2r.  No ball of radius alpha r < r can
  hold both, and the lens only grows with mu, so the certificate rules out
  every (mu, alpha) pair at once.  Certificates replay exactly.
"""
from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError, UnsupportedOperation
from .metric import TOL, diameter, inner_radius
from .spaces.base import SampledLens, log_uniform

MU_GRID = tuple(float(v) for v in np.linspace(0.01, 0.2, 8))
ALPHA_GRID = tuple(float(v) for v in np.linspace(0.8, 0.999, 12))
CERT_SLACK = 1e-9


@dataclass
class Falsification:
    x: object
    y: object
    r: float
    z: object
    alpha: float
    escape: object
    escape_distance: float

    def replay(self, space, k: float, mu: float, tol: float = TOL) -> bool:
        """True when the stored escape point still breaks the containment."""
        inside = (space.distance(self.escape, self.x) <= (1 + mu) * self.r + tol
                  and space.distance(self.escape, self.y) <= k * (1 + mu) * self.r + tol)
        return inside and space.distance(self.escape, self.z) > self.alpha * self.r + tol


@dataclass
class RegularityWitness:
    k: float
    mu: float
    alpha: float
    n_configs: int
    n_tested: int
    skipped_empty: int
    skipped_placement: int
    worst_ratio: float
    failures: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.failures


@dataclass
class Certificate:
    k: float
    x: object
    y: object
    r: float
    p: object
    q: object

    def replay(self, space, k: float | None = None) -> bool:
        k = self.k if k is None else k
        r = self.r
        return (space.distance(self.x, self.y) >= r * (1 - CERT_SLACK)
                and all(space.distance(self.x, w) <= r * (1 + CERT_SLACK) for w in (self.p, self.q))
                and all(space.distance(self.y, w) <= k * r * (1 + CERT_SLACK) for w in (self.p, self.q))
                and all(space.contains(w) for w in (self.p, self.q))
                and space.distance(self.p, self.q) >= 2 * r * (1 - CERT_SLACK))

    def to_json(self, space) -> dict:
        return {"k": self.k, "r": self.r, **{n: space.to_json(getattr(self, n)) for n in ("x", "y", "p", "q")}}


@dataclass
class KappaBracket:
    space: dict
    lower: float
    upper: float
    budget: int
    seed: int
    configs_used: int
    evaluations: int
    passing: tuple | None
    certificate: Certificate | None
    reference: float | None
    mu_grid: tuple = MU_GRID
    alpha_grid: tuple = ALPHA_GRID
    notes: list = field(default_factory=list)

    @property
    def width(self) -> float:
        return self.upper - self.lower

    def contains(self, value: float) -> bool:
        return self.lower <= value <= self.upper


def _lens(space, x, y, R1, R2, rng):
    lens = space.lens(x, y, R1, R2)
    if lens is None:
        lens = SampledLens(space, x, y, R1, R2, rng)
    return lens


def _configs(space, rng, n: int, mu: float, exact_distance: bool = False) -> tuple[list, int]:
    """(x, y, r) triples with d(x, y) >= (1 - mu) r; half sit on the boundary."""
    diam = space.domain_diameter()
    if not math.isfinite(diam):
        diam = 2.0
    out, missed = [], 0
    xs = space.sample(rng, n)
    rs = log_uniform(rng, 0.01, diam, n)
    for i in range(n):
        r = float(rs[i])
        if exact_distance:
            d = r
        elif i % 2 == 0:
            d = (1 - mu) * r
        else:
            d = (1 - mu) * r + 2 * r * rng.random()
        y = space.point_at_distance(rng, xs[i], d)
        if y is None:
            missed += 1
            continue
        out.append((xs[i], y, r))
    return out, missed


def test_regularity(space, k: float, mu: float, alpha: float, n_configs: int = 1000, seed: int = 0,
                    n_check: int = 64, max_failures: int = 16) -> RegularityWitness:
    """Look for configurations whose lens escapes the ball B(z, alpha r)."""
    if k < 1:
        raise DomainError("k must be >= 1")
    if not (0 < mu < 1 and 0 < alpha < 1):
        raise DomainError("mu and alpha must lie in (0, 1)")
    rng = np.random.default_rng([seed, 11])
    configs, missed = _configs(space, rng, n_configs, mu)
    empty, tested, worst, failures = 0, 0, 0.0, []
    for x, y, r in configs:
        lens = _lens(space, x, y, (1 + mu) * r, k * (1 + mu) * r, rng)
        if lens.empty:
            empty += 1
            continue
        tested += 1
        z, _ = lens.center()
        probe = lens.extremes() + lens.sample(rng, n_check)
        dist = space.distances(z, probe)
        j = int(np.argmax(dist))
        worst = max(worst, float(dist[j]) / r)
        if dist[j] > alpha * r + TOL and len(failures) < max_failures:
            failures.append(Falsification(x, y, r, z, alpha, probe[j], float(dist[j])))
    return RegularityWitness(k, mu, alpha, n_configs, tested, empty, missed, worst, failures)


def _measure(space, configs, k: float, mu: float, rng, counter=None) -> float:
    """Largest enclosing-radius / r over the configurations (0 if all lenses are empty)."""
    worst = 0.0
    for x, y, r in configs:
        if counter is not None:
            counter[0] += 1
        lens = _lens(space, x, y, (1 + mu) * r, k * (1 + mu) * r, rng)
        if lens.empty:
            continue
        worst = max(worst, lens.center()[1] / r)
        if worst >= 1.0:
            break
    return worst


def _find_certificate(space, configs, k: float, rng, counter=None) -> Certificate | None:
    for x, y, r in configs:
        if counter is not None:
            counter[0] += 1
        lens = _lens(space, x, y, r, k * r, rng)
        if lens.empty:
            continue
        pair = lens.far_pair()
        if pair is None:
            continue
        p, q = pair
        if not (space.contains(p) and space.contains(q)):
            continue
        cert = Certificate(k, x, y, r, p, q)
        if cert.replay(space):
            return cert
    return None


def estimate_kappa(space, budget: int = 100_000, seed: int = 0, steps: int = 12) -> KappaBracket:
    """Bracket the Lifschitz characteristic by bisection over k in [1, 2].

    Roughly half the budget goes to the sampled lower bound and half to
    the certificate search.  Configurations are drawn once and reused at
    every k, so the pass/fail predicate is monotone in k and the bracket
    can only tighten as the budget grows.
    """
    rng = np.random.default_rng([seed, 21])
    count = [0]
    evals = len(MU_GRID) * (steps + 1)
    per = max(16, budget // (2 * evals))
    n_cert = max(64, budget // 2 // (steps + 2))
    used = 0
    configs = {}
    for i, mu in enumerate(MU_GRID):
        configs[mu], _ = _configs(space, np.random.default_rng([seed, 22, i]), per, mu)
        used += per
    alpha_max = max(ALPHA_GRID)

    def passes(k):
        for mu in MU_GRID:
            m = _measure(space, configs[mu], k, mu, rng, count)
            if m <= alpha_max:
                alpha = min(a for a in ALPHA_GRID if a >= m)
                return (mu, alpha, m)
        return None

    lo, hi = 1.0, 2.0
    passing = passes(lo)
    for _ in range(steps):
        mid = 0.5 * (lo + hi)
        got = passes(mid)
        if got is not None:
            lo, passing = mid, got
        else:
            hi = mid
    lower = lo

    cert_configs, _ = _configs(space, np.random.default_rng([seed, 23]), n_cert, 0.0, exact_distance=True)
    used += n_cert
    certificate = _find_certificate(space, cert_configs, 1.0, rng, count)
    if certificate is not None:
        upper = 1.0
    else:
        top = _find_certificate(space, cert_configs, 2.0, rng, count)
        if top is None:
            upper = 2.0
        else:
            a, b, certificate = 1.0, 2.0, top
            for _ in range(steps + 4):
                mid = 0.5 * (a + b)
                c = _find_certificate(space, cert_configs, mid, rng, count)
                if c is not None:
                    b, certificate = mid, c
                else:
                    a = mid
            upper = b
    notes = []
    if lower > upper:
        notes.append(f"sampled lower {lower:.6f} exceeded the certified upper; clipped")
        lower = upper
    return KappaBracket(space.describe(), lower, upper, budget, seed, used, count[0], passing, certificate,
                        space.reference_constants().get("kappa"), notes=notes)


@dataclass
class NormalStructureEstimate:
    value: float
    n_sets: int
    skipped: int
    generator: str
    density: int
    witness: dict | None = None


def estimate_normal_coeff(space, n_sets: int = 200, seed: int = 0, density: int = 400) -> NormalStructureEstimate:
    """Sampled sup of r(A) / diam(A) over admissible sets built from random generators.

    r(A) is an inner radius over a finite sample of A, so it can only
    overestimate the true value; diam(A) uses the same sample.
    """
    if not hasattr(space, "random_admissible"):
        raise UnsupportedOperation(f"{space.kind} has no admissible-set generator")
    rng = np.random.default_rng([seed, 31])
    sets = [space.cover(g) for g in space.structured_sets()]
    sets += [space.random_admissible(rng) for _ in range(n_sets)]
    best, wit, skipped = 0.0, None, 0
    for A in sets:
        pts = A.dense_sample(rng, density)
        d = diameter(space, pts)
        if d < TOL:
            skipped += 1
            continue
        ratio = inner_radius(space, pts) / d
        if ratio > best:
            best, wit = ratio, A.describe()
    return NormalStructureEstimate(best, len(sets) - skipped, skipped, type(sets[0]).__name__, density, wit)


CONSTANTS_COLUMNS = ["space", "kappa_lo", "kappa_hi", "normal_est", "budget", "seed"]


def constants_csv(rows: list) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CONSTANTS_COLUMNS)
    for r in rows:
        w.writerow([r["space"], _fmt(r.get("kappa_lo")), _fmt(r.get("kappa_hi")),
                    _fmt(r.get("normal_est")), r["budget"], r["seed"]])
    return buf.getvalue()


def _fmt(v):
    return "" if v is None else f"{v:.6f}"
