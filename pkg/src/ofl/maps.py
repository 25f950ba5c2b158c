"""Catalog of generator maps.

Each map is a small frozen dataclass so that actions can be pickled to
worker processes and compared for equality in tests.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from numbers import Rational

import numpy as np

from .errors import ConfigError
from .spaces.sequences import SeqPoint


@dataclass(frozen=True)
class Identity:
    name = "identity"

    def __call__(self, x):
        return x


@dataclass(frozen=True)
class SignFlipContraction:
    """x -> a x for generic reals, x -> -a x for exact rationals.

    Rationality is a property of the representation: Fractions are exact
    rationals, floats are treated as irrational.
    """

    a: Fraction = Fraction(1, 2)
    name = "sa"

    def __post_init__(self):
        a = Fraction(self.a).limit_denominator(10**6) if isinstance(self.a, float) else Fraction(self.a)
        if not 0 < a < 1:
            raise ConfigError(f"sa needs 0 < a < 1, got {a}")
        object.__setattr__(self, "a", a)

    def __call__(self, x):
        if isinstance(x, Rational) and not isinstance(x, bool):
            return -self.a * x
        return float(self.a) * float(x)


@dataclass(frozen=True)
class Square:
    """x -> x^2 on [0, 1) and 1 -> 0."""

    name = "square"

    def __call__(self, x):
        return 0.0 if x == 1 else x * x


@dataclass(frozen=True)
class Step:
    """Everything below 1 jumps to 1; 1 drops to 0."""

    name = "step"

    def __call__(self, x):
        return 0.0 if x == 1 else 1.0


@dataclass(frozen=True)
class CyclicBasisShift:
    """e_i -> e_{i+1} (and e_N -> e_1); every other point -> e_1."""

    N: int = 8
    radius: float = 1.0
    name = "shift_lp"

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        out = np.zeros(self.N)
        i = int(np.argmax(np.abs(x)))
        e = np.zeros(self.N)
        e[i] = self.radius
        j = (i + 1) % self.N if np.max(np.abs(x - e)) <= 1e-12 else 0
        out[j] = self.radius
        return out


@dataclass(frozen=True)
class PrependLimsup:
    """(x_1, x_2, ...) -> (1 + limsup x_n, x_1, x_2, ...), an isometry of l_inf."""

    name = "prus"

    def __call__(self, x: SeqPoint):
        head = 1.0 + x.tail
        return SeqPoint.trusted((head,) + x.prefix, x.tail, np.concatenate(([head], x.array)))


@dataclass(frozen=True)
class Contraction:
    factor: float = 0.5
    center: float | tuple = 0.0
    name = "contraction"

    def __call__(self, x):
        if isinstance(x, (int, float, Fraction)):
            c = float(self.center)
            return c + self.factor * (float(x) - c)
        x = np.asarray(x, dtype=float)
        c = np.broadcast_to(np.asarray(self.center, dtype=float), x.shape)
        return c + self.factor * (x - c)


@dataclass(frozen=True)
class Rotation:
    angle: float = 1.0
    name = "rotation"

    def matrix(self):
        c, s = math.cos(self.angle), math.sin(self.angle)
        return np.array([[c, -s], [s, c]])

    def __call__(self, x):
        return self.matrix() @ np.asarray(x, dtype=float)


@dataclass(frozen=True)
class Reflection:
    """Reflection across the line through 0 at ``angle``, optionally scaled."""

    angle: float = 0.0
    scale: float = 1.0
    name = "reflection"

    def matrix(self):
        c, s = math.cos(2 * self.angle), math.sin(2 * self.angle)
        return self.scale * np.array([[c, s], [s, -c]])

    def __call__(self, x):
        return self.matrix() @ np.asarray(x, dtype=float)


MAPS = {
    "identity": Identity,
    "sa": SignFlipContraction,
    "square": Square,
    "step": Step,
    "shift_lp": CyclicBasisShift,
    "prus": PrependLimsup,
    "contraction": Contraction,
    "rotation": Rotation,
    "reflection": Reflection,
}

MAP_NOTES = {
    "identity": "x -> x",
    "sa": "a x on floats, -a x on exact rationals; parameter a in (0, 1)",
    "square": "x^2 on [0, 1), 1 -> 0",
    "step": "[0, 1) -> 1, 1 -> 0",
    "shift_lp": "cyclic basis shift in R^N, everything else to e_1",
    "prus": "prepend 1 + limsup to an eventually constant sequence",
    "contraction": "x -> c + f (x - c)",
    "rotation": "planar rotation by an angle",
    "reflection": "planar reflection across a line, optional scale",
}


def builtin_maps() -> dict:
    return dict(MAPS)


def make_map(desc) -> object:
    """Build a map from a name or ``{"name": ..., **params}``."""
    if isinstance(desc, str):
        desc = {"name": desc}
    desc = dict(desc)
    name = desc.pop("name", None)
    if name not in MAPS:
        raise ConfigError(f"unknown map {name!r}; known: {sorted(MAPS)}")
    if name == "sa" and isinstance(desc.get("a"), str):
        desc["a"] = Fraction(desc["a"])
    if name == "contraction" and isinstance(desc.get("center"), list):
        desc["center"] = tuple(desc["center"])
    try:
        return MAPS[name](**desc)
    except TypeError as exc:
        raise ConfigError(f"bad parameters for map {name}: {exc}") from None


def map_params(g) -> dict:
    out = {"name": g.name}
    for f in getattr(g, "__dataclass_fields__", {}):
        v = getattr(g, f)
        out[f] = str(v) if isinstance(v, Fraction) else (list(v) if isinstance(v, tuple) else v)
    return out
