"""Concrete metric spaces and a small registry for building them by name."""
from __future__ import annotations

from ..errors import ConfigError
from .base import Lens, MetricSpace, SampledLens
from .euclidean import BallFamilyCover, EuclideanSpace, LpSpace, min_enclosing_ball
from .interval import IntervalSpace
from .maxnorm import MaxNormSpace
from .sequences import EventuallyConstSeqSpace, SeqPoint, seq
from .tree import TreeSpace, four_point_ok

SPACES = {
    "interval": IntervalSpace,
    "maxnorm": MaxNormSpace,
    "euclidean": EuclideanSpace,
    "lp": LpSpace,
    "tree": TreeSpace,
    "seq": EventuallyConstSeqSpace,
}

SPACE_NOTES = {
    "interval": "closed interval [a, b], usual metric",
    "maxnorm": "box in R^n with the max norm",
    "euclidean": "ball in R^n with the Euclidean norm",
    "lp": "ball in R^N with the p-norm",
    "tree": "finite weighted metric tree, points on edges",
    "seq": "eventually constant sequences, sup metric",
}


def make_space(desc: dict) -> MetricSpace:
    """Build a space from ``{"type": name, **params}``."""
    desc = dict(desc)
    kind = desc.pop("type", None)
    if kind not in SPACES:
        raise ConfigError(f"unknown space type {kind!r}; known: {sorted(SPACES)}")
    if kind == "euclidean" and "center" in desc:
        desc["center_point"] = desc.pop("center")
    if kind == "tree" and "edges" in desc:
        desc["edges"] = tuple(tuple(e) for e in desc["edges"])
    for key in ("lo", "hi"):
        if kind == "maxnorm" and isinstance(desc.get(key), list):
            desc[key] = tuple(desc[key])
    try:
        return SPACES[kind](**desc)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"bad parameters for {kind}: {exc}") from None


__all__ = [
    "Lens", "MetricSpace", "SampledLens", "BallFamilyCover", "EuclideanSpace", "LpSpace",
    "IntervalSpace", "MaxNormSpace", "EventuallyConstSeqSpace", "SeqPoint", "seq", "TreeSpace",
    "four_point_ok", "min_enclosing_ball", "SPACES", "SPACE_NOTES", "make_space",
]
