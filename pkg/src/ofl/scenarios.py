"""Scenario files: a versioned JSON description of one experiment.

Unknown keys are rejected everywhere so that archived scenarios either
load exactly as written or fail loudly.
"""
from __future__ import annotations

import json
from importlib import resources
from pathlib import Path
from typing import Any, Literal

from pydantic import BaseModel, ConfigDict, Field, ValidationError

from .actions import Action, make_action
from .analysis import SamplePlan
from .errors import ConfigError
from .solvers import SOLVERS, SolverConfig
from .spaces import make_space

SCHEMA_VERSION = 1
KINDS = ("analyze", "solve", "kappa", "normal")


class _Strict(BaseModel):
    model_config = ConfigDict(extra="forbid", strict=False)


class ActionSpec(_Strict):
    generators: list[Any] = Field(min_length=1)
    law: Literal["single", "commuting", "free"] | None = None
    horizon: int = Field(64, ge=1)


class PlanSpec(_Strict):
    n_pairs: int = Field(256, ge=1)
    horizon: int = Field(64, ge=1)
    n_words: int = Field(16, ge=1)
    x_points: list[Any] | None = None
    extra_pairs: list[tuple[Any, Any]] = []
    landmark_share: float = Field(0.25, ge=0, le=1)
    star_k: float | None = Field(None, gt=0)


class SolverSpec(_Strict):
    methods: list[Literal["picard", "orbit_center", "lifschitz"]] = ["orbit_center"]
    x0: Any
    epsilon: float = Field(1e-6, gt=0)
    max_iter: int = Field(200, ge=1)
    horizon: int = Field(64, ge=1)
    tail_start: int | None = None
    k: float = Field(1.5, ge=0)
    mu: float = Field(0.01, gt=0, lt=1)
    n_candidates: int = Field(32, ge=1)
    word: list[int] | None = None


class KappaSpec(_Strict):
    budget: int = Field(100_000, ge=100)
    steps: int = Field(12, ge=1)


class NormalSpec(_Strict):
    n_sets: int = Field(200, ge=1)
    density: int = Field(400, ge=2)


class Scenario(_Strict):
    version: Literal[1]
    name: str
    kind: Literal["analyze", "solve", "kappa", "normal"]
    seed: int = Field(ge=0, lt=2**64)
    description: str = ""
    space: dict[str, Any]
    action: ActionSpec | None = None
    plan: PlanSpec | None = None
    solver: SolverSpec | None = None
    kappa: KappaSpec | None = None
    normal: NormalSpec | None = None

    # -- builders ---------------------------------------------------------------
    def build_space(self):
        return make_space(self.space)

    def build_action(self, space=None) -> Action:
        if self.action is None:
            raise ConfigError(f"scenario {self.name} has no action block")
        return make_action(space or self.build_space(), self.action.model_dump())

    def sample_plan(self, space, horizon: int | None = None, workers: int = 1, seed: int | None = None) -> SamplePlan:
        p = self.plan or PlanSpec()
        conv = space.from_json
        return SamplePlan(
            seed=self.seed if seed is None else seed, n_pairs=p.n_pairs, horizon=horizon or p.horizon,
            n_words=p.n_words, landmark_share=p.landmark_share, workers=workers,
            x_points=None if p.x_points is None else [conv(v) for v in p.x_points],
            extra_pairs=[(conv(a), conv(b)) for a, b in p.extra_pairs])

    def solver_config(self, horizon: int | None = None, epsilon: float | None = None,
                      seed: int | None = None) -> SolverConfig:
        if self.solver is None:
            raise ConfigError(f"scenario {self.name} has no solver block")
        s = self.solver.model_dump(exclude={"methods", "x0"})
        if horizon is not None:
            s["horizon"], s["tail_start"] = horizon, None
        if epsilon is not None:
            s["epsilon"] = epsilon
        s["word"] = None if s["word"] is None else tuple(s["word"])
        return SolverConfig(seed=self.seed if seed is None else seed, **s)

    def start_point(self, space):
        return space.from_json(self.solver.x0)


def parse_scenario(data: dict) -> Scenario:
    try:
        sc = Scenario.model_validate(data)
    except ValidationError as exc:
        raise ConfigError(f"invalid scenario: {exc}") from None
    for m in (sc.solver.methods if sc.solver else []):
        if m not in SOLVERS:
            raise ConfigError(f"unknown solver {m}")
    sc.build_space()
    if sc.action is not None:
        sc.build_action()
    return sc


def load_scenario(path) -> Scenario:
    try:
        data = json.loads(Path(path).read_text())
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc}") from None
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path} is not valid JSON: {exc}") from None
    return parse_scenario(data)


def builtin_names() -> list:
    root = resources.files("ofl") / "data" / "scenarios"
    return sorted(p.name[:-5] for p in root.iterdir() if p.name.endswith(".json"))


def builtin_scenario(name: str) -> Scenario:
    root = resources.files("ofl") / "data" / "scenarios"
    f = root / f"{name}.json"
    if not f.is_file():
        raise ConfigError(f"unknown scenario {name!r}; known: {builtin_names()}")
    return parse_scenario(json.loads(f.read_text()))
