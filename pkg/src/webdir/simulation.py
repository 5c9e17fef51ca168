"""Seeded browsing agents that produce traces toward target resources.

Three agents are available:

``bfs``
    follows a shortest browse from the root.
``greedy``
    always steps to the neighbour semantically closest to the target
    category (ties to the lowest id) and never steps straight back to the
    category it just left unless that is the only way out.
``random``
    picks a uniformly random neighbour.

Every trace gets its own generator derived from ``(seed, target index,
repetition)``, so results do not depend on evaluation order.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Sequence

import numpy as np

from . import kernels
from .directory import WebDirectory
from .errors import UnknownTarget
from .metrics import BrowseTrace, EvaluateOptions, MetricsReport, evaluate_traces
from .semantics import DEFAULT_SIM_FLOOR, SemanticsBinding, distance, resolve_all


class StrategyKind(str, Enum):
    OPTIMAL_BFS = "bfs"
    GREEDY_SEMANTIC = "greedy"
    RANDOM_WALK = "random"


@dataclass(frozen=True)
class AgentStrategy:
    kind: StrategyKind
    step_budget: int | None = None  # None: ten times the directory depth
    rng_seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "kind", StrategyKind(self.kind))
        if self.step_budget is not None and self.step_budget < 1:
            raise ValueError("step_budget must be at least 1")
        if not 0 <= self.rng_seed < 2 ** 64:
            raise ValueError("rng_seed must be an unsigned 64-bit integer")

    def budget_for(self, wd: WebDirectory) -> int:
        return self.step_budget if self.step_budget is not None else 10 * wd.depth


@dataclass
class SimulationRun:
    directory: WebDirectory
    binding: SemanticsBinding
    targets: Sequence[str]
    strategy: AgentStrategy
    sim_floor: float = DEFAULT_SIM_FLOOR

    def __post_init__(self):
        self.targets = list(self.targets)
        for t in self.targets:
            if self.directory.category_of(t) is None:
                raise UnknownTarget(t)
        self._vectors = None

    @property
    def vectors(self):
        if self._vectors is None:
            self._vectors = resolve_all(self.directory, self.binding)
        return self._vectors


def trace_rng(seed: int, target_index: int, repetition: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence([seed, target_index, repetition]))


def simulate_browse(run: SimulationRun, target: str, rng: np.random.Generator | None = None) -> BrowseTrace:
    wd = run.directory
    tcat = wd.category_of(target)
    if tcat is None:
        raise UnknownTarget(target)
    adj = wd.adjacency()
    start, goal = adj.pos[wd.root], adj.pos[tcat]
    budget = run.strategy.budget_for(wd)
    kind = run.strategy.kind

    if kind is StrategyKind.OPTIMAL_BFS:
        path = wd.shortest_path(wd.root, tcat)
        truncated = len(path) - 1 > budget
        steps = path[:budget + 1]
        return BrowseTrace(tuple(steps), target, tcat, truncated)

    if kind is StrategyKind.GREEDY_SEMANTIC:
        vecs = run.vectors
        tvec = vecs[tcat]
        node_dist = np.array([distance(vecs[int(c)], tvec, run.sim_floor) for c in adj.ids])
        raw = kernels.greedy_walk(adj.indptr, adj.indices, start, goal, budget, node_dist)
    else:
        if rng is None:
            rng = trace_rng(run.strategy.rng_seed, 0, 0)
        uniforms = rng.random(budget)
        raw = kernels.random_walk(adj.indptr, adj.indices, start, goal, budget, uniforms)

    steps = tuple(int(adj.ids[i]) for i in raw)
    return BrowseTrace(steps, target, tcat, steps[-1] != tcat)


def generate_traces(run: SimulationRun, repetitions: int = 1) -> list[BrowseTrace]:
    if repetitions < 1:
        raise ValueError("repetitions must be at least 1")
    seed = run.strategy.rng_seed
    return [simulate_browse(run, t, trace_rng(seed, i, rep))
            for i, t in enumerate(run.targets) for rep in range(repetitions)]


def run_experiment(run: SimulationRun, repetitions: int = 1,
                   options: EvaluateOptions | None = None) -> list[MetricsReport]:
    """Simulate every target ``repetitions`` times and evaluate each trace."""
    options = options or EvaluateOptions(sim_floor=run.sim_floor)
    traces = generate_traces(run, repetitions)
    return evaluate_traces(run.directory, run.binding, traces, options)
