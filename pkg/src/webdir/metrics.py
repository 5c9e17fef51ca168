"""Browse-quality measures computed over one trace or a batch of them."""

from __future__ import annotations

import statistics
from collections import Counter
from dataclasses import dataclass

import numpy as np

from .directory import WebDirectory
from .errors import EmptyReportSet, InvalidTrace, MissingSemantics, TraceNotFromRoot
from .semantics import DEFAULT_SIM_FLOOR, SemanticsBinding, distance, resolve_all


@dataclass(frozen=True)
class BrowseTrace:
    steps: tuple[int, ...]
    target_resource: str
    target_category: int
    truncated: bool = False

    def __post_init__(self):
        object.__setattr__(self, "steps", tuple(int(s) for s in self.steps))

    def __len__(self):
        return len(self.steps)


def validate_trace(wd: WebDirectory, b: BrowseTrace) -> None:
    if not b.steps:
        raise InvalidTrace("trace has no steps")
    for s in b.steps:
        if s not in wd.categories:
            raise InvalidTrace(f"unknown category {s}")
    if b.target_category not in wd.categories:
        raise InvalidTrace(f"unknown target category {b.target_category}")
    for a, c in zip(b.steps, b.steps[1:]):
        if not wd.is_step(a, c):
            raise InvalidTrace(f"{a} -> {c} is not a browse step")
    if b.truncated:
        return
    if b.steps[-1] != b.target_category:
        raise InvalidTrace(f"trace ends at {b.steps[-1]}, not at target {b.target_category}")
    if b.target_resource not in wd.categories[b.target_category].resources:
        raise InvalidTrace(f"{b.target_resource!r} is not listed in category {b.target_category}")


def path_ratio(wd: WebDirectory, b: BrowseTrace) -> float:
    validate_trace(wd, b)
    if b.truncated:
        raise InvalidTrace("path ratio is undefined for a truncated trace")
    shortest = wd.shortest_path_length(b.steps[0], b.target_category)
    return 1.0 - shortest / len(b.steps)


def max_revisit(b: BrowseTrace) -> int:
    if not b.steps:
        raise InvalidTrace("trace has no steps")
    return max(Counter(b.steps).values()) - 1


def _vectors(wd, binding, vectors):
    return vectors if vectors is not None else resolve_all(wd, binding)


def ddp(wd: WebDirectory, binding: SemanticsBinding, b: BrowseTrace,
        sim_floor: float = DEFAULT_SIM_FLOOR, vectors: dict | None = None):
    """Step-wise decreases of semantic distance to the target and their running totals.

    Returns ``(terms, partial_sums)``; the last partial sum telescopes to
    ``dist(first, target) - dist(last, target)``.
    """
    vecs = _vectors(wd, binding, vectors)
    for s in (*b.steps, b.target_category):
        if s not in vecs:
            raise MissingSemantics(f"category {s} has no semantics")
    target = vecs[b.target_category]
    dists = np.array([distance(vecs[s], target, sim_floor) for s in b.steps])
    terms = dists[:-1] - dists[1:]
    return terms.tolist(), np.cumsum(terms).tolist()


def root_distance_monotone(wd: WebDirectory, binding: SemanticsBinding, b: BrowseTrace,
                           sim_floor: float = DEFAULT_SIM_FLOOR, vectors: dict | None = None,
                           tol: float = 1e-12) -> bool:
    if not b.steps or b.steps[0] != wd.root:
        raise TraceNotFromRoot(b.steps[0] if b.steps else None)
    vecs = _vectors(wd, binding, vectors)
    root = vecs[wd.root]
    ds = [distance(root, vecs[s], sim_floor) for s in b.steps]
    return all(later >= earlier - tol for earlier, later in zip(ds, ds[1:]))


@dataclass(frozen=True)
class EvaluateOptions:
    bypass_non_semantic: bool = False
    sim_floor: float = DEFAULT_SIM_FLOOR
    converge_tol: float = 1e-6


@dataclass
class MetricsReport:
    pr: float | None
    mr: int
    ddp_terms: list[float]
    ddp_partial_sums: list[float]
    ddp_final: float | None
    ddp_converged: bool | None
    root_monotone: bool | None  # None when the trace does not start at the root
    trace_len: int
    min_len: int | None
    truncated: bool = False
    target_resource: str = ""
    target_category: int | None = None


def bypass_trace(wd: WebDirectory, b: BrowseTrace) -> BrowseTrace:
    """Map flagged steps to their surviving ancestor and collapse immediate repeats."""
    steps = []
    for s in b.steps:
        s2 = wd.surviving_ancestor(s)
        if not steps or steps[-1] != s2:
            steps.append(s2)
    return BrowseTrace(tuple(steps), b.target_resource, wd.surviving_ancestor(b.target_category),
                       b.truncated)


def evaluate_trace(wd: WebDirectory, binding: SemanticsBinding, b: BrowseTrace,
                   options: EvaluateOptions = EvaluateOptions(), vectors: dict | None = None,
                   _view: WebDirectory | None = None) -> MetricsReport:
    if options.bypass_non_semantic and any(c.non_semantic for c in wd.categories.values()):
        view = _view if _view is not None else wd.contract_non_semantic_levels()
        b = bypass_trace(wd, b)
        wd, vectors = view, (vectors if _view is not None else None)
    validate_trace(wd, b)
    mr = max_revisit(b)
    if b.truncated:
        return MetricsReport(None, mr, [], [], None, None, None, len(b), None, True,
                             b.target_resource, b.target_category)
    vecs = _vectors(wd, binding, vectors)
    min_len = wd.shortest_path_length(b.steps[0], b.target_category)
    pr = 1.0 - min_len / len(b.steps)
    terms, sums = ddp(wd, binding, b, options.sim_floor, vecs)
    final = sums[-1] if sums else 0.0
    monotone = None
    if b.steps[0] == wd.root:
        monotone = root_distance_monotone(wd, binding, b, options.sim_floor, vecs)
    return MetricsReport(pr, mr, terms, sums, final, abs(final) <= options.converge_tol, monotone,
                         len(b), min_len, False, b.target_resource, b.target_category)


def evaluate_traces(wd: WebDirectory, binding: SemanticsBinding, traces,
                    options: EvaluateOptions = EvaluateOptions()) -> list[MetricsReport]:
    """Evaluate many traces, resolving semantics (and the bypass view) once."""
    view = None
    if options.bypass_non_semantic and any(c.non_semantic for c in wd.categories.values()):
        view = wd.contract_non_semantic_levels()
    vecs = resolve_all(view if view is not None else wd, binding)
    return [evaluate_trace(wd, binding, b, options, vecs, view) for b in traces]


@dataclass
class Summary:
    count: int
    mean: float | None
    min: float | None
    max: float | None
    std: float | None

    @classmethod
    def of(cls, xs):
        xs = list(xs)
        if not xs:
            return cls(0, None, None, None, None)
        return cls(len(xs), statistics.fmean(xs), min(xs), max(xs), statistics.pstdev(xs))


@dataclass
class AggregateReport:
    traces: int
    truncated: int
    pr: Summary
    mr: Summary
    ddp_converged_fraction: float | None
    root_monotone_fraction: float | None


def aggregate(reports: list[MetricsReport]) -> AggregateReport:
    """Statistics over complete traces; truncated ones are only counted.

    Standard deviations are population deviations.
    """
    if not reports:
        raise EmptyReportSet("no reports to aggregate")
    done = [r for r in reports if not r.truncated]
    conv = [r.ddp_converged for r in done]
    mono = [r.root_monotone for r in done if r.root_monotone is not None]
    return AggregateReport(
        traces=len(reports),
        truncated=len(reports) - len(done),
        pr=Summary.of(r.pr for r in done),
        mr=Summary.of(r.mr for r in done),
        ddp_converged_fraction=(sum(conv) / len(conv)) if conv else None,
        root_monotone_fraction=(sum(mono) / len(mono)) if mono else None,
    )
