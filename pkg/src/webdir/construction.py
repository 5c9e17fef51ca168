"""Threshold-driven, order-dependent construction of a directory from a resource stream.

Each resource goes through three stages: identification (``sem``),
assignment (a hook that may override the proposed ontology) and addition,
which places it relative to the semantically closest existing category:

* distance > ``mindist_v``: new category one level below the closest one
* ``mindist_h`` < distance <= ``mindist_v``: new category next to it
* otherwise: the resource joins the closest category, whose ontology grows

While only the root exists the first resource always opens a new level-2
category. There is no back-tracking.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, Iterable, Mapping, Sequence

import numpy as np

from .directory import WebDirectory, new_directory
from .errors import (
    DirectoryNotEmpty,
    EmptyResource,
    InvalidThresholds,
    OnlyRootPresent,
    PlacementError,
    ReplayMismatch,
    WebDirError,
)
from .semantics import (
    DEFAULT_SIM_FLOOR,
    ConceptVector,
    Resource,
    SemanticsBinding,
    VectorIndex,
    merge,
    sem,
)


@dataclass(frozen=True)
class ThresholdConfig:
    mindist_h: float
    mindist_v: float
    sim_floor: float = DEFAULT_SIM_FLOOR

    def __post_init__(self):
        if not (0 < self.sim_floor <= 1):
            raise InvalidThresholds(f"sim_floor must lie in (0, 1], got {self.sim_floor}")
        if self.mindist_h < 1 or self.mindist_v < 1:
            raise InvalidThresholds("distances are >= 1, so thresholds below 1 are meaningless")
        if self.mindist_v < self.mindist_h:
            raise InvalidThresholds(
                f"mindist_v ({self.mindist_v}) must not be smaller than mindist_h ({self.mindist_h})")

    @property
    def max_distance(self) -> float:
        return 1.0 / self.sim_floor


class PlacementKind(str, Enum):
    NEW_CHILD = "NewChildCategory"
    NEW_SIBLING = "NewSiblingCategory"
    MERGE = "MergeIntoExisting"


@dataclass(frozen=True)
class PlacementDecision:
    kind: PlacementKind
    anchor: int
    distance: float | None  # None for the root-only special case, where nothing is measured

    def consistent_with(self, cfg: ThresholdConfig) -> bool:
        if self.distance is None:
            return self.kind is PlacementKind.NEW_CHILD
        d = self.distance
        if self.kind is PlacementKind.NEW_CHILD:
            return d > cfg.mindist_v
        if self.kind is PlacementKind.NEW_SIBLING:
            return cfg.mindist_h < d <= cfg.mindist_v
        return d <= cfg.mindist_h


@dataclass(frozen=True)
class LogEntry:
    resource_id: str
    resource_url: str
    decision: PlacementDecision
    category: int
    vector: ConceptVector


@dataclass
class BuildLog:
    thresholds: ThresholdConfig
    seed_topics: list[tuple[str, ConceptVector]] = field(default_factory=list)
    entries: list[LogEntry] = field(default_factory=list)

    def __len__(self):
        return len(self.entries)

    def __iter__(self):
        return iter(self.entries)


AssignmentHook = Callable[[Resource, ConceptVector], ConceptVector]


def identity_hook(resource: Resource, proposed: ConceptVector) -> ConceptVector:
    """Fully automatic assignment: keep whatever identification proposed."""
    return proposed


class OverrideHook:
    """Manual assignment: replace the proposal for listed resource ids."""

    def __init__(self, overrides: Mapping[str, ConceptVector]):
        self.overrides = dict(overrides)

    def __call__(self, resource: Resource, proposed: ConceptVector) -> ConceptVector:
        return self.overrides.get(resource.id, proposed)


TIE_RTOL = 1e-12

_SLUG = re.compile(r"[^a-z0-9]+")


def category_url(wd: WebDirectory, parent: int, v: ConceptVector, cid: int) -> str:
    slug = _SLUG.sub("-", (v.top_concept() or "category").lower()).strip("-") or "category"
    base = wd.categories[parent].url.rstrip("/")
    return f"{base}/{slug}-{cid}"


def find_closest_category(wd: WebDirectory, binding: SemanticsBinding, v: ConceptVector,
                          sim_floor: float = DEFAULT_SIM_FLOOR,
                          index: VectorIndex | None = None) -> tuple[int, float]:
    """Closest non-root category to ``v`` and its distance.

    Ties go to the shallowest category, then to the lowest id. Distances
    within ``TIE_RTOL`` of the minimum count as tied, so the choice does not
    hinge on summation order.
    """
    if wd.category_count < 2:
        raise OnlyRootPresent("directory holds only the root")
    if index is None:
        index = VectorIndex.from_binding(wd, binding)
    d = index.distances(v, sim_floor)
    best = float(d.min())
    tied = np.flatnonzero(d <= best * (1.0 + TIE_RTOL))
    if tied.size == 1:
        i = int(tied[0])
    else:
        i = min(tied, key=lambda j: (index.levels[j], index.ids[j]))
    return index.ids[i], float(d[i])


class Builder:
    """Incremental state for one construction run.

    Keeps a dense index of category ontologies in sync with the binding so the
    closest-category scan stays a single kernel call per resource.
    """

    def __init__(self, cfg: ThresholdConfig, hook: AssignmentHook = identity_hook,
                 wd: WebDirectory | None = None, binding: SemanticsBinding | None = None):
        self.cfg = cfg
        self.hook = hook
        self.wd = wd if wd is not None else new_directory()
        self.binding = binding if binding is not None else SemanticsBinding()
        self.binding.vectors.setdefault(self.wd.root, ConceptVector.empty())
        self.log = BuildLog(cfg)
        self.index = VectorIndex.from_binding(self.wd, self.binding)

    def seed(self, topics: Sequence[tuple[str, ConceptVector]]) -> list[int]:
        ids = seed_top_categories(self.wd, self.binding, topics)
        for cid in ids:
            self.index.upsert(cid, self.wd.categories[cid].level, self.binding.vectors[cid])
        self.log.seed_topics.extend((url, v) for url, v in topics)
        return ids

    def _new_category(self, parent: int, v: ConceptVector) -> int:
        wd = self.wd
        cid = wd.add_category(parent, category_url(wd, parent, v, wd.next_id))
        self.binding.vectors[cid] = v
        self.index.upsert(cid, wd.categories[cid].level, v)
        return cid

    def decide(self, v: ConceptVector) -> PlacementDecision:
        wd, cfg = self.wd, self.cfg
        if wd.category_count == 1:
            return PlacementDecision(PlacementKind.NEW_CHILD, wd.root, None)
        anchor, d = find_closest_category(wd, self.binding, v, cfg.sim_floor, self.index)
        if d > cfg.mindist_v:
            kind = PlacementKind.NEW_CHILD
        elif d > cfg.mindist_h:
            kind = PlacementKind.NEW_SIBLING
        else:
            kind = PlacementKind.MERGE
        return PlacementDecision(kind, anchor, d)

    def apply(self, resource_id: str, v: ConceptVector, decision: PlacementDecision) -> int:
        wd, binding = self.wd, self.binding
        if decision.kind is PlacementKind.NEW_CHILD:
            cid = self._new_category(decision.anchor, v)
        elif decision.kind is PlacementKind.NEW_SIBLING:
            parent = wd.categories[decision.anchor].parent
            cid = self._new_category(wd.root if parent is None else parent, v)
        else:
            cid = decision.anchor
            binding.vectors[cid] = merge(binding.vectors[cid], v)
            self.index.upsert(cid, wd.categories[cid].level, binding.vectors[cid])
        wd.add_resource(cid, resource_id)
        binding.resources[resource_id] = v
        return cid

    def place(self, r: Resource) -> PlacementDecision:
        if self.wd.category_of(r.id) is not None:
            raise PlacementError(r.id, "resource already listed")
        v = self.hook(r, sem(r))
        if v is None or v.is_empty:
            raise EmptyResource(f"assignment for {r.id!r} produced an empty ontology")
        decision = self.decide(v)
        cid = self.apply(r.id, v, decision)
        self.log.entries.append(LogEntry(r.id, r.url, decision, cid, v))
        return decision


def place_resource(wd: WebDirectory, binding: SemanticsBinding, r: Resource, cfg: ThresholdConfig,
                   hook: AssignmentHook = identity_hook) -> PlacementDecision:
    """Place one resource into an existing directory, mutating ``wd`` and ``binding``."""
    return Builder(cfg, hook, wd, binding).place(r)


def seed_top_categories(wd: WebDirectory, binding: SemanticsBinding,
                        topics: Sequence[tuple[str, ConceptVector]]) -> list[int]:
    if wd.category_count != 1:
        raise DirectoryNotEmpty(f"directory already has {wd.category_count} categories")
    binding.vectors.setdefault(wd.root, ConceptVector.empty())
    ids = []
    for url, v in topics:
        cid = wd.add_category(wd.root, url)
        binding.constants[cid] = v
        binding.vectors[cid] = v
        ids.append(cid)
    return ids


def build_directory(resources: Iterable[Resource], cfg: ThresholdConfig,
                    hook: AssignmentHook = identity_hook,
                    seed_topics: Sequence[tuple[str, ConceptVector]] = ()):
    """Run the whole stream; returns ``(directory, binding, log)``.

    The result depends on input order by design.
    """
    b = Builder(cfg, hook)
    if seed_topics:
        b.seed(seed_topics)
    for r in resources:
        try:
            b.place(r)
        except PlacementError:
            raise
        except WebDirError as exc:
            raise PlacementError(r.id, exc) from exc
    return b.wd, b.binding, b.log


def replay_log(log: BuildLog, verify: bool = False):
    """Rebuild a directory by re-applying the logged decisions in order.

    With ``verify`` each decision is recomputed first and a
    :class:`ReplayMismatch` is raised on divergence.
    """
    b = Builder(log.thresholds)
    if log.seed_topics:
        b.seed(list(log.seed_topics))
    for e in log.entries:
        if verify:
            again = b.decide(e.vector)
            if again.kind is not e.decision.kind or again.anchor != e.decision.anchor:
                raise ReplayMismatch(f"{e.resource_id}: logged {e.decision}, recomputed {again}")
        cid = b.apply(e.resource_id, e.vector, e.decision)
        if cid != e.category:
            raise ReplayMismatch(f"{e.resource_id}: logged category {e.category}, got {cid}")
        b.log.entries.append(e)
    return b.wd, b.binding, b.log
