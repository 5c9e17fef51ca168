"""Ontology-driven construction and browse-quality evaluation of Web directories."""

from ._accel import backend_name
from .construction import (
    BuildLog,
    OverrideHook,
    PlacementDecision,
    PlacementKind,
    ThresholdConfig,
    build_directory,
    find_closest_category,
    identity_hook,
    place_resource,
    replay_log,
    seed_top_categories,
)
from .directory import Category, CrossLink, StructuralViolation, WebDirectory, new_directory
from .metrics import (
    BrowseTrace,
    EvaluateOptions,
    MetricsReport,
    aggregate,
    ddp,
    evaluate_trace,
    evaluate_traces,
    max_revisit,
    path_ratio,
    root_distance_monotone,
)
from .semantics import (
    ConceptVector,
    EpsilonConfig,
    Resource,
    SemanticsBinding,
    SemanticsMode,
    audit_ideality,
    category_semantics,
    diff,
    distance,
    ideality_gap,
    magnitude,
    merge,
    sem,
    similarity,
)
from .simulation import AgentStrategy, SimulationRun, StrategyKind, run_experiment, simulate_browse

__version__ = "0.1.0"
