"""Command-line entry point: ``webdir build|audit|simulate|export|validate|ideality``."""

from __future__ import annotations

import argparse
import logging
import os
import sys

from . import io
from ._accel import backend_name
from .construction import OverrideHook, ThresholdConfig, build_directory, identity_hook
from .errors import WebDirError
from .metrics import EvaluateOptions, aggregate, evaluate_traces
from .semantics import DEFAULT_SIM_FLOOR, audit_ideality
from .simulation import AgentStrategy, SimulationRun, generate_traces

log = logging.getLogger("webdir")


def cmd_build(args) -> int:
    resources = io.ingest_resources(args.resources)
    cfg = ThresholdConfig(args.mindist_h, args.mindist_v, args.sim_floor)
    hook = OverrideHook(io.load_overrides(args.assign_overrides)) if args.assign_overrides else identity_hook
    seeds = io.load_seed_topics(args.seed_topics) if args.seed_topics else ()
    wd, binding, blog = build_directory(resources, cfg, hook, seeds)
    # the schema points at its log relative to itself so the pair can move together
    log_ref = os.path.relpath(args.log, os.path.dirname(os.path.abspath(args.out))) if args.log else None
    io.save_schema(wd, binding, args.out, build_log=log_ref)
    if args.log:
        io.save_log(blog, args.log)
    log.info("built %d categories, depth %d, from %d resources", wd.category_count, wd.depth, len(resources))
    return 0


def _write_reports(reports, csv_path, json_path):
    summary = aggregate(reports) if reports else None
    io.write_report_csv(reports, csv_path, summary)
    if json_path:
        io.write_json(json_path, io.report_dict(reports, summary))


def cmd_audit(args) -> int:
    wd, binding = io.load_schema(args.schema)
    traces = io.read_traces(args.traces)
    opts = EvaluateOptions(bypass_non_semantic=args.bypass_non_semantic, sim_floor=args.sim_floor)
    reports = evaluate_traces(wd, binding, traces, opts)
    _write_reports(reports, args.out, args.json)
    return 0


def cmd_simulate(args) -> int:
    wd, binding = io.load_schema(args.schema)
    if args.targets == "all":
        targets = wd.resource_ids()
    else:
        targets = [t for t in args.targets.split(",") if t]
    strategy = AgentStrategy(args.strategy, args.budget, args.seed)
    run = SimulationRun(wd, binding, targets, strategy, args.sim_floor)
    traces = generate_traces(run, args.reps)
    io.write_traces(traces, args.out_traces)
    if args.out_report:
        reports = evaluate_traces(wd, binding, traces, EvaluateOptions(sim_floor=args.sim_floor))
        _write_reports(reports, args.out_report, args.json)
    return 0


def cmd_export(args) -> int:
    wd, _ = io.load_schema(args.schema)
    io.export_dot(wd, args.dot)
    return 0


def cmd_validate(args) -> int:
    wd, _ = io.load_schema(args.schema, check=False)
    problems = wd.validate()
    for v in problems:
        print(f"{v.kind}\t{'' if v.category is None else v.category}\t{v.detail}")
    if not problems:
        print("ok")
    return 0


def cmd_ideality(args) -> int:
    wd, binding = io.load_schema(args.schema)
    rep = audit_ideality(wd, binding, args.epsilon)
    doc = {"epsilon": rep.epsilon, "verdict": rep.verdict, "gaps": {str(k): v for k, v in rep.gaps.items()}}
    if args.out:
        io.write_json(args.out, doc)
    else:
        sys.stdout.write(io.dumps(doc))
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="webdir", description="Build and evaluate Web-directory hierarchies.")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    b = sub.add_parser("build", help="construct a directory from a JSONL resource stream")
    b.add_argument("--resources", required=True)
    b.add_argument("--mindist-h", type=float, required=True)
    b.add_argument("--mindist-v", type=float, required=True)
    b.add_argument("--sim-floor", type=float, default=DEFAULT_SIM_FLOOR)
    b.add_argument("--seed-topics")
    b.add_argument("--assign-overrides")
    b.add_argument("--out", required=True)
    b.add_argument("--log")
    b.set_defaults(func=cmd_build)

    a = sub.add_parser("audit", help="compute browse metrics for recorded traces")
    a.add_argument("--schema", required=True)
    a.add_argument("--traces", required=True)
    a.add_argument("--bypass-non-semantic", action="store_true")
    a.add_argument("--sim-floor", type=float, default=DEFAULT_SIM_FLOOR)
    a.add_argument("--out", required=True)
    a.add_argument("--json", help="also write the full report as JSON")
    a.set_defaults(func=cmd_audit)

    s = sub.add_parser("simulate", help="generate agent traces and their metrics")
    s.add_argument("--schema", required=True)
    s.add_argument("--strategy", choices=["bfs", "greedy", "random"], required=True)
    s.add_argument("--targets", default="all", help="comma-separated resource ids, or 'all'")
    s.add_argument("--reps", type=int, default=1)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--budget", type=int, default=None)
    s.add_argument("--sim-floor", type=float, default=DEFAULT_SIM_FLOOR)
    s.add_argument("--out-traces", required=True)
    s.add_argument("--out-report")
    s.add_argument("--json")
    s.set_defaults(func=cmd_simulate)

    e = sub.add_parser("export", help="write a DOT rendering of a schema")
    e.add_argument("--schema", required=True)
    e.add_argument("--dot", required=True)
    e.set_defaults(func=cmd_export)

    v = sub.add_parser("validate", help="list structural violations of a schema")
    v.add_argument("--schema", required=True)
    v.set_defaults(func=cmd_validate)

    i = sub.add_parser("ideality", help="per-category ideality gaps and verdict")
    i.add_argument("--schema", required=True)
    i.add_argument("--epsilon", type=float, default=0.0)
    i.add_argument("--out")
    i.set_defaults(func=cmd_ideality)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    log.debug("kernel backend: %s", backend_name())
    try:
        return args.func(args)
    except (WebDirError, OSError) as exc:
        print(f"webdir: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
