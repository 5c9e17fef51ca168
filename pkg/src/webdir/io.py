"""Readers and writers for resources, schemas, build logs, traces, reports and DOT.

All JSON is written canonically: sorted keys, two-space indent and floats
rounded to nine significant digits, so repeated runs are byte-identical.
"""

from __future__ import annotations

import csv
import io as _io
import json
import math
from pathlib import Path
from typing import Iterable

from .construction import BuildLog, LogEntry, PlacementDecision, PlacementKind, ThresholdConfig
from .directory import Category, WebDirectory
from .errors import DuplicateId, ParseError, SchemaInvalid
from .metrics import AggregateReport, BrowseTrace, MetricsReport
from .semantics import ConceptVector, Resource, SemanticsBinding

SCHEMA_VERSION = "webdir-schema/1"
LOG_VERSION = "webdir-buildlog/1"


def fmt_float(x: float) -> float:
    return float(f"{x:.9g}")


def _canon(obj):
    if isinstance(obj, float):
        return fmt_float(obj) if math.isfinite(obj) else None
    if isinstance(obj, dict):
        return {str(k): _canon(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_canon(v) for v in obj]
    return obj


def dumps(obj) -> str:
    return json.dumps(_canon(obj), sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def _write(path, text: str) -> None:
    Path(path).write_text(text, encoding="utf-8", newline="\n")


def write_json(path, obj) -> None:
    _write(path, dumps(obj))


# -- resources ------------------------------------------------------------

def parse_resource(rec: dict, line: int | None = None) -> Resource:
    if not isinstance(rec, dict):
        raise ParseError(line, "record is not a JSON object")
    if "id" not in rec:
        raise ParseError(line, "missing 'id'")
    terms = rec.get("terms")
    if not terms:
        raise ParseError(line, "empty or missing 'terms'")
    pairs = []
    try:
        if isinstance(terms, dict):
            pairs = [(str(t), int(c)) for t, c in terms.items()]
        else:
            for t in terms:
                if isinstance(t, str):
                    pairs.append((t, 1))
                elif isinstance(t, dict):
                    pairs.append((str(t["token"]), int(t.get("count", 1))))
                else:
                    raise ParseError(line, f"bad term {t!r}")
    except (KeyError, TypeError, ValueError) as exc:
        raise ParseError(line, f"bad terms: {exc}") from exc
    if any(c < 0 for _, c in pairs) or not any(c > 0 for _, c in pairs):
        raise ParseError(line, "terms must have positive counts")
    return Resource(str(rec["id"]), str(rec.get("url", "")), tuple(pairs))


def ingest_resources(path) -> list[Resource]:
    """Read a JSONL resource file in order; blank lines are skipped."""
    out: list[Resource] = []
    seen: set[str] = set()
    with open(path, encoding="utf-8") as fh:
        for n, line in enumerate(fh, 1):
            if not line.strip():
                continue
            try:
                rec = json.loads(line)
            except json.JSONDecodeError as exc:
                raise ParseError(n, exc.msg) from exc
            r = parse_resource(rec, n)
            if r.id in seen:
                raise DuplicateId(r.id, n)
            seen.add(r.id)
            out.append(r)
    return out


def write_resources(resources: Iterable[Resource], path) -> None:
    lines = [json.dumps({"id": r.id, "url": r.url,
                         "terms": [{"token": t, "count": c} for t, c in r.terms]}, sort_keys=True)
             for r in resources]
    _write(path, "".join(l + "\n" for l in lines))


# -- concept vectors ------------------------------------------------------

def vector_from_json(obj) -> ConceptVector:
    return ConceptVector({str(k): float(v) for k, v in obj.items()})


def normalized_vector_from_json(obj) -> ConceptVector:
    """Treat the mapping as raw weights and normalise it, keeping its norm as mass."""
    return ConceptVector.from_counts({str(k): float(v) for k, v in obj.items()})


def _vec_pair(v: ConceptVector):
    return v.to_dict(), v.mass


# -- schema ---------------------------------------------------------------

def schema_dict(wd: WebDirectory, binding: SemanticsBinding | None = None, build_log: str | None = None) -> dict:
    cats = []
    for cid in sorted(wd.categories):
        c = wd.categories[cid]
        cats.append({"id": c.id, "level": c.level, "url": c.url, "parent": c.parent,
                     "children": list(c.children), "resources": list(c.resources),
                     "non_semantic": c.non_semantic})
    doc = {
        "version": SCHEMA_VERSION,
        "root": wd.root,
        "cross_links_directed": wd.cross_links_directed,
        "categories": cats,
        "cross_links": [{"from": a, "to": b} for a, b in wd.cross_links],
    }
    if binding is not None:
        doc["semantics"] = {
            "vectors": {str(k): v.to_dict() for k, v in sorted(binding.vectors.items())},
            "mass": {str(k): v.mass for k, v in sorted(binding.vectors.items())},
            "constants": {str(k): v.to_dict() for k, v in sorted(binding.constants.items())},
            "resources": {k: v.to_dict() for k, v in sorted(binding.resources.items())},
            "resource_mass": {k: v.mass for k, v in sorted(binding.resources.items())},
        }
    if build_log is not None:
        doc["build_log"] = build_log
    return doc


def dumps_schema(wd: WebDirectory, binding: SemanticsBinding | None = None, build_log: str | None = None) -> str:
    return dumps(schema_dict(wd, binding, build_log))


def save_schema(wd: WebDirectory, binding: SemanticsBinding | None, path, build_log: str | None = None) -> None:
    problems = wd.validate()
    if problems:
        raise SchemaInvalid(problems)
    _write(path, dumps_schema(wd, binding, build_log))


def schema_from_dict(doc: dict, check: bool = True):
    try:
        cats = [Category(int(c["id"]), int(c["level"]), str(c["url"]),
                         None if c.get("parent") is None else int(c["parent"]),
                         [int(x) for x in c.get("children", [])],
                         [str(x) for x in c.get("resources", [])],
                         bool(c.get("non_semantic", False)))
                for c in doc["categories"]]
        links = [(int(l["from"]), int(l["to"])) for l in doc.get("cross_links", [])]
        root = int(doc.get("root", 1))
    except (KeyError, TypeError, ValueError) as exc:
        raise ParseError(None, f"malformed schema: {exc}") from exc
    wd = WebDirectory.from_records(cats, links, root, bool(doc.get("cross_links_directed", True)))
    if check:
        problems = wd.validate()
        if problems:
            raise SchemaInvalid(problems)
    binding = SemanticsBinding()
    sec = doc.get("semantics") or {}
    mass = sec.get("mass", {})
    for k, v in sec.get("vectors", {}).items():
        binding.vectors[int(k)] = ConceptVector(v, float(mass.get(k, 1.0)))
    for k, v in sec.get("constants", {}).items():
        binding.constants[int(k)] = vector_from_json(v)
    rmass = sec.get("resource_mass", {})
    for k, v in sec.get("resources", {}).items():
        binding.resources[str(k)] = ConceptVector(v, float(rmass.get(k, 1.0)))
    return wd, binding


def load_schema(path, check: bool = True):
    """Read and re-validate a schema file; returns ``(directory, binding)``."""
    with open(path, encoding="utf-8") as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ParseError(exc.lineno, exc.msg) from exc
    return schema_from_dict(doc, check)


# -- build log ------------------------------------------------------------

def log_dict(log: BuildLog) -> dict:
    return {
        "version": LOG_VERSION,
        "thresholds": {"mindist_h": log.thresholds.mindist_h, "mindist_v": log.thresholds.mindist_v,
                       "sim_floor": log.thresholds.sim_floor},
        "seed_topics": [{"url": url, "vector": v.to_dict(), "mass": v.mass} for url, v in log.seed_topics],
        "entries": [{
            "resource": e.resource_id,
            "url": e.resource_url,
            "kind": e.decision.kind.value,
            "anchor": e.decision.anchor,
            "distance": e.decision.distance,
            "category": e.category,
            "vector": e.vector.to_dict(),
            "mass": e.vector.mass,
        } for e in log.entries],
    }


def save_log(log: BuildLog, path) -> None:
    _write(path, dumps(log_dict(log)))


def log_from_dict(doc: dict) -> BuildLog:
    t = doc["thresholds"]
    log = BuildLog(ThresholdConfig(float(t["mindist_h"]), float(t["mindist_v"]), float(t["sim_floor"])))
    log.seed_topics = [(s["url"], ConceptVector(s["vector"], float(s.get("mass", 1.0))))
                       for s in doc.get("seed_topics", [])]
    for e in doc["entries"]:
        d = e.get("distance")
        decision = PlacementDecision(PlacementKind(e["kind"]), int(e["anchor"]), None if d is None else float(d))
        log.entries.append(LogEntry(str(e["resource"]), str(e.get("url", "")), decision, int(e["category"]),
                                    ConceptVector(e["vector"], float(e.get("mass", 1.0)))))
    return log


def load_log(path) -> BuildLog:
    with open(path, encoding="utf-8") as fh:
        return log_from_dict(json.load(fh))


def load_seed_topics(path) -> list[tuple[str, ConceptVector]]:
    """Seed file: a JSON list of ``{"url": ..., "vector": {token: weight}}``."""
    with open(path, encoding="utf-8") as fh:
        doc = json.load(fh)
    return [(str(t["url"]), normalized_vector_from_json(t["vector"])) for t in doc]


def load_overrides(path) -> dict[str, ConceptVector]:
    with open(path, encoding="utf-8") as fh:
        doc = json.load(fh)
    return {str(k): normalized_vector_from_json(v) for k, v in doc.items()}


# -- traces ---------------------------------------------------------------

def trace_dict(b: BrowseTrace) -> dict:
    d = {"steps": list(b.steps), "target_resource": b.target_resource, "target_category": b.target_category}
    if b.truncated:
        d["truncated"] = True
    return d


def write_traces(traces: Iterable[BrowseTrace], path) -> None:
    _write(path, "".join(json.dumps(trace_dict(b), sort_keys=True) + "\n" for b in traces))


def read_traces(path) -> list[BrowseTrace]:
    out = []
    with open(path, encoding="utf-8") as fh:
        for n, line in enumerate(fh, 1):
            if not line.strip():
                continue
            try:
                rec = json.loads(line)
                out.append(BrowseTrace(tuple(int(s) for s in rec["steps"]), str(rec["target_resource"]),
                                       int(rec["target_category"]), bool(rec.get("truncated", False))))
            except (json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
                raise ParseError(n, f"bad trace: {exc}") from exc
    return out


# -- reports --------------------------------------------------------------

REPORT_COLUMNS = ["trace", "target_resource", "target_category", "trace_len", "min_len", "pr", "mr",
                  "ddp_final", "ddp_converged", "root_monotone", "truncated"]


def _cell(x) -> str:
    if x is None:
        return ""
    if isinstance(x, bool):
        return "true" if x else "false"
    if isinstance(x, float):
        return f"{x:.9g}"
    return str(x)


def report_csv(reports: list[MetricsReport], summary: AggregateReport | None = None) -> str:
    buf = _io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(REPORT_COLUMNS)
    for i, r in enumerate(reports):
        w.writerow([_cell(x) for x in (i, r.target_resource, r.target_category, r.trace_len, r.min_len,
                                       r.pr, r.mr, r.ddp_final, r.ddp_converged, r.root_monotone,
                                       r.truncated)])
    if summary is not None:
        w.writerow([_cell(x) for x in ("aggregate", "", "", summary.traces, "", summary.pr.mean,
                                       summary.mr.mean, "", summary.ddp_converged_fraction,
                                       summary.root_monotone_fraction, summary.truncated)])
    return buf.getvalue()


def write_report_csv(reports, path, summary=None) -> None:
    _write(path, report_csv(reports, summary))


def summary_dict(s: AggregateReport) -> dict:
    def stats(x):
        return {"count": x.count, "mean": x.mean, "min": x.min, "max": x.max, "std": x.std}
    return {"traces": s.traces, "truncated": s.truncated, "pr": stats(s.pr), "mr": stats(s.mr),
            "ddp_converged_fraction": s.ddp_converged_fraction,
            "root_monotone_fraction": s.root_monotone_fraction}


def report_dict(reports: list[MetricsReport], summary: AggregateReport | None = None) -> dict:
    doc = {"reports": [{
        "target_resource": r.target_resource, "target_category": r.target_category,
        "pr": r.pr, "mr": r.mr, "ddp_terms": r.ddp_terms, "ddp_partial_sums": r.ddp_partial_sums,
        "ddp_final": r.ddp_final, "ddp_converged": r.ddp_converged, "root_monotone": r.root_monotone,
        "trace_len": r.trace_len, "min_len": r.min_len, "truncated": r.truncated,
    } for r in reports]}
    if summary is not None:
        doc["aggregate"] = summary_dict(summary)
    return doc


# -- DOT ------------------------------------------------------------------

def _dot_quote(s: str) -> str:
    return '"' + s.replace("\\", "\\\\").replace('"', '\\"') + '"'


def dot_string(wd: WebDirectory) -> str:
    lines = ["digraph webdir {", "  node [shape=box];"]
    for cid in sorted(wd.categories):
        c = wd.categories[cid]
        style = ", style=dotted" if c.non_semantic else ""
        lines.append(f"  c{cid} [label={_dot_quote(c.url)}{style}];")
    for cid in sorted(wd.categories):
        for ch in wd.categories[cid].children:
            lines.append(f"  c{cid} -> c{ch};")
    for a, b in wd.cross_links:
        lines.append(f"  c{a} -> c{b} [style=dashed, constraint=false];")
    lines.append("}")
    return "\n".join(lines) + "\n"


def export_dot(wd: WebDirectory, path) -> None:
    _write(path, dot_string(wd))
