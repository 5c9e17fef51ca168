import json
import subprocess
import sys

import pytest

from helpers import FIXTURES
from webdir import io
from webdir.cli import main
from webdir.construction import ThresholdConfig, build_directory, replay_log
from webdir.directory import new_directory
from webdir.errors import DuplicateId, ParseError, SchemaInvalid
from webdir.semantics import Resource

RESOURCES = FIXTURES / "resources.jsonl"


def write_lines(path, *records):
    path.write_text("".join(json.dumps(r) + "\n" for r in records))
    return path


def test_ingest_formats(tmp_path):
    p = write_lines(tmp_path / "r.jsonl",
                    {"id": "a", "url": "u1", "terms": ["x", "y", "x"]},
                    {"id": "b", "url": "u2", "terms": [{"token": "x", "count": 2}]},
                    {"id": "c", "terms": {"z": 1}})
    res = io.ingest_resources(p)
    assert [r.id for r in res] == ["a", "b", "c"]
    assert res[0].counts() == {"x": 2, "y": 1}


def test_ingest_errors_carry_line(tmp_path):
    p = write_lines(tmp_path / "r.jsonl", {"id": "a", "terms": ["x"]}, {"id": "b", "terms": []})
    with pytest.raises(ParseError) as info:
        io.ingest_resources(p)
    assert info.value.line == 2
    p = write_lines(tmp_path / "d.jsonl", {"id": "a", "terms": ["x"]}, {"id": "a", "terms": ["y"]})
    with pytest.raises(DuplicateId):
        io.ingest_resources(p)
    (tmp_path / "bad.jsonl").write_text('{"id": "a", "terms": ["x"]}\n{oops\n')
    with pytest.raises(ParseError) as info:
        io.ingest_resources(tmp_path / "bad.jsonl")
    assert info.value.line == 2


def test_resources_roundtrip(tmp_path):
    res = io.ingest_resources(RESOURCES)
    io.write_resources(res, tmp_path / "again.jsonl")
    assert io.ingest_resources(tmp_path / "again.jsonl") == res
    assert (tmp_path / "again.jsonl").read_bytes() == RESOURCES.read_bytes()


def test_sample_loads(sample):
    assert (sample.category_count, sample.depth, len(sample.cross_links)) == (6, 4, 2)


def test_schema_roundtrip(tmp_path, dir30):
    wd, binding = dir30
    io.save_schema(wd, binding, tmp_path / "s.json")
    wd2, binding2 = io.load_schema(tmp_path / "s.json")
    assert wd2 == wd
    assert binding2.resources.keys() == binding.resources.keys()
    assert io.dumps_schema(wd2, binding2) == (tmp_path / "s.json").read_text()


def test_invalid_schema_rejected(tmp_path):
    wd = new_directory()
    wd.add_category(1, "/a")
    doc = io.schema_dict(wd)
    doc["categories"][1]["url"] = "/"
    (tmp_path / "bad.json").write_text(json.dumps(doc))
    with pytest.raises(SchemaInvalid) as info:
        io.load_schema(tmp_path / "bad.json")
    assert "DuplicateUrl" in {v.kind for v in info.value.violations}
    wd2, _ = io.load_schema(tmp_path / "bad.json", check=False)
    assert wd2.category_count == 2


def test_log_roundtrip_replays(tmp_path):
    res = io.ingest_resources(RESOURCES)
    wd, _, log = build_directory(res, ThresholdConfig(1.3, 2.0))
    io.save_log(log, tmp_path / "log.json")
    again = io.load_log(tmp_path / "log.json")
    assert [e.decision.kind for e in again] == [e.decision.kind for e in log]
    assert replay_log(again)[0] == wd


def test_dot_export(sample):
    text = io.dot_string(sample)
    assert text.count("[label=") == 6
    edges = [l for l in text.splitlines() if "->" in l]
    assert len([e for e in edges if "dashed" in e]) == 2
    assert len([e for e in edges if "dashed" not in e]) == 5
    assert io.dot_string(sample) == text


def test_dot_root_only():
    text = io.dot_string(new_directory())
    assert text.count("[label=") == 1 and "->" not in text


def test_traces_roundtrip(tmp_path):
    from webdir.metrics import BrowseTrace
    ts = [BrowseTrace((1, 2, 3), "r", 3), BrowseTrace((1, 4), "r", 3, truncated=True)]
    io.write_traces(ts, tmp_path / "t.jsonl")
    assert io.read_traces(tmp_path / "t.jsonl") == ts


def test_float_canonicalisation():
    assert io.dumps({"b": 1 / 3, "a": [0.1 + 0.2]}) == '{\n  "a": [\n    0.3\n  ],\n  "b": 0.333333333\n}\n'


def _pipeline(d):
    s, log = d / "schema.json", d / "log.json"
    assert main(["build", "--resources", str(RESOURCES), "--mindist-h", "1.3", "--mindist-v", "2",
                 "--out", str(s), "--log", str(log)]) == 0
    assert main(["simulate", "--schema", str(s), "--strategy", "random", "--targets", "all",
                 "--reps", "2", "--seed", "5", "--out-traces", str(d / "traces.jsonl"),
                 "--out-report", str(d / "sim.csv"), "--json", str(d / "sim.json")]) == 0
    assert main(["audit", "--schema", str(s), "--traces", str(d / "traces.jsonl"),
                 "--out", str(d / "audit.csv"), "--json", str(d / "audit.json")]) == 0
    assert main(["export", "--schema", str(s), "--dot", str(d / "dir.dot")]) == 0
    assert main(["ideality", "--schema", str(s), "--epsilon", "0.1", "--out", str(d / "ideal.json")]) == 0
    return {p.name: p.read_bytes() for p in sorted(d.iterdir())}


def test_cli_outputs_byte_identical(tmp_path):
    (tmp_path / "a").mkdir()
    (tmp_path / "b").mkdir()
    first, second = _pipeline(tmp_path / "a"), _pipeline(tmp_path / "b")
    assert first.keys() == second.keys() and len(first) == 9
    for name in first:
        assert first[name] == second[name], name


def test_cli_audit_csv_shape(tmp_path):
    out = _pipeline(tmp_path)
    rows = out["audit.csv"].decode().splitlines()
    assert rows[0].split(",") == io.REPORT_COLUMNS
    assert rows[-1].startswith("aggregate,")
    assert out["sim.csv"] == out["audit.csv"]


def test_cli_validate_and_errors(tmp_path, capsys):
    assert main(["validate", "--schema", str(FIXTURES / "sample.json")]) == 0
    assert capsys.readouterr().out == "ok\n"
    wd = new_directory()
    doc = io.schema_dict(wd)
    doc["cross_links"] = [{"from": 1, "to": 1}]
    (tmp_path / "loop.json").write_text(json.dumps(doc))
    assert main(["validate", "--schema", str(tmp_path / "loop.json")]) == 0
    assert capsys.readouterr().out.startswith("SelfLoop\t")
    assert main(["export", "--schema", str(tmp_path / "loop.json"), "--dot", str(tmp_path / "x.dot")]) == 1
    assert "error" in capsys.readouterr().err
    assert main(["build", "--resources", str(RESOURCES), "--mindist-h", "3", "--mindist-v", "2",
                 "--out", str(tmp_path / "s.json")]) == 1


def test_cli_ideality_stdout(capsys):
    assert main(["ideality", "--schema", str(FIXTURES / "loop.json")]) == 0
    doc = json.loads(capsys.readouterr().out)
    assert set(doc) == {"epsilon", "gaps", "verdict"}


def test_module_entry_point(tmp_path):
    proc = subprocess.run([sys.executable, "-m", "webdir", "validate", "--schema", str(FIXTURES / "detour.json")],
                          capture_output=True, text=True, check=False)
    assert proc.returncode == 0 and proc.stdout == "ok\n"


def test_resource_from_terms_shapes():
    a = Resource.from_terms("a", "", ["x", "x"])
    b = Resource.from_terms("b", "", {"x": 2})
    assert a.counts() == b.counts() == {"x": 2}
