import json
import os

import numpy as np
from pytest import fixture

from obstruction_lab.exceptions import ParseError, PoleError
from obstruction_lab.logging import log
from obstruction_lab.writer import FORMAT_VERSION, ReportWriter

PAYLOAD = {
    "values": {"b3_final": np.array([0.5, -0.25]), "b3_flat": np.array([0.5, -0.25])},
    "passed": True,
    "points": np.zeros((2, 3)),
}


@fixture
def writer(runner):
    context = {"scenario": {"id": "graph_flat", "n": 3}, "config": {"jet_order": 6}}
    return ReportWriter("obstruction", "report.json", context=context)


@fixture(autouse=True)
def default_verbosity():
    log.verbosity = 0
    yield
    log.verbosity = 0


def test_document_carries_the_format_and_kind(writer):
    document = writer.document(PAYLOAD)
    assert document["__format__"] == FORMAT_VERSION
    assert document["kind"] == "obstruction"
    assert document["scenario"]["id"] == "graph_flat"
    assert document["values"]["b3_final"] == [0.5, -0.25]


def test_dumps_is_deterministic(writer):
    first = writer.dumps(PAYLOAD)
    assert first == writer.dumps(dict(reversed(list(PAYLOAD.items()))))
    assert list(json.loads(first)) == sorted(json.loads(first))


def test_write_prints_a_table_and_the_file(writer, capsys):
    writer.write(PAYLOAD)
    out = capsys.readouterr().out.splitlines()
    assert out[0] == "obstruction on graph_flat (n = 3)"
    assert any(
        line.split() == ["values.b3_final", "5.000000e-01", "-2.500000e-01"] for line in out
    )
    assert any(line.split() == ["passed", "True"] for line in out)
    # points only go to the file
    assert not any("points" in line for line in out)
    with open("report.json") as f:
        assert json.load(f)["points"] == [[0.0, 0.0, 0.0]] * 2


def test_quiet_table(writer, capsys):
    log.verbosity = -2
    writer.write(PAYLOAD)
    assert capsys.readouterr().out == ""
    with open("report.json") as f:
        assert json.load(f)["passed"] is True


def test_dry_run_writes_nothing(runner, capsys):
    writer = ReportWriter("stacks", "report.json", dry_run=True)
    writer.write({"values": {"H": 1.0}})
    lines = capsys.readouterr().out.splitlines()
    assert [line.split() for line in lines] == [["stacks"], ["values.H", "1.000000e+00"]]
    writer.write_error(ParseError("bad"))
    assert not os.path.exists("report.json")


def test_large_arrays_are_summarized(writer, capsys):
    writer.write({"bach": -np.arange(18.0).reshape(3, 3, 2)})
    assert "max |.| 1.700000e+01" in capsys.readouterr().out


def test_error_record(writer):
    writer.write_error(PoleError("sigma_4", 2, residue=0.25))
    with open("report.json") as f:
        record = json.load(f)
    assert record == {
        "__format__": FORMAT_VERSION,
        "kind": "error",
        "command": "obstruction",
        "error": "PoleError",
        "exit_code": 3,
        "message": "sigma_4 has a pole in dimension n = 2 (residue 0.25)",
    }
