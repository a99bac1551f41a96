import json
import os

import mock
import pytest

from obstruction_lab.__main__ import cli as main_cli
from obstruction_lab.scripts.expansion import cli as expansion_cli
from obstruction_lab.scripts.identities import cli as identities_cli
from obstruction_lab.scripts.obstruction import cli as obstruction_cli
from obstruction_lab.scripts.options import JET_ORDER_ENV
from obstruction_lab.scripts.run_all import cli as all_cli
from obstruction_lab.scripts.stacks import cli as stacks_cli
from obstruction_lab.writer import FORMAT_VERSION


def load(path="out.json"):
    with open(path) as f:
        return json.load(f)


def test_group_lists_every_command(runner):
    out = runner.invoke(main_cli, ["--help"])
    assert out.exit_code == 0
    for command in ["stacks", "expansion", "obstruction", "identities", "variation", "all",
                    "validate"]:
        assert command in out.output


def test_stacks_document(runner):
    out = runner.invoke(
        stacks_cli, ["-s", "sphere_s3", "--rho", "2", "--points", "1", "-o", "out.json"]
    )
    assert out.exit_code == 0, out.stderr
    document = load()
    assert document["__format__"] == FORMAT_VERSION
    assert document["kind"] == "stacks"
    assert document["scenario"]["id"] == "sphere_s3"
    assert document["scenario"]["params"] == {"rho": 2.0}
    assert document["config"]["jet_order"] == 6
    assert document["values"]["H"] == pytest.approx([0.5])
    assert document["values"]["scal"] == pytest.approx([1.5])
    assert out.output.splitlines()[0] == "stacks on sphere_s3 (n = 3)"


def test_dry_run_only_prints(runner):
    out = runner.invoke(
        stacks_cli, ["-s", "plane_r4", "--points", "1", "-o", "out.json", "--dry-run"]
    )
    assert out.exit_code == 0, out.stderr
    assert out.output.startswith("stacks on plane_r4")
    assert not os.path.exists("out.json")


def test_quiet_prints_nothing(runner):
    out = runner.invoke(stacks_cli, ["-s", "plane_r4", "--points", "1", "-qq"])
    assert out.exit_code == 0, out.stderr
    assert out.output == ""


def test_failed_checks_exit_1_and_keep_the_report(runner):
    with mock.patch(
        "obstruction_lab.scripts.stacks.curvature_checks", return_value={"bianchi": 1.0}
    ):
        out = runner.invoke(stacks_cli, ["-s", "plane_r4", "--points", "1", "-o", "out.json"])
    assert out.exit_code == 1
    assert "1 check(s) failed" in out.stderr
    assert "bianchi (residual 1.000e+00)" in out.stderr
    assert load()["kind"] == "stacks"


@pytest.mark.parametrize(
    "options, message",
    [
        (["--param", "a"], "expected NAME=VALUE"),
        (["--param", "=2"], "expected NAME=VALUE"),
        (["--orientation", "2"], "--orientation"),
        (["--points", "0"], "--points"),
    ],
)
def test_bad_common_options(runner, options, message):
    out = runner.invoke(stacks_cli, ["-s", "cylinder_s2xr"] + options)
    assert out.exit_code == 2
    assert message in out.stderr


def test_scenario_is_required(runner):
    out = runner.invoke(stacks_cli, [])
    assert out.exit_code == 2
    assert "--scenario" in out.stderr


def test_unknown_scenario_writes_an_error_record(runner):
    out = runner.invoke(stacks_cli, ["-s", "klein_bottle", "-o", "out.json"])
    assert out.exit_code == 2
    assert "klein_bottle" in out.stderr
    record = load()
    assert record["kind"] == "error"
    assert record["command"] == "stacks"
    assert record["error"] == "ParseError"
    assert record["exit_code"] == 2


def test_unknown_parameter(runner):
    out = runner.invoke(stacks_cli, ["-s", "sphere_s3", "--param", "radius=2"])
    assert out.exit_code == 2
    assert "no parameter 'radius'" in out.stderr


def test_jet_order_too_small(runner):
    out = runner.invoke(obstruction_cli, ["-s", "graph_flat", "--points", "1", "--jet-order", "3"])
    assert out.exit_code == 2
    assert "at least order 6" in out.stderr


def test_jet_order_from_the_environment(runner):
    out = runner.invoke(
        obstruction_cli, ["-s", "graph_flat", "--points", "1"], env={JET_ORDER_ENV: "4"}
    )
    assert out.exit_code == 2
    assert "at least order 6" in out.stderr


def test_obstruction_on_the_cylinder(runner):
    a = 1.5
    out = runner.invoke(
        obstruction_cli,
        ["-s", "cylinder_s2xr", "--a", str(a), "--points", "1", "-o", "out.json"],
    )
    assert out.exit_code == 0, out.stderr
    document = load()
    assert document["kind"] == "obstruction"
    assert document["scenario"]["id"] == "cylinder_s2xr"
    assert document["values"]["b3_final"] == pytest.approx([-1.0 / (27.0 * a ** 4)])
    assert document["passed"] is True


def test_obstruction_selected_formulas(runner):
    out = runner.invoke(
        obstruction_cli,
        ["-s", "graph_flat", "--points", "1", "-f", "b3_final,b3_flat", "-o", "out.json"],
    )
    assert out.exit_code == 0, out.stderr
    document = load()
    assert sorted(document["values"]) == ["b3_final", "b3_flat"]
    assert document["config"]["formulas"] == ["b3_final", "b3_flat"]


def test_obstruction_unknown_formula(runner):
    out = runner.invoke(obstruction_cli, ["-s", "graph_flat", "-f", "b3_nonsense"])
    assert out.exit_code == 2
    assert "unknown id(s) b3_nonsense" in out.stderr


def test_obstruction_out_of_scope_formula(runner):
    out = runner.invoke(
        obstruction_cli,
        ["-s", "perturbed", "--points", "1", "-f", "b3_flat", "-o", "out.json"],
    )
    assert out.exit_code == 3
    assert "not flat" in out.stderr
    record = load()
    assert record["error"] == "ContractViolation"
    assert record["exit_code"] == 3


def test_obstruction_flip(runner):
    out = runner.invoke(
        obstruction_cli, ["-s", "graph_flat", "--points", "1", "--flip", "-o", "out.json"]
    )
    assert out.exit_code == 0, out.stderr
    checks = load()["conformal_checks"]
    assert any(check["factor"] == "normal flip" for check in checks)


def test_expansion_residue_on_a_surface(runner):
    a = 2.0
    out = runner.invoke(
        expansion_cli,
        ["-s", "cylinder_s1xr", "--a", str(a), "--points", "1", "-o", "out.json"],
    )
    assert out.exit_code == 0, out.stderr
    document = load()
    assert document["kind"] == "expansion"
    assert document["residue_sigma4"] == pytest.approx([1.0 / (32.0 * a ** 3)])
    assert set(document["checks"]) == {"gauss_lemma", "trace_volume", "residue_law"}


def test_identities_selection(runner):
    out = runner.invoke(
        identities_cli,
        ["-s", "graph_flat", "--points", "2", "-i", "codazzi,kappa1_flat", "-o", "out.json"],
    )
    assert out.exit_code == 0, out.stderr
    document = load()
    assert document["passed"] is True
    assert {result["identity"] for result in document["results"]} == {
        "codazzi",
        "kappa1_flat",
    }
    assert len(document["results"]) == 4


def test_identities_unknown_id(runner):
    out = runner.invoke(identities_cli, ["-s", "graph_flat", "-i", "pythagoras"])
    assert out.exit_code == 2
    assert "unknown id(s) pythagoras" in out.stderr


def test_all_runs_every_open_command(runner):
    out = runner.invoke(all_cli, ["-s", "graph_flat", "--points", "1", "-o", "out.json"])
    assert out.exit_code == 0, out.stderr
    document = load()
    assert document["kind"] == "all"
    assert set(document) >= {"stacks", "expansion", "obstruction", "identities"}
    assert "variation" not in document
    assert document["obstruction"]["passed"] is True
