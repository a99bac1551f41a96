import json

import pytest

from obstruction_lab.scripts.validate import cli as validate_cli
from obstruction_lab.scripts.variation import cli as variation_cli

COARSE = ["--grid", "8", "--t-steps", "1e-3,2e-3"]


def test_variation_on_a_coarse_grid(runner):
    out = runner.invoke(variation_cli, ["-s", "torus_graph", "-o", "out.json"] + COARSE)
    # the coarse grid may miss the divergence tolerance; the report is written either way
    assert out.exit_code in (0, 1), out.stderr
    with open("out.json") as f:
        document = json.load(f)
    assert document["kind"] == "variation"
    assert document["scenario"]["id"] == "torus_graph"
    assert document["grid"] == 8
    assert document["t_steps"] == [1e-3, 2e-3]
    assert document["config"]["grid"] == 8
    assert document["residual"] < 1e-4 * (1.0 + abs(document["rhs"]))


def test_variation_needs_a_closed_scenario(runner):
    out = runner.invoke(variation_cli, ["-s", "graph_flat", "-o", "out.json"] + COARSE)
    assert out.exit_code == 3
    assert "closed" in out.stderr
    with open("out.json") as f:
        assert json.load(f)["error"] == "ContractViolation"


@pytest.mark.parametrize(
    "options, message",
    [
        (["--grid", "7"], "must be even"),
        (["--t-steps", "1e-3"], "need at least two step sizes"),
        (["--t-steps", "1e-3,-2e-3"], "step sizes must be positive"),
        (["--t-steps", "small,smaller"], "expected comma separated step sizes"),
    ],
)
def test_bad_variation_options(runner, options, message):
    out = runner.invoke(variation_cli, ["-s", "torus_graph"] + options)
    assert out.exit_code == 2
    assert message in out.stderr


def test_validate_a_catalog_scenario(runner):
    out = runner.invoke(validate_cli, ["cylinder_s1xr", "--param", "a=2", "-o", "out.json"])
    assert out.exit_code == 0, out.stderr
    with open("out.json") as f:
        document = json.load(f)
    assert document["kind"] == "validate"
    assert document["scenario"]["params"] == {"a": 2.0}
    assert "umbilic" in document["rejected"]
    assert document["orders"]["commands"]["obstruction"] == 5
    assert "verified" in out.stderr


def test_validate_a_violated_tag(runner, write_scenario):
    path = write_scenario(
        {
            "id": "bowl",
            "ambient_dim": 4,
            "metric": {"catalog": "perturbed", "params": {"eps": 0.1}},
            "embedding": {"graph": "0.2 * (x1^2 + x2^2 + x3^2)"},
            "points": [[0.0, 0.0, 0.0]],
            "tags": ["flat"],
        }
    )
    out = runner.invoke(validate_cli, [path, "-o", "out.json"])
    assert out.exit_code == 3
    with open("out.json") as f:
        record = json.load(f)
    assert record["kind"] == "error"
    assert record["command"] == "validate"
    assert record["error"] == "ScopeError"


def test_validate_invalid_json(runner, write_scenario):
    path = write_scenario('{"id": "x",, }')
    out = runner.invoke(validate_cli, [path])
    assert out.exit_code == 2
    assert "Invalid scenario JSON" in out.stderr
