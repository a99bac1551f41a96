import click
import numpy as np
import pytest
from pytest import raises

from obstruction_lab.exceptions import ContractViolation
from obstruction_lab.utils import (
    THREADS_ENV,
    RunConfig,
    chunks,
    order_budget,
    required_order,
    to_builtin,
    within,
    worker_count,
    worst,
)


@pytest.mark.parametrize(
    "command, n, expected",
    [
        ("stacks", 3, 4),
        ("expansion", 2, 5),
        ("expansion", 3, 6),
        ("obstruction", 2, 5),
        ("identities", 3, 6),
        ("validate", 3, 4),
        ("something_else", 3, 6),
    ],
)
def test_required_order(command, n, expected):
    assert required_order(command, n) == expected


def test_order_budget_names_every_command():
    budget = order_budget(2)
    assert set(budget["commands"]) == {
        "stacks", "expansion", "obstruction", "identities", "variation", "all", "validate"
    }
    assert budget["operators"]["geodesic normal chart to r^(n+1)"] == 4


def test_within_broadcasts():
    assert within(np.array([1e-11, 1e-7]), np.array([0.0, 2.0]))
    assert not within(np.array([1e-9, 0.0]), np.array([0.0, 0.0]))
    assert within(0.5, 1.0, tol_abs=0.0, tol_rel=0.5)


def test_worst_keeps_the_batch_axis():
    values = np.zeros((3, 3, 2))
    values[1, 2, 1] = -4.0
    assert worst(values, 2).tolist() == [0.0, 4.0]


def test_to_builtin_handles_nesting():
    value = {1: [np.float64(0.5), {"x": np.arange(3)}], "b": np.bool_(True)}
    assert to_builtin(value) == {"1": [0.5, {"x": [0, 1, 2]}], "b": True}


def test_chunks_of_an_array():
    pieces = list(chunks(np.arange(10).reshape(5, 2), 2))
    assert [piece.shape[0] for piece in pieces] == [2, 2, 1]


def test_worker_count(monkeypatch):
    monkeypatch.delenv(THREADS_ENV, raising=False)
    assert worker_count() == 1
    monkeypatch.setenv(THREADS_ENV, "4")
    assert worker_count() == 4


@pytest.mark.parametrize("raw", ["four", "0"])
def test_bad_worker_count(monkeypatch, raw):
    monkeypatch.setenv(THREADS_ENV, raw)
    with raises(ContractViolation):
        worker_count()


def test_run_config_defaults_to_the_required_order():
    config = RunConfig("graph_flat")
    assert config.order_for("obstruction", 3) == 6
    assert config.order_for("stacks", 2) == 4


def test_run_config_refuses_a_small_order():
    config = RunConfig("graph_flat", jet_order=4)
    assert config.order_for("stacks", 3) == 4
    with raises(click.BadParameter) as excinfo:
        config.order_for("obstruction", 3)
    assert "at least order 6" in excinfo.value.format_message()


def test_run_config_document():
    config = RunConfig("sphere_s3", params={"rho": 2.0}, formulas=["b3_final"])
    document = config.as_dict()
    assert document["scenario"] == "sphere_s3"
    assert document["params"] == {"rho": 2.0}
    assert document["formulas"] == ["b3_final"]
    assert document["t_steps"] == []
    assert "json_path" not in document
