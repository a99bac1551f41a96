import numpy as np
import pytest
from pytest import raises

from obstruction_lab.exceptions import ContractViolation
from obstruction_lab.expressions import ScalarField
from obstruction_lab.functional import (
    DEFAULT_GRID,
    ClosedScenario,
    FunctionalReport,
    NormalFlow,
    conformal_invariance,
    integrate,
    integrate_many,
    normal_variation,
    total_divergence_checks,
    variation_pointwise,
    willmore_residual,
)
from obstruction_lab.scenarios import from_catalog


def closed(name="torus_graph", grid=8, **params):
    return ClosedScenario(from_catalog(name, params), grid=grid)


def test_only_closed_scenarios():
    with raises(ContractViolation) as excinfo:
        ClosedScenario(from_catalog("graph_flat"))
    assert "closed" in str(excinfo.value)


def test_non_periodic_data_is_rejected():
    with raises(ContractViolation) as excinfo:
        ClosedScenario(from_catalog("torus_graph", {"F": "0.05 * x1 * sin(x2)"}))
    assert "periodic" in str(excinfo.value)


@pytest.mark.parametrize("grid", [7, 0])
def test_grid_must_be_even(grid):
    with raises(ContractViolation):
        ClosedScenario(from_catalog("torus_graph"), grid=grid)


def test_grid():
    c = closed(grid=4)
    assert c.grid_points.shape == (64, 3)
    assert c.grid_points[1].tolist() == pytest.approx([0.0, 0.0, 0.5 * np.pi])
    assert c.weight == pytest.approx((0.5 * np.pi) ** 3)
    assert DEFAULT_GRID == 32


def test_flat_subtorus_has_no_energy():
    c = closed(grid=4, F="0")
    w3 = integrate(c, "w3")
    assert w3.value == 0.0
    assert w3.error == 0.0


def test_parts_of_the_energy_vanish_on_a_flat_subtorus():
    c = closed(grid=4, F="0")
    values = integrate_many(c, ["tr_lo3", "lo_weyl"])
    assert list(values) == ["tr_lo3", "lo_weyl"]
    assert all(q.value == 0.0 for q in values.values())


def test_integrand_dimension_and_name():
    c = closed(grid=4)
    with raises(ContractViolation):
        integrate(c, "w2")
    with raises(ContractViolation):
        integrate(c, "nonsense")


def test_total_divergences_integrate_to_zero():
    checks = total_divergence_checks(closed(grid=12))
    assert list(checks) == ["divergence_lo", "divergence_weyl"]
    assert all(item["passed"] for item in checks.values())


def test_energy_is_conformally_invariant():
    c = closed(grid=4)
    check = conformal_invariance(c, ScalarField("0.1 * sin(x1 + x4)", 4))
    assert check.quantity == "W3"
    assert check.passed(0.0, 1e-7)


def test_step_ladder_is_validated():
    c = closed(grid=4)
    with raises(ContractViolation):
        normal_variation(c, t_steps=(1e-3,))
    with raises(ContractViolation):
        normal_variation(c, t_steps=(1e-3, 2e-3, 5e-3))
    with raises(ContractViolation):
        normal_variation(c, t_steps=(-1e-3, 1e-3))


def test_variation_on_a_coarse_grid():
    report = normal_variation(closed(grid=8), t_steps=(1e-3, 2e-3))
    assert report.energy == "W3"
    assert report.order_pre is None
    assert report.residual < 1e-4 * (1.0 + abs(report.rhs))
    assert list(report.total_divergences) == ["divergence_lo", "divergence_weyl"]
    assert set(report.extras) == {"var_tr_lo3", "var_lo_weyl"}
    # the two parts add up to the whole
    total = report.extras["var_tr_lo3"] + report.extras["var_lo_weyl"]
    assert total == pytest.approx(report.variation_fd, abs=1e-10)


def test_variation_converges_at_the_expected_order():
    report = normal_variation(closed(grid=8), t_steps=(2e-3, 4e-3, 8e-3))
    assert report.order_pre == pytest.approx(2.0, abs=0.1)
    assert report.order_post is None or report.order_post >= 3.5
    assert report.residual < 1e-4 * (1.0 + abs(report.rhs))


def test_normal_flow_is_built_once_per_batch():
    c = closed(grid=4)
    flow = NormalFlow(c.scenario.embedding, c.scenario.metric, c.u)
    still = integrate_many(c, ["w3"], flow.at(0.0))["w3"].value
    for t in (1e-3, -1e-3, 2e-3):
        integrate_many(c, ["w3"], flow.at(t))
    assert flow.cached_batches == 1
    assert still == pytest.approx(integrate(c, "w3").value, abs=1e-12)


@pytest.mark.slow
def test_variation_on_the_default_grid():
    report = normal_variation(closed(grid=DEFAULT_GRID))
    assert report.passed()
    assert report.order_post is None or report.order_post >= 3.5


def test_failures_name_both_sides():
    report = FunctionalReport(closed(grid=4), [1e-3, 2e-3])
    report.variation_fd = -1.0
    report.rhs = 1.5
    assert report.residual == pytest.approx(0.5)
    assert report.failures() == [
        "-d/dt W3 = 1.0 but the variation formula gives 1.5"
    ]
    assert report.as_dict()["passed"] is False


@pytest.mark.parametrize("name", ["torus_graph", "torus_curved"])
def test_pointwise_first_variations(scenario, name):
    built = scenario(name)
    results = variation_pointwise(built.geometry(4), built.variation)
    assert list(results) == ["h", "L", "H", "dvol"]
    for result in results.values():
        assert result.passed(), result.as_dict()


def test_willmore_residual_needs_a_surface(geometry):
    with raises(ContractViolation):
        willmore_residual(geometry("graph_flat", order=4))


def test_willmore_residual_on_the_cylinder(geometry):
    a = 2.0
    # Delta H = 0, K = 0 and H = 1 / (2a)
    residual = willmore_residual(geometry("cylinder_s1xr", order=4, a=a))
    assert residual == pytest.approx(np.full(3, 2.0 / (2.0 * a) ** 3))
