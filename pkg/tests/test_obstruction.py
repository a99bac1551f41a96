from collections import OrderedDict

import numpy as np
import pytest
from pytest import raises

from obstruction_lab.exceptions import ContractViolation
from obstruction_lab.expressions import constant
from obstruction_lab.obstruction import (
    FORMULAS,
    ObstructionReport,
    applicable_formulas,
    build_report,
    compute,
    compute_b2,
    compute_b3,
    conformal_check,
    default_formula,
    orientation_check,
)
from obstruction_lab.scenarios import from_catalog


def compared(ids):
    return [key for key in ids if FORMULAS[key].compare]


def test_every_formula_has_a_known_dimension():
    for entry in FORMULAS.values():
        assert entry.n in (2, 3)
        assert entry.formula_id.startswith("b{}_".format(entry.n))


def test_default_formulas():
    assert default_formula(2) == "b2_bianchi"
    assert default_formula(3) == "b3_final"


def test_three_dimensional_cylinder(geometry):
    a = 1.5
    g = geometry("cylinder_s2xr", a=a)
    ids = applicable_formulas(g)
    assert "b3_flat" in ids and "b3_oracle" in ids
    for formula_id in compared(ids):
        value = compute(g, formula_id)
        assert value == pytest.approx(np.full(3, -1.0 / (27.0 * a ** 4)), abs=1e-9)


def test_circular_cylinder(geometry):
    a = 2.0
    g = geometry("cylinder_s1xr", a=a)
    for formula_id in applicable_formulas(g):
        value = compute(g, formula_id)
        assert value == pytest.approx(np.full(3, -1.0 / (12.0 * a ** 3)), abs=1e-9)


@pytest.mark.parametrize("name", ["sphere_s3", "sphere_s2", "plane_r4"])
def test_obstruction_vanishes_on_round_spheres_and_planes(geometry, name):
    g = geometry(name)
    for formula_id in compared(applicable_formulas(g)):
        assert np.abs(compute(g, formula_id)).max() < 1e-9


@pytest.mark.parametrize("name", ["graph_flat", "conf_flat", "s4_round", "graph_flat_n2"])
def test_formulas_agree(geometry, name):
    report = build_report(geometry(name))
    assert report.failures() == []
    assert report.passed


def test_perturbed_background_with_conformal_factors(scenario):
    built = scenario("perturbed")
    report = build_report(built.geometry(6), conformal_factors=built.conformal_factors)
    assert report.failures() == []
    # one B_3 check, two LOP checks and the Bach tensor per factor
    assert len(report.conformal_checks) == 8
    assert report.bach.shape == (3, 3, 3)
    assert set(report.lop_values) == {"lo2_tf", "weyl"}


def test_perturbed_surface_with_conformal_factors(scenario):
    built = scenario("perturbed_n2")
    report = build_report(built.geometry(6), conformal_factors=built.conformal_factors)
    assert report.failures() == []
    assert len(report.conformal_checks) == 2
    assert report.bach is None


@pytest.mark.parametrize("name, parity", [("perturbed_n2", -1), ("perturbed", 1)])
def test_normal_flip(geometry, name, parity):
    check = orientation_check(geometry(name))
    assert check.weight == parity
    assert check.passed(1e-10, 1e-7)


def test_b2_is_odd_under_the_normal_flip(geometry):
    up = compute(geometry("graph_flat_n2"), "b2_bianchi")
    down = compute(geometry("graph_flat_n2", orientation=-1), "b2_bianchi")
    assert np.abs(up).max() > 1e-3
    assert np.allclose(up, -down, atol=1e-10)


def test_flip_adds_an_orientation_check(geometry):
    report = build_report(geometry("graph_flat"), ["b3_final", "b3_flat"], flip=True)
    assert [check.factor for check in report.conformal_checks] == ["normal flip"]
    assert report.passed


def test_conformal_check_with_a_constant_factor(geometry):
    g = geometry("graph_flat_n2")
    check = conformal_check(g, constant(0.3, 3))
    assert check.weight == 3
    assert check.passed(1e-10, 1e-7)


def test_reference_formula_is_not_compared(geometry):
    report = build_report(geometry("perturbed"), ["b3_final", "b3_gghw_published"])
    assert report.residual_matrix == OrderedDict()
    assert list(report.uncompared()) == ["b3_gghw_published"]
    document = report.as_dict()
    assert document["residuals"] == {}
    assert "b3_gghw_published" in document["uncompared"]


@pytest.mark.parametrize("name", ["perturbed", "s4_round", "umbilic_slice"])
def test_published_form_agrees_in_four_dimensions(geometry, name):
    g = geometry(name)
    report = build_report(g, ["b3_final", "b3_gghw_arxiv", "b3_gghw_published"])
    assert report.uncompared()["b3_gghw_published"] < 1e-9
    assert report.failures() == []


def test_non_finite_values_fail(geometry):
    g = geometry("graph_flat")
    report = ObstructionReport(g, OrderedDict([("b3_final", np.full(3, np.nan))]))
    assert report.failures() == ["b3_final is not finite"]


@pytest.mark.parametrize("name", ["graph_flat", "perturbed", "cylinder_s2xr"])
def test_formulas_match_the_oracle(geometry, name):
    g = geometry(name)
    oracle = compute(g, "b3_oracle")
    assert np.all(np.isfinite(oracle))
    for formula_id in ["b3_final", "b3_volume", "b3_gghw_arxiv"]:
        if formula_id in applicable_formulas(g):
            assert compute(g, formula_id) == pytest.approx(oracle, rel=1e-7, abs=1e-10)


def test_values_are_cached(geometry):
    g = geometry("graph_flat")
    assert compute(g, "b3_flat") is compute(g, "b3_flat")


def test_unknown_formula(geometry):
    with raises(ContractViolation) as excinfo:
        compute(geometry("graph_flat"), "b3_nonsense")
    assert "unknown formula id" in str(excinfo.value)


def test_formula_scope(geometry):
    with raises(ContractViolation) as excinfo:
        compute(geometry("perturbed"), "b3_flat")
    assert "not flat" in str(excinfo.value)
    with raises(ContractViolation):
        compute(geometry("perturbed"), "b2_bianchi")


def test_compute_checks_the_family(geometry):
    g = geometry("graph_flat")
    with raises(ContractViolation):
        compute_b2(g, "b3_final")
    with raises(ContractViolation):
        compute_b3(g, "b2_flat")
    assert compute_b3(g) is compute(g, "b3_final")


def test_disagreement_is_a_failure():
    g = from_catalog("graph_flat").geometry(4)
    values = OrderedDict(
        [("b3_final", np.array([1.0, 2.0])), ("b3_flat", np.array([1.0, 2.5]))]
    )
    report = ObstructionReport(g, values)
    failures = report.failures()
    assert failures == ["b3_final != b3_flat (largest difference 5.000e-01)"]
    assert not report.passed
    assert report.as_dict()["residuals"] == {"b3_final|b3_flat": 0.5}
