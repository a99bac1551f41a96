import mock
import numpy as np
import pytest

from obstruction_lab.exceptions import ContractViolation
from obstruction_lab.identities import (
    CATALOG,
    FAIL,
    INFO,
    PASS,
    SKIPPED,
    VACUOUS,
    Identity,
    balance,
    run_identity,
    run_suite,
)


def fake_identity(identity_id, evaluate, scope=()):
    return {identity_id: Identity(identity_id, "lhs = rhs", scope, evaluate)}


@pytest.mark.parametrize(
    "name", ["graph_flat", "conf_flat", "s4_round", "perturbed", "umbilic_slice"]
)
def test_catalog_holds_on_three_dimensional_scenarios(geometry, name):
    report = run_suite([geometry(name)])
    assert [result.as_dict() for result in report.failed] == []
    assert report.count(PASS) > 0


@pytest.mark.parametrize("name", ["graph_flat_n2", "perturbed_n2", "cylinder_s1xr"])
def test_catalog_holds_on_surfaces(geometry, name):
    report = run_suite([geometry(name)])
    assert [result.as_dict() for result in report.failed] == []
    assert report.count(SKIPPED) > 0


def test_results_per_point(geometry):
    g = geometry("perturbed")
    results = run_identity("codazzi", g)
    assert [result.point for result in results] == g.points.tolist()
    assert {result.status for result in results} == {PASS}
    assert all(result.normalized <= result.raw for result in results)


def test_scope_mismatch_is_skipped(geometry):
    results = run_identity("kappa1", geometry("sphere_s2"))
    assert {result.status for result in results} == {SKIPPED}
    assert results[0].reason == "requires n = 3"
    results = run_identity("kappa1_flat", geometry("perturbed"))
    assert results[0].reason == "requires a flat background"


def test_informational_entries(geometry):
    results = run_identity("new3a_alt", geometry("perturbed"))
    assert {result.status for result in results} == {INFO}


def test_vanishing_terms_are_vacuous(geometry):
    results = run_identity("codazzi", geometry("plane_r4"))
    assert {result.status for result in results} == {VACUOUS}


def test_weyl_contraction(geometry):
    results = run_identity("weyl_contraction", geometry("perturbed"))
    assert {result.status for result in results} == {PASS}
    results = run_identity("weyl_contraction", geometry("graph_flat"))
    assert {result.status for result in results} == {VACUOUS}


def test_flat_identities_with_n3_coefficients_skip_surfaces(geometry):
    results = run_identity("surprise_flat", geometry("graph_flat_n2"))
    assert {result.status for result in results} == {SKIPPED}
    assert results[0].reason == "requires n = 3"


def test_residual_is_normalized_by_the_largest_term(geometry):
    g = geometry("graph_flat")

    def evaluate(geometry):
        return [balance(np.ones(geometry.batch), np.full(geometry.batch, 3.0))]

    with mock.patch.dict(CATALOG, fake_identity("lopsided", evaluate)):
        results = run_identity("lopsided", g)
    assert {result.status for result in results} == {FAIL}
    assert results[0].raw == pytest.approx(2.0)
    assert results[0].normalized == pytest.approx(0.5)


def test_tolerance_decides(geometry):
    g = geometry("graph_flat")

    def evaluate(geometry):
        return [balance(np.ones(geometry.batch), np.full(geometry.batch, 1.0 + 1e-6))]

    with mock.patch.dict(CATALOG, fake_identity("close", evaluate)):
        assert run_identity("close", g, tolerance=1e-8)[0].status == FAIL
        assert run_identity("close", g, tolerance=1e-5)[0].status == PASS


def test_errors_are_recorded_and_the_suite_continues(geometry):
    g = geometry("graph_flat")

    def evaluate(geometry):
        raise ContractViolation("broken", "cannot evaluate")

    with mock.patch.dict(CATALOG, fake_identity("broken", evaluate)):
        report = run_suite([g], ["broken", "codazzi"])
    assert report.count(FAIL) == g.batch
    assert report.failed[0].reason == "broken: cannot evaluate"
    assert report.count(PASS) == g.batch
    assert not report.passed


def test_report_document(geometry):
    report = run_suite([geometry("graph_flat")], ["codazzi", "kappa1_flat"], tolerance=1e-7)
    document = report.as_dict()
    assert document["tolerance"] == 1e-7
    assert list(document["summary"]) == [PASS, FAIL, VACUOUS, SKIPPED, INFO]
    assert document["passed"] is True
    assert len(document["results"]) == 6
    assert set(document["results"][0]) == {
        "identity",
        "scenario",
        "point",
        "raw_residual",
        "normalized_residual",
        "status",
        "reason",
    }
