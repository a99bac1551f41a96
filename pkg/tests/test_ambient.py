import numpy as np
import pytest
from pytest import raises

from obstruction_lab import ambient
from obstruction_lab.exceptions import ContractViolation, GeometryError
from obstruction_lab.expressions import ScalarField
from obstruction_lab.scenarios import perturbed_metric, round_sphere_metric

POINTS = np.array([[0.1, -0.2, 0.05, 0.3], [0.0, 0.0, 0.0, 0.0]])


def orthonormal_riemann(curvature):
    """Riemann tensor values in an orthonormal frame of the coordinate metric."""
    g = np.moveaxis(curvature.metric.value, -1, 0)
    frames = np.linalg.inv(np.linalg.cholesky(g)).transpose(0, 2, 1)
    basis = np.moveaxis(frames, 0, -1)
    return ambient.to_frame(curvature.riemann.value, basis, 4)


def test_round_sphere_has_constant_curvature():
    curvature = ambient.curvature_from_metric(round_sphere_metric(4), POINTS, 3)
    assert np.allclose(curvature.scal.value, 12.0)
    assert np.allclose(curvature.jbar.value, 2.0)
    assert np.allclose(
        curvature.ricci.value, 3.0 * curvature.metric.value, atol=1e-12
    )
    assert np.abs(curvature.weyl.value).max() < 1e-12


def test_sphere_sectional_curvature_in_a_frame():
    curvature = ambient.curvature_from_metric(round_sphere_metric(4), POINTS, 2)
    riemann = orthonormal_riemann(curvature)
    # R_ijji = 1 for i != j
    assert riemann[0, 1, 1, 0] == pytest.approx(np.ones(2))
    assert riemann[2, 3, 2, 3] == pytest.approx(-np.ones(2))
    residuals = ambient.symmetry_residuals(riemann)
    assert max(residuals.values()) < 1e-12


def test_perturbed_metric_has_weyl_curvature():
    curvature = ambient.curvature_from_metric(perturbed_metric(4, {"eps": 0.1}), POINTS, 3)
    riemann = orthonormal_riemann(curvature)
    assert max(ambient.symmetry_residuals(riemann).values()) < 1e-12
    assert np.abs(curvature.weyl.value).max() > 1e-3


def test_conformally_flat_metric_has_no_weyl_curvature():
    phi = ScalarField("0.1 * x1 + 0.05 * x2 * x4 - 0.04 * x3^2", 4)
    metric = ambient.MetricField.euclidean(4).conformal(phi)
    curvature = ambient.curvature_from_metric(metric, POINTS, 3)
    assert np.abs(curvature.weyl.value).max() < 1e-12
    assert np.abs(curvature.riemann.value).max() > 1e-3


def test_christoffel_symbols_of_a_polar_metric():
    metric = ambient.MetricField.from_table({"22": "x1^2"}, 2)
    curvature = ambient.curvature_from_metric(metric, np.array([[2.0, 0.3]]), 2)
    gamma = curvature.christoffel.value[..., 0]
    assert gamma[0, 1, 1] == pytest.approx(-2.0)
    assert gamma[1, 0, 1] == pytest.approx(0.5)
    assert gamma[1, 1, 0] == pytest.approx(0.5)
    assert gamma[0, 0, 0] == pytest.approx(0.0)
    # the flat plane in polar coordinates
    assert np.abs(curvature.riemann.value).max() < 1e-12


def test_metric_must_be_positive_definite():
    metric = ambient.MetricField.from_table({"11": "x2"}, 2)
    with raises(GeometryError) as excinfo:
        metric.lift(np.array([[0.0, -1.0]]), 2)
    assert "positive definite" in str(excinfo.value)


def test_metric_table_index_out_of_range():
    with raises(ValueError):
        ambient.MetricField.from_table({"15": "x1"}, 4)


def test_curvature_needs_two_derivatives():
    with raises(ContractViolation):
        ambient.curvature_from_metric(round_sphere_metric(4), POINTS, 1)


def test_kulkarni_nomizu_of_identity():
    g = np.eye(3)[..., None]
    kn = ambient.kulkarni_nomizu(g, g)
    assert kn[0, 1, 0, 1, 0] == 2.0
    assert kn[0, 1, 1, 0, 0] == -2.0
    assert kn[0, 0, 1, 1, 0] == 0.0


def test_weyl_traces_of_a_trace_free_tensor():
    curvature = ambient.curvature_from_metric(perturbed_metric(4, {"eps": 0.1}), POINTS, 3)
    g = np.moveaxis(curvature.metric.value, -1, 0)
    frames = np.linalg.inv(np.linalg.cholesky(g)).transpose(0, 2, 1)
    weyl = ambient.to_frame(curvature.weyl.value, np.moveaxis(frames, 0, -1), 4)
    assert ambient.weyl_traces(weyl) < 1e-12


def test_ambient_stack_on_the_round_sphere(geometry):
    stack = geometry("s4_round", order=4).ambient
    assert stack.scal == pytest.approx(np.full(3, 12.0))
    assert stack.jbar == pytest.approx(np.full(3, 2.0))
    assert np.allclose(stack.ricci, 3.0 * np.eye(4)[..., None])
    assert np.allclose(stack.schouten, 0.5 * np.eye(4)[..., None])
    assert np.allclose(stack.einstein, -3.0 * np.eye(4)[..., None])
    assert np.abs(stack.W0).max() < 1e-12
    assert stack.ric00 == pytest.approx(np.full(3, 3.0))


def test_cotton_tensor_through_both_paths(geometry):
    stack = geometry("perturbed", order=4).ambient
    assert np.abs(stack.cotton0).max() > 1e-4
    assert np.allclose(stack.cotton0, ambient.cotton_from_ambient(stack), atol=1e-12)
