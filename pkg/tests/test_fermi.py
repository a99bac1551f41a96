import mock
import numpy as np
import pytest
from pytest import raises

from obstruction_lab.exceptions import InconsistencyError
from obstruction_lab.expansion import delta_prime, expansion_data
from obstruction_lab.fermi import fermi_chart


def test_chart_is_built_once(geometry):
    g = geometry("graph_flat", order=4)
    assert fermi_chart(g) is fermi_chart(g)


def test_sphere_metric_grows_quadratically(geometry):
    g = geometry("sphere_s3", order=5, rho=2.0)
    chart, hs = fermi_chart(g), g.hypersurface
    # h_r = (1 + r / rho)^2 h for the outward normal
    first = hs.to_frame(chart.h_coefficient(1).value, 2)
    second = hs.to_frame(chart.h_coefficient(2).value, 2)
    assert np.allclose(first, np.eye(3)[..., None])
    assert np.allclose(second, 0.25 * np.eye(3)[..., None])
    assert np.abs(chart.h_coefficient(3).value).max() < 1e-10


def test_sphere_volume_ratio(geometry):
    g = geometry("sphere_s3", order=5)
    chart = fermi_chart(g)
    # (1 + r)^3
    for k, expected in [(1, 3.0), (2, 3.0), (3, 1.0), (4, 0.0)]:
        assert chart.volume_coefficient(k).value == pytest.approx(
            np.full(3, expected), abs=1e-10
        )


@pytest.mark.parametrize("name", ["graph_flat", "perturbed"])
def test_gauss_lemma(geometry, name):
    chart = fermi_chart(geometry(name, order=5))
    assert chart.check_gauss_lemma() < 1e-8
    assert chart.trace_volume_residual() < 1e-8


def test_gauss_lemma_failure_is_reported(geometry):
    chart = fermi_chart(geometry("graph_flat", order=4))
    with mock.patch.object(chart, "gauss_lemma_residual", return_value=1e-3):
        with raises(InconsistencyError) as excinfo:
            chart.check_gauss_lemma()
    assert "Gauss lemma" in str(excinfo.value)


def test_first_coefficient_is_twice_the_second_fundamental_form(geometry):
    g = geometry("perturbed", order=4)
    chart, hs = fermi_chart(g), g.hypersurface
    first = hs.to_frame(chart.h_coefficient(1).value, 2)
    assert np.allclose(first, 2.0 * g.surface.L, atol=1e-10)
    assert chart.volume_coefficient(1).value == pytest.approx(3.0 * g.surface.H)


def test_volume_ratio_matches_the_closed_form(geometry):
    g = geometry("perturbed", order=6)
    chart, data = fermi_chart(g), expansion_data(g)
    for k in range(1, 5):
        assert np.allclose(chart.volume_coefficient(k).value, data.v[k], atol=1e-8)


def test_background_j_along_the_normal(geometry):
    g = geometry("perturbed", order=5)
    chart, a = fermi_chart(g), g.ambient
    assert np.allclose(chart.jbar_coefficient(0).value, a.jbar, atol=1e-10)
    assert np.allclose(chart.jbar_coefficient(1).value, a.jbar_p, atol=1e-9)


def test_flat_background_has_no_j(geometry):
    chart = fermi_chart(geometry("graph_flat", order=4))
    assert np.abs(chart.jbar.coeffs).max() < 1e-14


def test_first_variation_of_the_laplacian(geometry):
    g = geometry("graph_flat", order=6)
    chart, hs = fermi_chart(g), g.hypersurface
    assert np.allclose(
        chart.delta_prime(hs.H).value, delta_prime(g, hs.H), atol=1e-9
    )
