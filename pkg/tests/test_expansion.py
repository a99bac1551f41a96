import numpy as np
import pytest
from pytest import raises

from obstruction_lab.exceptions import ContractViolation, PoleError
from obstruction_lab.expansion import (
    expansion_data,
    residue_sigma4,
    sc_remainder_oracle,
    sigma_coefficients,
    sigma_flat,
    volume_closed,
    volume_newton,
)


def test_sphere_volume_coefficients(geometry):
    rho = 2.0
    g = geometry("sphere_s3", order=4, rho=rho)
    expected = [3.0 / rho, 3.0 / rho ** 2, 1.0 / rho ** 3, 0.0]
    for v in (volume_closed(g.surface, g.ambient), volume_newton(g.surface)):
        for k in range(1, 5):
            assert v[k] == pytest.approx(np.full(3, expected[k - 1]), abs=1e-12)


def test_cylinder_volume_coefficients(geometry):
    a = 0.5
    v = volume_newton(geometry("cylinder_s2xr", order=4, a=a).surface)
    assert v[1] == pytest.approx(np.full(3, 2.0 / a))
    assert v[2] == pytest.approx(np.full(3, 1.0 / a ** 2))
    assert np.abs(v[3]).max() < 1e-12


def test_closed_and_trace_forms_agree(geometry):
    data = expansion_data(geometry("perturbed", order=5))
    for k in range(1, 5):
        assert np.allclose(data.v[k], data.v_trace[k], rtol=1e-8, atol=1e-10)


def test_expansion_data_is_cached(geometry):
    g = geometry("graph_flat", order=5)
    assert expansion_data(g) is expansion_data(g)


def test_closed_density_coefficients_on_a_flat_background(geometry):
    g = geometry("graph_flat", order=5)
    data, flat = expansion_data(g), sigma_flat(g.surface)
    assert sorted(data.sigma) == [2, 3, 4]
    for k in (2, 3, 4):
        assert np.allclose(data.sigma[k], flat[k], atol=1e-12)


def test_sphere_density_coefficients(geometry):
    sigma = sigma_flat(geometry("sphere_s3", order=4, rho=2.0).surface)
    assert sigma[2] == pytest.approx(np.full(3, 0.25))
    assert np.abs(sigma[3]).max() < 1e-12
    assert np.abs(sigma[4]).max() < 1e-12


def test_sigma_4_has_a_pole_in_dimension_two():
    v = [1.0, 2.0, 0.0, 0.0, 0.0]
    with raises(PoleError) as excinfo:
        sigma_coefficients(v, 0.0, 0.0, 0.0, 2)
    assert excinfo.value.exit_code == 3
    assert excinfo.value.residue == pytest.approx(0.25)
    assert "n = 2" in str(excinfo.value)


def test_sigma_3_has_a_pole_in_dimension_one():
    with raises(PoleError):
        sigma_coefficients([1.0, 1.0, 0.0], 0.0, 0.0, 0.0, 1, upto=3)


def test_low_dimensional_coefficients_are_finite():
    sigma = sigma_coefficients([1.0, 1.0, 0.0], 0.0, 0.0, 0.0, 2, upto=3)
    assert sigma == {2: 0.25, 3: pytest.approx(-1.0 / 6.0)}


def test_residue_on_the_circular_cylinder(geometry):
    a = 2.0
    g = geometry("cylinder_s1xr", order=5, a=a)
    # -3/8 of B_2 = -1 / (12 a^3)
    assert residue_sigma4(g) == pytest.approx(np.full(3, 1.0 / (32.0 * a ** 3)))
    assert expansion_data(g).residue == pytest.approx(residue_sigma4(g))


def test_residue_needs_dimension_two(geometry):
    with raises(ContractViolation):
        residue_sigma4(geometry("graph_flat", order=5))


def test_remainder_vanishes_on_the_round_sphere(geometry):
    remainder = sc_remainder_oracle(geometry("sphere_s3", rho=1.5))
    assert np.abs(remainder).max() < 1e-8


def test_remainder_is_recorded_in_the_expansion_data(geometry):
    g = geometry("sphere_s2")
    data = expansion_data(g)
    remainder = sc_remainder_oracle(g)
    assert data.sc_remainder is remainder
    assert "sc_remainder" in data.as_dict()
    assert "residue_sigma4" in data.as_dict()
