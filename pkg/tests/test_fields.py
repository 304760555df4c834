import numpy as np
import pytest

from quadlandau.fields import (
    CartPoint,
    FieldEvaluationError,
    QuadrupoleTensor,
    check_identities,
    curl,
    effective_magnetic_field,
    electric_field,
    faraday_residual,
    induced_magnetic_field,
    jacobian,
    moment_cross_field,
    moment_dot_field,
    observed_order,
    sample_grid,
)

T1 = QuadrupoleTensor.planar(1.0)


@pytest.mark.parametrize(
    "point, b, expected",
    [
        (CartPoint(0, 0, 7.0), 1.0, (0, 0, 0)),
        (CartPoint(1, 0), 2.0, (0, 0, 1)),
        (CartPoint(3, 4), 1.0, (0, 0, 12.5)),
    ],
)
def test_electric_field_values(point, b, expected):
    np.testing.assert_allclose(electric_field(point, b), expected, atol=0)


@pytest.mark.parametrize(
    "point, expected",
    [
        (CartPoint(2, -1, 0, t=0.0), (0, 0, 0)),
        (CartPoint(1, 0, 0, t=1.0), (0, 1, 0)),
        (CartPoint(0, 2, 0, t=3.0), (-6, 0, 0)),
    ],
)
def test_induced_magnetic_field_values(point, expected):
    np.testing.assert_allclose(induced_magnetic_field(point, 1.0), expected, atol=0)


def test_planar_tensor_is_symmetric_traceless_and_read_only():
    assert T1.is_symmetric()
    assert T1.is_traceless()
    with pytest.raises(ValueError):
        T1.components[0, 0] = 5.0
    with pytest.raises(ValueError):
        QuadrupoleTensor(np.eye(2))


@pytest.mark.parametrize(
    "point, expected",
    [
        (CartPoint(1, 0, 0), (0, -1, 0)),
        (CartPoint(0, 0, 0), (0, 0, 0)),
        (CartPoint(0, 2, 0), (2, 0, 0)),
    ],
)
def test_moment_cross_field(point, expected):
    got = moment_cross_field(point, T1, lambda p: electric_field(p, 1.0), 1e-4)
    np.testing.assert_allclose(got, expected, atol=1e-8)


@pytest.mark.parametrize("point", [CartPoint(1, 1, 0), CartPoint(5, -3, 2)])
def test_effective_field_is_uniform(point):
    np.testing.assert_allclose(effective_magnetic_field(point, T1, 1.0, 1e-4), (0, 0, -2), atol=1e-6)


def test_effective_field_scales_with_mb():
    got = effective_magnetic_field(CartPoint(0.3, -0.7, 0.1), QuadrupoleTensor.planar(0.5), 3.0, 1e-3)
    np.testing.assert_allclose(got, (0, 0, -3.0), atol=1e-8)


def test_zero_gradient_gives_zero_fields():
    p = CartPoint(0.4, 1.3, -0.2, t=2.0)
    assert np.all(effective_magnetic_field(p, T1, 0.0, 1e-4) == 0.0)
    assert np.all(faraday_residual(p, 0.0) == 0.0)


def test_faraday_residual_small():
    assert np.linalg.norm(faraday_residual(CartPoint(1, 0, 0, t=0.5), 1.0, 1e-4)) < 1e-6
    assert np.all(faraday_residual(CartPoint(0, 0, 0, t=1.0), 1.0) == 0.0)


def test_moment_dot_field_vanishes():
    assert abs(moment_dot_field(CartPoint(1, 2, 0), 5.0, T1, 1.0, 1e-3)) < 1e-8
    assert moment_dot_field(CartPoint(1, 2, 0), 0.0, T1, 1.0, 1e-3) == 0.0
    assert moment_dot_field(CartPoint(0, 0, 3.0), 2.0, T1, 1.0, 1e-3) == 0.0


def test_non_finite_field_raises():
    with pytest.raises(FieldEvaluationError):
        jacobian(lambda p: np.array([np.nan, 0.0, 0.0]), CartPoint(0, 0), 1e-3)


def _smooth_field(p):
    return np.array([np.sin(p.y) * np.cos(p.z), np.exp(0.3 * p.x) * np.sin(p.z), np.cos(p.x * p.y)])


def _smooth_curl(p):
    # analytic curl of _smooth_field
    dFz_dy = -p.x * np.sin(p.x * p.y)
    dFy_dz = np.exp(0.3 * p.x) * np.cos(p.z)
    dFx_dz = -np.sin(p.y) * np.sin(p.z)
    dFz_dx = -p.y * np.sin(p.x * p.y)
    dFy_dx = 0.3 * np.exp(0.3 * p.x) * np.sin(p.z)
    dFx_dy = np.cos(p.y) * np.cos(p.z)
    return np.array([dFz_dy - dFy_dz, dFx_dz - dFz_dx, dFy_dx - dFx_dy])


def test_central_differences_are_second_order_on_smooth_field():
    # The model fields are low-degree polynomials, for which central
    # differences are exact; a transcendental field exposes the truncation order.
    p = CartPoint(0.7, -0.4, 0.9)
    errs = [np.linalg.norm(curl(_smooth_field, p, h) - _smooth_curl(p)) for h in (1e-2, 5e-3)]
    assert 1.9 < observed_order(*errs) < 2.1


def test_check_identities_on_default_grid():
    pts = sample_grid()
    assert len(pts) == 300
    res = check_identities(pts, 1.0, 1.0, 1e-3)
    assert res.faraday_max < 1e-8
    assert res.moment_dot_max < 1e-8
    assert res.effective_spread < 1e-8
    np.testing.assert_allclose(res.effective_mean, (0, 0, -2), atol=1e-8)


def test_observed_order_degenerate_inputs():
    assert np.isnan(observed_order(0.0, 1e-12))
    assert observed_order(4e-6, 1e-6) == pytest.approx(2.0)
