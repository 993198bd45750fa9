import numpy as np
import pytest

from src.core.errors import ConfigurationError, FrameError, PatchRadiusError, PreconditionError, RangeError, SignError
from src.transforms.frame import BoundaryFrame, FrameField, boundary_frame
from src.transforms.hodograph import hodograph_forward, patch_axes
from src.transforms.legendre import brute_force_conjugate, common_coverage, conjugate_slice, partial_legendre, pl_inverse
from src.transforms.patch import PatchField
from src.transforms.residual import cofactor_matrix, pl_residual, pl_residual_field, tangential_determinant


def quadratic_patch(a=1.0, delta=0.1, n1=21, nn=11):
    """v(y1, y_n) = a y1^2 / 2 + y_n."""
    return PatchField.from_function(
        lambda y1, yn: a * y1 ** 2 / 2.0 + yn,
        np.linspace(-delta, delta, n1),
        np.linspace(0.0, delta, nn),
        "v",
        delta=delta,
    )


def test_paraboloid_frame_is_already_normalized(paraboloid):
    frame = boundary_frame(paraboloid, theta=0.0, delta=0.1, lam=2.0, q=0.0)
    assert frame.alpha == pytest.approx(1.0, abs=1e-6)
    assert frame.beta == pytest.approx(1.0, abs=1e-6)
    assert np.allclose(frame.point, [1.0, 0.0])
    assert np.allclose(frame.normal, [-1.0, 0.0])
    assert frame.delta == 0.1
    assert frame.c0 == pytest.approx(0.35, abs=1e-6)
    assert frame.frame_lambda == pytest.approx(2.0, rel=1e-5)

    field = FrameField.from_grid(paraboloid, frame)
    assert field.d_n(0.0, 0.0) == pytest.approx(-1.0, abs=1e-6)
    assert field.d_11(0.0, 0.0) == pytest.approx(1.0, abs=1e-6)
    assert field(0.05, 0.1) == pytest.approx((0.9 ** 2 + 0.05 ** 2 - 1.0) / 2.0, abs=1e-10)


def test_frame_round_trips_through_a_dict(paraboloid):
    frame = boundary_frame(paraboloid, theta=1.0)
    back = BoundaryFrame.from_dict(frame.to_dict())
    assert back.to_dict() == frame.to_dict()
    assert np.allclose(back.to_physical(0.0, 0.0), frame.point)


def test_frame_rejects_a_non_monotone_profile(paraboloid):
    with pytest.raises(FrameError):
        boundary_frame(paraboloid.with_values(-paraboloid.values))


def test_frame_field_finite_differences():
    field = FrameField(lambda y1, xn: y1 ** 2 - 2.0 * xn + xn ** 2)
    assert field.d_n(0.3, 0.25) == pytest.approx(-1.5, abs=1e-7)
    assert field.d_11(0.3, 0.25) == pytest.approx(2.0, abs=1e-5)


def test_hodograph_of_a_normal_quadratic():
    v = hodograph_forward(lambda y1, xn: -xn + xn ** 2 / 2.0, delta=0.1)
    Y1, YN = np.meshgrid(v.x1, v.xn)
    assert np.max(np.abs(v.values - (1.0 - np.sqrt(1.0 - 2.0 * YN)))) < 1e-10
    assert v.kind == "v"
    assert v.metadata["identity_residual"] < 1e-12
    assert np.max(np.abs(v.values[0])) < 1e-15


def test_hodograph_of_a_tangentially_varying_slope():
    v = hodograph_forward(lambda y1, xn: -xn * (1.0 + y1 ** 2), delta=0.1, points=(17, 9))
    Y1, YN = np.meshgrid(v.x1, v.xn)
    assert np.max(np.abs(v.values - YN / (1.0 + Y1 ** 2))) < 1e-10


def test_hodograph_of_the_paraboloid(paraboloid):
    v = hodograph_forward(paraboloid, delta=0.1)
    Y1, YN = np.meshgrid(v.x1, v.xn)
    exact = 1.0 - np.sqrt(1.0 - Y1 ** 2 - 2.0 * YN)
    assert np.max(np.abs(v.values - exact)) < 1e-8
    assert v.frame is not None
    assert v.metadata["identity_residual"] < 1e-10


def test_hodograph_reports_a_patch_that_is_too_large():
    with pytest.raises(PatchRadiusError):
        hodograph_forward(lambda y1, xn: -0.1 * xn, delta=0.1)


def test_hodograph_reports_a_non_monotone_profile():
    with pytest.raises(FrameError):
        hodograph_forward(lambda y1, xn: -xn - 0.01 + 0.0 * y1, delta=0.1)


def test_hodograph_needs_a_radius_for_callables():
    with pytest.raises(ConfigurationError):
        hodograph_forward(lambda y1, xn: -xn)


def test_patch_axes():
    y1, yn = patch_axes(0.2, (5, 3))
    assert np.allclose(y1, [-0.2, -0.1, 0.0, 0.1, 0.2])
    assert np.allclose(yn, [0.0, 0.1, 0.2])
    with pytest.raises(ConfigurationError):
        patch_axes(0.2, (4, 3))


def test_patch_field_validation():
    with pytest.raises(ConfigurationError):
        PatchField(np.linspace(-1, 1, 5), np.linspace(0, 1, 3), np.ones((5, 3)))
    with pytest.raises(ConfigurationError):
        PatchField(np.linspace(-1, 1, 5), np.linspace(-1, 1, 3), np.ones((3, 5)))
    with pytest.raises(ConfigurationError):
        PatchField(np.linspace(-1, 1, 5), np.linspace(0, 1, 3), np.ones((3, 5)), kind="w")


@pytest.mark.parametrize("a", [1.0, 2.5])
def test_conjugate_of_a_quadratic_slice(a):
    y = np.linspace(-1.0, 1.0, 21)
    z = np.linspace(-0.5, 0.5, 7) * a
    values, y_star = conjugate_slice(y, a * y ** 2 / 2.0 + 0.3, z)
    assert np.allclose(values, z ** 2 / (2.0 * a) - 0.3, atol=1e-12)
    assert np.allclose(y_star, z / a, atol=1e-12)


def test_conjugate_of_the_exponential():
    y = np.linspace(-1.0, 1.0, 41)
    z = np.linspace(0.5, 2.5, 9)
    approx, _ = conjugate_slice(y, np.exp(y), z)
    exact = z * np.log(z) - z
    assert np.max(np.abs(approx - exact)) < 1e-3
    assert np.all(brute_force_conjugate(y, np.exp(y), z) <= approx + 1e-6)


def test_conjugate_requires_convexity():
    y = np.linspace(-1.0, 1.0, 11)
    with pytest.raises(PreconditionError):
        conjugate_slice(y, -(y ** 2), np.zeros(3))
    with pytest.raises(PreconditionError):
        conjugate_slice(y, y ** 2 / 2.0, np.zeros(3), threshold=2.0)


def test_common_coverage_is_the_tightest_slope_range():
    y = np.linspace(-1.0, 1.0, 5)
    lo, hi = common_coverage(y, [y ** 2, 2.0 * y ** 2])
    assert lo == pytest.approx(-1.5)
    assert hi == pytest.approx(1.5)


def test_partial_legendre_of_a_quadratic_patch():
    v = quadratic_patch(a=2.0)
    v_star = partial_legendre(v)
    Z1, ZN = np.meshgrid(v_star.x1, v_star.xn)
    assert v_star.kind == "v*"
    assert np.array_equal(v_star.xn, v.xn)
    assert np.allclose(v_star.values, Z1 ** 2 / 4.0 - ZN, atol=1e-12)
    lo, hi = v_star.metadata["coverage"]
    assert lo == pytest.approx(-2.0 * 0.095) and hi == pytest.approx(2.0 * 0.095)


@pytest.mark.parametrize("workers", [1, 3])
def test_partial_legendre_round_trip(workers):
    v = quadratic_patch()
    back = pl_inverse(partial_legendre(v, workers=workers), workers=workers)
    Y1, YN = np.meshgrid(back.x1, back.xn)
    assert back.kind == "v"
    assert len(back.x1) >= 3
    assert set(np.round(back.x1, 12)) <= set(np.round(v.x1, 12))
    assert np.allclose(back.values, Y1 ** 2 / 2.0 + YN, atol=1e-12)
    assert "coverage" not in back.metadata


def test_partial_legendre_range_and_convexity_errors():
    v = quadratic_patch()
    with pytest.raises(RangeError):
        partial_legendre(v, z_range=(-1.0, 1.0))
    concave = v.__class__(v.x1, v.xn, -v.values, "v", v.delta)
    with pytest.raises(PreconditionError):
        partial_legendre(concave)


def test_cofactors():
    assert np.array_equal(cofactor_matrix(np.array([[3.0]])), [[1.0]])
    H = np.array([[2.0, 1.0], [0.5, 3.0]])
    assert np.array_equal(cofactor_matrix(H), [[3.0, -0.5], [-1.0, 2.0]])
    assert tangential_determinant(H) == pytest.approx(np.linalg.det(H))
    assert tangential_determinant(np.array([[4.0]])) == 4.0
    with pytest.raises(ConfigurationError):
        cofactor_matrix(np.eye(3))


def test_pl_residual_of_a_manufactured_field():
    z1 = np.linspace(-0.1, 0.1, 11)
    zn = np.linspace(0.0, 0.1, 9)
    v_star = PatchField.from_function(lambda a, b: a ** 2 / 2.0 - b, z1, zn, "v*")
    assert pl_residual(v_star, 1, lam=2.0) == pytest.approx(2.0 * zn[-2], rel=1e-8)
    parts = pl_residual_field(v_star, 1, lam=2.0)
    assert np.allclose(parts["v_n"], -1.0)
    assert np.allclose(parts["v_11"], 1.0)


def test_pl_residual_sign_check():
    z1 = np.linspace(-0.1, 0.1, 11)
    zn = np.linspace(0.0, 0.1, 9)
    v_star = PatchField.from_function(lambda a, b: a ** 2 / 2.0 + b, z1, zn, "v*")
    with pytest.raises(SignError):
        pl_residual(v_star, 1)


def test_transform_pipeline_on_a_solution(q1_solution):
    u = q1_solution.u
    frame = boundary_frame(u, theta=0.0, delta=0.1)
    assert frame.q == 1.0
    v = hodograph_forward(u, frame)
    assert v.metadata["identity_residual"] <= 1e-10
    v_star = partial_legendre(v)
    parts = pl_residual_field(v_star, 1, frame.frame_lambda)
    assert np.max(np.abs(parts["residual"])) < 0.1 * np.max(np.abs(parts["v_nn"]))
