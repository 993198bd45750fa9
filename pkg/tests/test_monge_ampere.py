import numpy as np
import pytest

from src.core.domain import Domain2D
from src.core.errors import (
    ConfigurationError,
    ConvexityError,
    DomainError,
    NegativityError,
    OracleError,
    StiffnessError,
)
from src.core.fields import GridFunction
from src.core.polar import PolarMesh
from src.monge_ampere.config import FlowConfig, NewtonConfig
from src.monge_ampere.eigen import eigen_solve
from src.monge_ampere.flow import flow_step, run_flow
from src.monge_ampere.functionals import functional_gradient, functional_J, rayleigh_lambda
from src.monge_ampere.geometry import level_set_curvature
from src.monge_ampere.newton import (
    admissibility,
    default_initializer,
    ma_residual,
    newton_solve,
    radial_initializer,
)
from src.monge_ampere.oracle import RadialProfile, lobatto_nodes, radial_oracle


def scaled_paraboloid(domain, c, n_r=32, n_theta=32):
    """c (|X|^2 - 1) / 2 in reference coordinates, so det D^2 = c^2 / (ab)^2."""
    a, b = domain.a, domain.b
    return GridFunction.from_function(
        domain, n_r, n_theta, lambda x, y: c * ((x / a) ** 2 + (y / b) ** 2 - 1.0) / 2.0
    )


def test_config_validation():
    with pytest.raises(ConfigurationError):
        NewtonConfig(tol=0.0)
    with pytest.raises(ConfigurationError):
        NewtonConfig(damping=1.0)
    with pytest.raises(ConfigurationError):
        FlowConfig(dt=-1.0)
    with pytest.raises(ConfigurationError):
        FlowConfig(scheme="crank-nicolson")


def test_paraboloid_is_the_q0_solution(disc):
    solution = newton_solve(disc, 0.0, 1.0, n_r=32, n_theta=32)
    exact = scaled_paraboloid(disc, 1.0)
    assert np.max(np.abs(solution.u.values - exact.values)) < 1e-8
    assert solution.center_value == pytest.approx(-0.5, abs=1e-8)
    assert solution.residual < 1e-9


def test_ellipse_q0_closed_form():
    a, b = 1.5, 0.6
    domain = Domain2D.from_axes(a, b)
    solution = newton_solve(domain, 0.0, 1.0, n_r=32, n_theta=32)
    exact = scaled_paraboloid(domain, a * b)
    assert np.max(np.abs(solution.u.values - exact.values)) < 1e-8


def test_ellipse_reduces_to_the_disc():
    a, b = 1.2, 0.8
    ellipse = newton_solve(Domain2D.from_axes(a, b), 1.0, 1.0, n_r=24, n_theta=16)
    disc = newton_solve(Domain2D(), 1.0, (a * b) ** 2, n_r=24, n_theta=16)
    assert np.max(np.abs(ellipse.u.values - disc.u.values)) < 1e-10


def test_q1_against_radial_oracle(q1_solution):
    oracle = radial_oracle(1.0)
    assert q1_solution.center_value == pytest.approx(oracle.center_value, rel=1e-2)
    assert q1_solution.min_value < 0.0
    assert np.all(q1_solution.u.values[-1] == 0.0)


def test_newton_residuals_never_increase(q1_solution):
    residuals = [record.residual for record in q1_solution.iterations]
    assert all(later <= earlier for earlier, later in zip(residuals, residuals[1:]))
    assert q1_solution.to_dict()["iterations"][0]["step"] == 0


def test_ma_residual_of_the_solution(q1_solution):
    F = ma_residual(q1_solution.u, 1.0, 1.0)
    assert np.max(np.abs(F)) <= 1e-9


@pytest.mark.parametrize("t", [0.5, 2.0])
def test_scaled_solution_solves_the_rescaled_problem(q1_solution, t):
    # det D^2 (t u) = t^2 det D^2 u and (-t u)^q = t^q (-u)^q, so lambda picks up t^(2 - q)
    scaled = q1_solution.u.with_values(t * q1_solution.u.values)
    F = ma_residual(scaled, 1.0, t ** (2 - 1.0))
    assert np.allclose(F, t ** 2 * ma_residual(q1_solution.u, 1.0, 1.0), atol=1e-12)


def test_initial_iterate_must_be_negative(disc, paraboloid):
    with pytest.raises(NegativityError):
        newton_solve(disc, 1.0, 1.0, u0=paraboloid.with_values(-paraboloid.values))


def test_initial_iterate_must_be_convex(disc):
    bump = GridFunction.from_function(disc, 32, 32, lambda x, y: -(1.0 - x ** 2 - y ** 2) ** 2)
    with pytest.raises(ConvexityError):
        newton_solve(disc, 1.0, 1.0, u0=bump)


def test_negative_exponent_rejected(disc):
    with pytest.raises(ConfigurationError):
        newton_solve(disc, -1.0, 1.0)


def test_default_initializer_balances_the_centre():
    mesh = PolarMesh.create(16, 16)
    U = default_initializer(mesh, 1.0, 1.0)
    # c = (1 / 2)^(1 / (2 - 1))
    assert np.allclose(U[:-1], 0.5 * (mesh.R[:-1] ** 2 - 1.0) / 2.0)
    assert np.all(U[-1] == 0.0)


def test_radial_start_is_admissible_above_q2():
    mesh = PolarMesh.create(32, 16)
    U = radial_initializer(mesh, 3.0, 1.0)
    assert admissibility(mesh, U) is None
    assert np.all(U[-1] == 0.0)


@pytest.mark.parametrize("q", [2.5, 3.0, 4.0])
def test_superlinear_dirichlet_solve(disc, q):
    solution = newton_solve(disc, q, 1.0, n_r=48, n_theta=16)
    oracle = radial_oracle(q)
    assert solution.residual <= 1e-8
    assert solution.center_value == pytest.approx(oracle.center_value, rel=1e-2)


@pytest.mark.slow
def test_q3_center_value_at_256_rings():
    solution = newton_solve(Domain2D(), 3.0, 1.0, n_r=256, n_theta=16)
    oracle = radial_oracle(3.0)
    assert solution.center_value == pytest.approx(oracle.center_value, rel=1e-4)


@pytest.mark.slow
def test_eigenvalue_at_256_rings():
    solution = eigen_solve(Domain2D(), n_r=256, n_theta=16)
    assert solution.lam == pytest.approx(radial_oracle(2.0, mode="eigen").lam, rel=1e-4)
    assert solution.center_value == pytest.approx(-1.0, rel=1e-4)


def test_eigenpair(eigen_pair):
    oracle = radial_oracle(2.0, mode="eigen")
    assert eigen_pair.mode == "eigen"
    assert eigen_pair.lam == pytest.approx(oracle.lam, rel=1e-2)
    assert eigen_pair.u.sup_norm() == pytest.approx(1.0, abs=1e-14)
    assert rayleigh_lambda(eigen_pair.u, 2.0) == pytest.approx(eigen_pair.lam, rel=1e-6)


@pytest.mark.slow
def test_eigenvalue_fine_mesh():
    oracle = radial_oracle(2.0, mode="eigen")
    solution = eigen_solve(Domain2D(), n_r=128, n_theta=32)
    assert solution.lam == pytest.approx(oracle.lam, rel=1e-3)


def test_eigenvalue_scaling():
    disc = eigen_solve(Domain2D(), n_r=24, n_theta=16)
    ellipse = eigen_solve(Domain2D.from_axes(2.0, 0.5), n_r=24, n_theta=16)
    big = eigen_solve(Domain2D.from_axes(2.0, 2.0), n_r=24, n_theta=16)
    assert ellipse.lam == pytest.approx(disc.lam, rel=1e-12)
    assert big.lam == pytest.approx(disc.lam / 16.0, rel=1e-12)


def test_eigen_rejects_other_dimensions():
    with pytest.raises(ConfigurationError):
        eigen_solve(Domain2D(), n_eq=3)


def test_rayleigh_quotient(paraboloid):
    assert rayleigh_lambda(paraboloid, 0.0) == pytest.approx(1.0, rel=1e-8)
    cubic = rayleigh_lambda(paraboloid, 2.0)
    assert rayleigh_lambda(paraboloid.with_values(3.0 * paraboloid.values), 2.0) == pytest.approx(cubic, rel=1e-12)
    with pytest.raises(DomainError):
        rayleigh_lambda(paraboloid.with_values(np.zeros_like(paraboloid.values)), 2.0)


def test_energy_of_the_paraboloid(disc):
    u = scaled_paraboloid(disc, 1.0, n_r=64, n_theta=32)
    assert functional_J(u, 0.0) == pytest.approx(-np.pi / 6.0, rel=1e-3)
    assert functional_J(u.with_values(np.zeros_like(u.values)), 1.0) == 0.0


def test_energy_gradient_vanishes_at_the_solution(q1_solution):
    g = functional_gradient(q1_solution.u, 1.0)
    assert np.max(np.abs(g)) <= 1e-8


def test_level_set_curvature_of_the_paraboloid(paraboloid):
    kappa = level_set_curvature(paraboloid)
    R = paraboloid.mesh.R
    assert np.allclose(kappa.values[:-1], 1.0 / R[:-1], rtol=1e-8)
    assert np.allclose(kappa.values[-1], 1.0)
    assert kappa.metadata["quantity"] == "level_set_curvature"


def test_flow_step_at_a_fixed_point(q1_solution):
    dt = 1e-2
    u = flow_step(q1_solution.u, 1.0, FlowConfig(dt=dt))
    assert np.max(np.abs(u.values - q1_solution.u.values)) <= dt * 1e-6
    assert u.metadata["dt"] == dt


def test_explicit_flow_step_adds_the_log_defect(disc):
    # det D^2 u = e and q = 0, so the right-hand side is 1 at every interior node
    u = scaled_paraboloid(disc, np.sqrt(np.e))
    dt = 1e-3
    stepped = flow_step(u, 0.0, FlowConfig(dt=dt, scheme="explicit"))
    change = stepped.values - u.values
    assert np.allclose(change[:-1], dt, atol=1e-10)
    assert np.all(change[-1] == 0.0)
    assert stepped.metadata["flow_residual"] == pytest.approx(1.0, abs=1e-8)


def test_flow_stiffness_is_reported(disc):
    u = scaled_paraboloid(disc, np.sqrt(np.e))
    with pytest.raises(StiffnessError):
        flow_step(u, 0.0, FlowConfig(dt=10.0, max_halvings=0, scheme="explicit"))


def test_flow_halves_the_step(disc):
    u = scaled_paraboloid(disc, np.sqrt(np.e))
    stepped = flow_step(u, 0.0, FlowConfig(dt=10.0, max_halvings=20, scheme="explicit"))
    assert stepped.metadata["dt"] < 10.0
    assert np.all(stepped.values[:-1] < 0.0)


def test_linearly_implicit_flow_reaches_the_newton_solution(q1_solution):
    mesh = PolarMesh.create(q1_solution.u.n_r, q1_solution.u.n_theta)
    u0 = q1_solution.u.with_values(default_initializer(mesh, 1.0, 1.0))
    result = run_flow(u0, 1.0, FlowConfig(dt=1.0, steps=300, residual_stop=1e-8, scheme="linearly-implicit"))
    assert result.converged
    assert result.residual <= 1e-8
    assert np.max(np.abs(result.u.values - q1_solution.u.values)) <= 1e-6
    assert result.to_dict()["history"][0]["step"] == 0


def test_default_flow_reaches_the_newton_solution(q1_solution):
    mesh = PolarMesh.create(q1_solution.u.n_r, q1_solution.u.n_theta)
    u0 = q1_solution.u.with_values(default_initializer(mesh, 1.0, 1.0))
    result = run_flow(u0, 1.0)
    assert FlowConfig().scheme == "linearly-implicit"
    assert result.converged
    assert result.residual < 1e-6
    assert np.max(np.abs(result.u.values - q1_solution.u.values)) <= 1e-5


def test_flow_with_no_steps_records_the_start(paraboloid):
    result = run_flow(paraboloid, 0.0, FlowConfig(steps=0, residual_stop=1e-12))
    assert len(result.history) == 1
    assert result.history[0].J == pytest.approx(functional_J(paraboloid, 0.0))


def test_oracle_q0_is_the_paraboloid():
    profile = radial_oracle(0.0)
    assert profile.center_value == pytest.approx(-0.5, abs=1e-9)
    assert np.allclose(profile.values, (profile.r ** 2 - 1.0) / 2.0, atol=1e-8)


def test_oracle_residual_and_report():
    profile = radial_oracle(1.0)
    assert profile.residual() < 1e-8
    report = profile.to_dict()
    assert report["mode"] == "dirichlet"
    assert report["center_value"] == profile.center_value


def test_profile_residual_is_exact_for_the_paraboloid():
    r = lobatto_nodes(1.0)
    profile = RadialProfile(r, (r ** 2 - 1.0) / 2.0, r.copy(), 0.0, 1.0, 1.0)
    assert profile.residual() < 1e-12
    bent = RadialProfile(r, (r ** 2 - 1.0) / 2.0, 1.1 * r, 0.0, 1.0, 1.0)
    assert bent.residual() == pytest.approx(0.21, rel=1e-6)


def test_oracle_integrators_agree():
    explicit = radial_oracle(1.0, method="DOP853", rtol=1e-11)
    implicit = radial_oracle(1.0, method="Radau", rtol=1e-11)
    assert explicit.center_value == pytest.approx(implicit.center_value, abs=1e-8)


def test_oracle_eigenvalue_scales_with_radius():
    unit = radial_oracle(2.0, mode="eigen")
    wide = radial_oracle(2.0, mode="eigen", R=2.0)
    assert wide.lam == pytest.approx(unit.lam / 16.0, rel=1e-8)
    assert wide.center_value == -1.0


def test_oracle_rejects_bad_input():
    with pytest.raises(ConfigurationError):
        radial_oracle(1.0, mode="neumann")
    with pytest.raises(ConfigurationError):
        radial_oracle(1.0, R=0.0)


def test_oracle_has_no_q2_dirichlet_solution():
    with pytest.raises(OracleError):
        radial_oracle(2.0)


@pytest.mark.slow
def test_second_order_convergence_against_the_oracle():
    oracle = radial_oracle(1.0)
    errors = []
    for n_r in (32, 64, 128):
        solution = newton_solve(Domain2D(), 1.0, 1.0, n_r=n_r, n_theta=16)
        R = PolarMesh.create(n_r, 16).R
        errors.append(np.max(np.abs(solution.u.values - oracle.evaluate(R))))
    orders = np.log2(np.array(errors[:-1]) / np.array(errors[1:]))
    assert 1.6 <= float(np.mean(orders)) <= 2.4
