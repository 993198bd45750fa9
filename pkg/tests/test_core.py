import os

import numpy as np
import pytest

from src.core.calculus import (
    StripCalculus,
    chebyshev_derivative,
    dft_horizontal,
    differentiate,
    horizontal_derivative,
    idft_horizontal,
    l2_norm,
    multi_indices,
    quadrature_weights,
    sobolev_norm,
    vertical_derivative,
)
from src.core.domain import Domain2D
from src.core.errors import (
    ConfigurationError,
    DegmaError,
    DomainError,
    InputError,
    PersistenceError,
    UnsupportedOrderError,
)
from src.core.fields import BoundaryTrace, GridFunction, StripField
from src.core.interpolation import GridInterpolant
from src.core.parallel import THREADS_ENV, ordered_map, resolve_workers
from src.core.persistence import (
    atomic_write_bytes,
    decode_dump,
    encode_dump,
    export_field_csv,
    read_field,
    read_json,
    write_csv,
    write_field,
    write_json,
)
from src.core.polar import PolarMesh
from src.transforms.patch import PatchField


def test_dft_normalization():
    field = StripField.from_function(lambda x1, xn: np.cos(x1) + 2.0, 16, 8)
    spectrum = dft_horizontal(field)
    assert np.allclose(spectrum.coefficients[:, 0], 2.0)
    assert np.allclose(spectrum.coefficients[:, 1], 0.5)
    assert np.allclose(spectrum.coefficients[:, -1], 0.5)
    assert spectrum.integer_modes[1] == 1
    assert np.allclose(idft_horizontal(spectrum).values, field.values)


def test_dft_requires_power_of_two():
    field = StripField(np.zeros((5, 12)))
    with pytest.raises(ConfigurationError):
        dft_horizontal(field)


def test_strip_field_rejects_non_finite():
    values = np.zeros((5, 8))
    values[2, 3] = np.nan
    with pytest.raises(DomainError):
        StripField(values)


@pytest.mark.parametrize("period", [2 * np.pi, 1.0])
def test_horizontal_derivative_is_spectral(period):
    x1 = np.arange(32) * period / 32
    k = 2 * np.pi / period
    values = np.sin(3 * k * x1)[None, :]
    d1 = horizontal_derivative(values, 1, period)
    d2 = horizontal_derivative(values, 2, period)
    assert np.allclose(d1[0], 3 * k * np.cos(3 * k * x1), atol=1e-10)
    assert np.allclose(d2[0], -9 * k ** 2 * np.sin(3 * k * x1), atol=1e-9)


def test_vertical_fd_exact_on_low_degree():
    xn = np.linspace(0.0, 1.0, 17)[:, None]
    square = np.repeat(xn ** 2, 4, axis=1)
    cube = np.repeat(xn ** 3, 4, axis=1)
    assert np.allclose(vertical_derivative(square, 1), 2 * xn * np.ones((1, 4)), atol=1e-10)
    assert np.allclose(vertical_derivative(cube, 2), 6 * xn * np.ones((1, 4)), atol=1e-8)


def test_vertical_fd_order_limit():
    field = StripField(np.zeros((17, 8)))
    with pytest.raises(UnsupportedOrderError):
        differentiate(field, (0, 5))


def test_chebyshev_derivative_high_order():
    xn = np.linspace(0.0, 1.0, 65)
    d3 = chebyshev_derivative(np.sin(xn), xn, 3, degree=12)
    assert np.max(np.abs(d3 + np.cos(xn))) < 1e-6


def test_multi_indices():
    assert multi_indices(2) == [(0, 2), (1, 1), (2, 0)]
    assert multi_indices(0) == [(0, 0)]


def test_quadrature_weights_simpson():
    w = quadrature_weights(5, 0.25)
    x = np.linspace(0.0, 1.0, 5)
    assert np.isclose(np.sum(w * x ** 3), 0.25)
    assert np.isclose(np.sum(quadrature_weights(4, 1.0 / 3)), 1.0)


def test_l2_norm_of_linear_profile():
    field = StripField.from_function(lambda x1, xn: xn, 8, 64)
    assert np.isclose(l2_norm(field), np.sqrt(2 * np.pi / 3), rtol=1e-12)


def test_trace_sobolev_norm():
    trace = BoundaryTrace.from_function(np.sin, 16)
    assert np.isclose(sobolev_norm(trace, 0), np.sqrt(np.pi))
    assert np.isclose(sobolev_norm(trace, 1), np.sqrt(2 * np.pi))
    with pytest.raises(ConfigurationError):
        sobolev_norm(trace, 7)


def test_strip_calculus_rejects_unknown_backend():
    with pytest.raises(ConfigurationError):
        StripCalculus((9, 8), 2 * np.pi, "spline")


def test_parseval_on_random_fields(rng):
    field = StripField(rng.standard_normal((9, 32)))
    spectrum = dft_horizontal(field)
    energy = np.sum(np.abs(spectrum.coefficients) ** 2, axis=1)
    assert np.allclose(energy, np.mean(field.values ** 2, axis=1), rtol=1e-12)
    trace = BoundaryTrace(field.values[0])
    expected = np.sqrt(trace.period / trace.modes * np.sum(trace.values ** 2))
    assert sobolev_norm(trace, 0) == pytest.approx(expected, rel=1e-12)


@pytest.mark.parametrize("vertical", ["fd", "chebyshev"])
@pytest.mark.parametrize("alpha", [(1, 0), (0, 2), (2, 1), (3, 3)])
def test_differentiate_is_linear(rng, vertical, alpha):
    f = StripField(rng.standard_normal((17, 16)))
    g = StripField(rng.standard_normal((17, 16)))
    combined = differentiate(f * 2.5 + g * -0.75, alpha, vertical)
    separate = differentiate(f, alpha, vertical).values * 2.5 - 0.75 * differentiate(g, alpha, vertical).values
    assert np.allclose(combined.values, separate, rtol=1e-10, atol=1e-8 * np.max(np.abs(separate)))


@pytest.mark.parametrize("s", [0, 1, 2, 3])
def test_sobolev_norm_triangle_inequality(rng, s):
    f = StripField(rng.standard_normal((17, 16)))
    g = StripField(rng.standard_normal((17, 16)))
    assert sobolev_norm(f + g, s) <= (sobolev_norm(f, s) + sobolev_norm(g, s)) * (1 + 1e-12)
    a = BoundaryTrace(f.values[0])
    b = BoundaryTrace(g.values[0])
    assert sobolev_norm(a + b, s) <= (sobolev_norm(a, s) + sobolev_norm(b, s)) * (1 + 1e-12)


def test_domain_geometry():
    disc = Domain2D.from_axes(2.0, 2.0)
    ellipse = Domain2D.from_axes(2.0, 1.0)
    assert disc.kind == "disc"
    assert ellipse.kind == "ellipse"
    assert np.isclose(disc.curvature(0.7), 0.5)
    assert np.isclose(ellipse.curvature(0.0), 2.0)
    assert np.allclose(Domain2D().inward_normal(0.0), [-1.0, 0.0])
    assert np.allclose(Domain2D().boundary_tangent(0.0), [0.0, 1.0])
    assert ellipse.lambda_factor == 4.0
    assert Domain2D.from_dict(ellipse.to_dict()) == ellipse


def test_domain_rejects_bad_axes():
    with pytest.raises(ConfigurationError):
        Domain2D("disc", 1.0, 2.0)
    with pytest.raises(ConfigurationError):
        Domain2D("ellipse", -1.0, 2.0)


def test_polar_mesh_quadrature_and_hessian():
    mesh = PolarMesh.create(24, 16)
    assert np.isclose(mesh.dr, 1.0 / 23.5)
    assert np.isclose(mesh.integrate(np.ones(mesh.shape)), np.pi, rtol=1e-12)
    U = (mesh.R ** 2 - 1.0) / 2.0
    H = mesh.hessian(U)
    interior = mesh.interior_mask
    assert np.allclose(H.det[interior], 1.0, atol=1e-9)
    g_r, g_t = mesh.gradient(U)
    assert np.allclose(g_r[interior], mesh.R[interior], atol=1e-10)
    assert np.allclose(g_t, 0.0, atol=1e-10)


@pytest.mark.parametrize("shape", [(7, 16), (16, 15)])
def test_polar_mesh_rejects_small_or_odd(shape):
    with pytest.raises(ConfigurationError):
        PolarMesh(*shape)


def test_grid_function_center_value(paraboloid):
    assert np.isclose(paraboloid.center_value(), -0.5, atol=1e-12)
    assert paraboloid.sup_norm() <= 0.5


@pytest.mark.parametrize("axes", [(1.0, 1.0), (1.5, 0.75)])
def test_interpolant_reproduces_quadratics(axes):
    a, b = axes
    domain = Domain2D.from_axes(a, b)
    u = GridFunction.from_function(domain, 24, 32, lambda x, y: x ** 2 / a ** 2 + y ** 2 / b ** 2 - 1.0)
    spline = GridInterpolant(u)
    x, y = 0.3 * a, -0.4 * b
    assert np.isclose(spline(x, y), -0.75, atol=1e-10)
    gx, gy = spline.gradient(x, y)
    assert np.isclose(gx, 2 * x / a ** 2, atol=1e-8)
    assert np.isclose(gy, 2 * y / b ** 2, atol=1e-8)
    assert np.isclose(spline(a, 0.0), 0.0, atol=1e-10)


def test_dump_round_trips(tmp_path, disc):
    strip = StripField.from_function(lambda x1, xn: np.sin(x1) * xn, 8, 4, period=3.0)
    back = read_field(write_field(tmp_path / "strip.dgma", strip))
    assert isinstance(back, StripField)
    assert back.period == 3.0
    assert np.array_equal(back.values, strip.values)

    grid = GridFunction.from_function(Domain2D.from_axes(1.2, 0.8), 8, 8, lambda x, y: x * y)
    grid.metadata["q"] = 1.0
    back = read_field(write_field(tmp_path / "grid.dgma", grid))
    assert back.domain == grid.domain
    assert back.metadata == {"q": 1.0}
    assert np.array_equal(back.values, grid.values)

    patch = PatchField(np.linspace(-1, 1, 5), np.linspace(0, 1, 3), np.ones((3, 5)), "v", 0.5)
    back = read_field(write_field(tmp_path / "patch.dgma", patch))
    assert back.kind == "v"
    assert back.delta == 0.5
    assert back.frame is None


def test_dump_header_checks():
    data = encode_dump(1, np.zeros((2, 3)))
    kind, values = decode_dump(data)
    assert kind == 1 and values.shape == (2, 3)
    with pytest.raises(InputError):
        decode_dump(b"NOPE" + data[4:])
    with pytest.raises(InputError):
        decode_dump(data[:-8])
    with pytest.raises(InputError):
        decode_dump(b"DG")


def test_read_missing_file(tmp_path):
    with pytest.raises(InputError) as info:
        read_field(tmp_path / "absent.dgma")
    assert info.value.to_dict()["error"] == "missing-input"
    with pytest.raises(InputError):
        read_json(tmp_path / "absent.json")


def test_atomic_write_leaves_only_target(tmp_path):
    target = tmp_path / "nested" / "out.bin"
    atomic_write_bytes(target, b"first")
    atomic_write_bytes(target, b"second")
    assert target.read_bytes() == b"second"
    assert os.listdir(target.parent) == ["out.bin"]


def test_write_under_a_file_raises_persistence_error(tmp_path):
    blocker = tmp_path / "blocker"
    blocker.write_bytes(b"x")
    with pytest.raises(PersistenceError) as info:
        atomic_write_bytes(blocker / "out.bin", b"data")
    assert info.value.exit_code == 23
    assert info.value.to_dict()["details"]["path"] == str(blocker)
    with pytest.raises(PersistenceError):
        write_json(blocker / "meta.json", {"a": 1})
    assert blocker.read_bytes() == b"x"


def test_csv_and_json_formatting(tmp_path):
    path = write_csv(tmp_path / "t.csv", ["a", "b", "c"], [[1, 0.1, True], [2, np.float64(2.5), False]])
    assert path.read_text() == "a,b,c\n1,0.1,true\n2,2.5,false\n"
    write_json(tmp_path / "t.json", {"b": 1, "a": [1, 2]})
    assert (tmp_path / "t.json").read_text().startswith('{\n    "a"')


def test_export_field_csv(tmp_path):
    field = StripField.from_function(lambda x1, xn: xn, 4, 2)
    lines = export_field_csv(tmp_path / "f.csv", field).read_text().splitlines()
    assert lines[0] == "i,j,x1,xn,value"
    assert len(lines) == 1 + 3 * 4
    assert lines[-1].split(",")[:2] == ["2", "3"]


def test_error_report_shape():
    error = UnsupportedOrderError("too deep", {"order": 5})
    assert isinstance(error, DegmaError)
    assert error.to_dict() == {
        "error": "unsupported-order",
        "exit_code": 3,
        "message": "too deep",
        "details": {"order": 5},
    }


def test_resolve_workers(monkeypatch):
    monkeypatch.delenv(THREADS_ENV, raising=False)
    assert resolve_workers(5) == 5
    assert resolve_workers() >= 1
    monkeypatch.setenv(THREADS_ENV, "3")
    assert resolve_workers(8) == 3
    monkeypatch.setenv(THREADS_ENV, "many")
    assert resolve_workers(2) == 2


@pytest.mark.parametrize("value", ["many", "0", "-2"])
def test_invalid_thread_variable_is_reported(monkeypatch, caplog, value):
    monkeypatch.setenv(THREADS_ENV, value)
    with caplog.at_level("WARNING", logger="src.core.parallel"):
        assert resolve_workers(2) == 2
    assert THREADS_ENV in caplog.text
    assert repr(value) in caplog.text


@pytest.mark.parametrize("workers", [1, 4])
def test_ordered_map_keeps_order(workers):
    assert ordered_map(lambda x: x * x, range(20), workers) == [x * x for x in range(20)]
