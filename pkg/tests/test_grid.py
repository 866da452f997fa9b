"""Grid, stencil, mollifier, and snapshot-format tests."""

import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from maflow import grid as gridmod


def _wave(g, k=1, axis=0):
    x = g.axis_coords(axis)
    return np.broadcast_to(
        np.cos(2.0 * math.pi * k * x / g.periods[axis]),
        g.shape).copy()


def test_grid_validation():
    with pytest.raises(ValueError):
        gridmod.TorusGrid(3, 16)
    with pytest.raises(ValueError):
        gridmod.TorusGrid(1, 15)
    with pytest.raises(ValueError):
        gridmod.TorusGrid(1, 4)
    with pytest.raises(ValueError):
        gridmod.TorusGrid(1, 16, periods=(1.0,))
    with pytest.raises(ValueError):
        gridmod.TorusGrid(1, 16, periods=(1.0, -1.0))
    g = gridmod.TorusGrid(2, 12, periods=2.0)
    assert g.shape == (12, 12, 12, 12)
    assert g.periods == (2.0,) * 4
    assert g.h == pytest.approx(2.0 / 12)


def test_axis_coords_broadcast():
    g = gridmod.TorusGrid(2, 10)
    c = g.axis_coords(2)
    assert c.shape == (1, 1, 10, 1)
    assert c.max() == pytest.approx(0.9)


def test_scalar_field_checks():
    g = gridmod.TorusGrid(1, 16)
    with pytest.raises(ValueError):
        gridmod.ScalarField(g, np.zeros((16, 8)))
    bad = np.zeros(g.shape)
    bad[0, 0] = np.inf
    with pytest.raises(ValueError):
        gridmod.ScalarField(g, bad)


def test_second_difference_discrete_symbol():
    # discrete eigenvalue of cos mode k: -(4/h^2) sin^2(pi k h / L)
    g = gridmod.TorusGrid(1, 32)
    h = g.spacings[0]
    for k in (1, 3):
        v = _wave(g, k)
        got = gridmod.second_difference(v, 0, 1.0 / (h * h))
        lam = -4.0 / (h * h) * math.sin(math.pi * k * h) ** 2
        assert np.max(np.abs(got - lam * v)) < 1e-10


def test_hessian_n1_second_order_accuracy():
    # quarter-Laplacian of cos(2 pi x) converges to -pi^2 cos at O(h^2)
    errs = []
    for m in (16, 32, 64):
        g = gridmod.TorusGrid(1, m)
        f = gridmod.ScalarField(g, _wave(g))
        H = gridmod.complex_hessian(f)
        target = -math.pi ** 2 * _wave(g)
        errs.append(np.max(np.abs(H.matrices[..., 0, 0].real - target)))
    assert errs[0] / errs[1] == pytest.approx(4.0, rel=0.1)
    assert errs[1] / errs[2] == pytest.approx(4.0, rel=0.1)


def test_hessian_n1_is_quarter_laplacian_bitwise():
    rng = np.random.default_rng(3)
    g = gridmod.TorusGrid(1, 16)
    f = gridmod.ScalarField(g, rng.standard_normal(g.shape))
    H = gridmod.complex_hessian(f).matrices[..., 0, 0]
    assert np.array_equal(H.real, 0.25 * gridmod.laplacian5(f))
    assert np.all(H.imag == 0.0)


def test_hessian_n2_analytic():
    # phi = a cos(X1 + X2) has H11 = H22 = Re H12 = -pi^2 a cos(X1+X2)
    a = 0.1
    m = 24
    g = gridmod.TorusGrid(2, m)
    X1 = 2.0 * math.pi * g.axis_coords(0)
    X2 = 2.0 * math.pi * g.axis_coords(2)
    phi = np.broadcast_to(a * np.cos(X1 + X2), g.shape).copy()
    H = gridmod.complex_hessian(gridmod.ScalarField(g, phi)).matrices
    target = np.broadcast_to(-math.pi ** 2 * a * np.cos(X1 + X2), g.shape)
    tol = 40.0 * g.h * g.h  # second-order stencils, curvature ~ 4 pi^2 a
    for entry in (H[..., 0, 0].real, H[..., 1, 1].real, H[..., 0, 1].real):
        assert np.max(np.abs(entry - target)) < tol
    assert np.max(np.abs(H[..., 0, 1].imag)) < tol
    # Hermitian by construction
    assert np.array_equal(H[..., 1, 0], np.conj(H[..., 0, 1]))


def test_stencils_commute_with_translation():
    rng = np.random.default_rng(11)
    g = gridmod.TorusGrid(1, 16)
    v = rng.standard_normal(g.shape)
    f = gridmod.ScalarField(g, v)
    fs = gridmod.ScalarField(g, np.roll(v, 5, axis=0))
    a = np.roll(gridmod.laplacian5(f), 5, axis=0)
    b = gridmod.laplacian5(fs)
    assert np.array_equal(a, b)


def test_mollify_fourier_multiplier():
    # single mode k: exact damping factor exp(-2 pi^2 k^2 s^2)
    g = gridmod.TorusGrid(1, 32)
    s = 0.07
    f = gridmod.ScalarField(g, _wave(g, k=2))
    out = gridmod.mollify(f, s)
    factor = math.exp(-2.0 * math.pi ** 2 * (2.0 * s) ** 2)
    assert np.max(np.abs(out.values - factor * f.values)) < 1e-12


def test_mollify_mean_and_extremes():
    rng = np.random.default_rng(5)
    g = gridmod.TorusGrid(1, 16)
    f = gridmod.ScalarField(g, rng.standard_normal(g.shape))
    out = gridmod.mollify(f, 0.1)
    assert gridmod.mean(out) == pytest.approx(gridmod.mean(f), abs=1e-13)
    assert out.values.max() <= f.values.max() + 1e-12
    assert out.values.min() >= f.values.min() - 1e-12
    same = gridmod.mollify(f, 0.0)
    assert np.array_equal(same.values, f.values)
    assert same.values is not f.values
    with pytest.raises(ValueError):
        gridmod.mollify(f, -1.0)


def test_snapshot_roundtrip(tmp_path):
    rng = np.random.default_rng(7)
    g = gridmod.TorusGrid(1, 16, periods=(2.0, 3.0))
    f = gridmod.ScalarField(g, rng.standard_normal(g.shape))
    path = tmp_path / "phi.maf"
    gridmod.save_field(f, path)
    back = gridmod.load_field(path)
    assert back.grid.compatible(g)
    assert np.array_equal(back.values, f.values)


def test_snapshot_rejects_garbage(tmp_path):
    path = tmp_path / "bad.maf"
    path.write_bytes(b"NOPE" + b"\x00" * 64)
    with pytest.raises(ValueError, match="magic"):
        gridmod.load_field(path)
    good = tmp_path / "cut.maf"
    g = gridmod.TorusGrid(1, 16)
    gridmod.save_field(gridmod.ScalarField(g, np.zeros(g.shape)), good)
    good.write_bytes(good.read_bytes()[:-16])
    with pytest.raises(ValueError, match="truncated"):
        gridmod.load_field(good)


def test_csv_export(tmp_path):
    g = gridmod.TorusGrid(1, 8)
    f = gridmod.ScalarField(g, np.arange(64, dtype=float).reshape(g.shape))
    path = tmp_path / "f.csv"
    gridmod.export_field_csv(f, path)
    lines = path.read_text().splitlines()
    assert lines[0] == "i0,i1,value"
    assert len(lines) == 1 + g.size
    assert lines[1] == "0,0,0"


def test_sup_norm_requires_same_grid():
    a = gridmod.ScalarField(gridmod.TorusGrid(1, 16),
                            np.zeros((16, 16)))
    b = gridmod.ScalarField(gridmod.TorusGrid(1, 32),
                            np.zeros((32, 32)))
    with pytest.raises(ValueError):
        gridmod.sup_norm_diff(a, b)


@settings(max_examples=25, deadline=None)
@given(st.integers(min_value=4, max_value=12).map(lambda k: 2 * k),
       st.floats(min_value=0.0, max_value=0.2),
       st.integers(min_value=0, max_value=2 ** 31 - 1))
def test_mollify_max_principle_property(m, s, seed):
    rng = np.random.default_rng(seed)
    g = gridmod.TorusGrid(1, m)
    f = gridmod.ScalarField(g, rng.standard_normal(g.shape))
    out = gridmod.mollify(f, s)
    assert out.values.max() <= f.values.max() + 1e-11
    assert out.values.min() >= f.values.min() - 1e-11
    assert gridmod.mean(out) == pytest.approx(gridmod.mean(f), abs=1e-12)


@settings(max_examples=20, deadline=None)
@given(st.integers(min_value=0, max_value=2 ** 31 - 1))
def test_second_difference_annihilates_constants(seed):
    rng = np.random.default_rng(seed)
    g = gridmod.TorusGrid(1, 16)
    c = float(rng.uniform(-5, 5))
    v = np.full(g.shape, c)
    d = gridmod.second_difference(v, 0, 1.0 / (g.h * g.h))
    assert np.all(d == 0.0)
