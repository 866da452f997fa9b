"""Compiled and numpy stepping kernels must agree to rounding."""

import os
import subprocess
import sys

import numpy as np
import pytest

from maflow import _backend
from maflow import _kernels_np

try:
    from maflow import _core
except ImportError:
    _core = None

needs_core = pytest.mark.skipif(_core is None,
                                reason="compiled backend not built")


def _n1_data(m, seed):
    rng = np.random.default_rng(seed)
    shape = (m, m)
    phi = 0.05 * rng.standard_normal(shape)
    w = 1.0 + 0.2 * rng.random(shape)
    logmu = 0.3 * rng.standard_normal(shape)
    g = 0.1 * rng.standard_normal(shape)
    h = 1.0 / m
    ih2 = np.array([1.0 / (h * h)] * 2)
    return (np.ascontiguousarray(phi), np.ascontiguousarray(w),
            np.ascontiguousarray(logmu), np.ascontiguousarray(g),
            0.7, 0.05, ih2, 1e-12)


def _n2_data(m, seed):
    rng = np.random.default_rng(seed)
    shape = (m, m, m, m)
    phi = 0.02 * rng.standard_normal(shape)
    w11 = 1.0 + 0.2 * rng.random(shape)
    w22 = 1.0 + 0.2 * rng.random(shape)
    wbr = 0.05 * rng.standard_normal(shape)
    wbi = 0.05 * rng.standard_normal(shape)
    logmu = 0.3 * rng.standard_normal(shape)
    g = 0.1 * rng.standard_normal(shape)
    h = 1.0 / m
    ih = np.array([1.0 / h] * 4)
    return tuple(np.ascontiguousarray(a) for a in
                 (phi, w11, w22, wbr, wbi, logmu, g)) + \
        (0.7, 0.05, ih, 1e-12)


def _compare(a_impl, b_impl, args, shape):
    out_a = np.empty(shape)
    out_b = np.empty(shape)
    fn = "rhs_n1" if len(shape) == 2 else "rhs_n2"
    ra = getattr(a_impl, fn)(*args, out_a)
    rb = getattr(b_impl, fn)(*args, out_b)
    min_a, max_a, sum_a, hits_a = ra
    min_b, max_b, sum_b, hits_b = rb
    assert min_a == pytest.approx(min_b, rel=1e-9, abs=1e-12)
    assert max_a == pytest.approx(max_b, rel=1e-9, abs=1e-12)
    assert sum_a == pytest.approx(sum_b, rel=1e-9, abs=1e-9)
    assert hits_a == hits_b
    assert float(np.max(np.abs(out_a - out_b))) <= 1e-9


@needs_core
@pytest.mark.parametrize("seed", [0, 1, 2])
def test_n1_kernels_agree(seed):
    args = _n1_data(32, seed)
    _compare(_kernels_np, _core, args, (32, 32))


@needs_core
@pytest.mark.parametrize("seed", [0, 1])
def test_n2_kernels_agree(seed):
    args = _n2_data(8, seed)
    _compare(_kernels_np, _core, args, (8, 8, 8, 8))


@needs_core
def test_n1_floor_hits_agree_when_active():
    # drive some nodes under the determinant floor
    args = list(_n1_data(16, 3))
    args[0] = np.ascontiguousarray(args[0] * 40.0)
    out_a = np.empty((16, 16))
    out_b = np.empty((16, 16))
    ra = _kernels_np.rhs_n1(*args, out_a)
    rb = _core.rhs_n1(*args, out_b)
    assert ra[3] == rb[3]
    assert ra[3] > 0


def test_backend_name_is_consistent():
    assert _backend.BACKEND in ("python", "compiled")
    if _backend.BACKEND == "compiled":
        assert _core is not None
        assert _backend.rhs_n1 is _core.rhs_n1
    else:
        assert _backend.rhs_n1 is _kernels_np.rhs_n1


def test_bogus_backend_env_rejected():
    env = dict(os.environ, MAFLOW_BACKEND="bogus")
    proc = subprocess.run([sys.executable, "-c", "import maflow"],
                          env=env, capture_output=True, text=True)
    assert proc.returncode != 0
    assert "MAFLOW_BACKEND" in proc.stderr


def test_python_backend_env_honored():
    env = dict(os.environ, MAFLOW_BACKEND="python")
    code = ("from maflow import _backend; "
            "print(_backend.BACKEND)")
    proc = subprocess.run([sys.executable, "-c", code],
                          env=env, capture_output=True, text=True)
    assert proc.returncode == 0
    assert proc.stdout.strip() == "python"
