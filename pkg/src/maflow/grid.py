"""Periodic grids, node fields, and finite-difference operators.

The spatial domain is a flat torus of complex dimension n (real dimension
2n), discretized with m uniform nodes per real axis. Axis order is
(x_1, y_1, ..., x_n, y_n) with z_j = x_j + i*y_j. All stencils wrap
periodically, so there are no boundary cases anywhere.
"""

import struct

import numpy as np

MAGIC = b"MAF1"


class TorusGrid:
    """Uniform periodic grid on a real 2n-torus, n in {1, 2}.

    periods may be a scalar (same length every axis) or a sequence of
    length 2n. The spacing h used in tolerance formulas is the largest
    per-axis spacing.
    """

    def __init__(self, n, m, periods=None):
        if n not in (1, 2):
            raise ValueError(f"complex dimension must be 1 or 2, got {n}")
        m = int(m)
        if m < 8 or m % 2 != 0:
            raise ValueError(f"nodes per axis must be even and >= 8, got {m}")
        self.n = n
        self.m = m
        if periods is None:
            periods = (1.0,) * (2 * n)
        elif np.isscalar(periods):
            periods = (float(periods),) * (2 * n)
        else:
            periods = tuple(float(p) for p in periods)
            if len(periods) != 2 * n:
                raise ValueError(f"need {2 * n} periods, got {len(periods)}")
        if any(p <= 0.0 for p in periods):
            raise ValueError("periods must be positive")
        self.periods = periods
        self.spacings = tuple(p / m for p in periods)
        self.h = max(self.spacings)
        self.shape = (m,) * (2 * n)
        self.size = m ** (2 * n)

    def axis_coords(self, axis):
        """Node coordinates along one real axis, shaped for broadcasting."""
        x = np.arange(self.m) * self.spacings[axis]
        shape = [1] * (2 * self.n)
        shape[axis] = self.m
        return x.reshape(shape)

    def coords(self):
        """List of broadcastable coordinate arrays, one per real axis."""
        return [self.axis_coords(a) for a in range(2 * self.n)]

    def compatible(self, other):
        return (self.n == other.n and self.m == other.m
                and self.periods == other.periods)

    def __repr__(self):
        return f"TorusGrid(n={self.n}, m={self.m}, periods={self.periods})"


class ScalarField:
    """One real value per grid node."""

    def __init__(self, grid, values):
        values = np.ascontiguousarray(values, dtype=np.float64)
        if values.shape != grid.shape:
            raise ValueError(f"values shape {values.shape} does not match "
                             f"grid shape {grid.shape}")
        if not np.all(np.isfinite(values)):
            raise ValueError("field values must be finite")
        self.grid = grid
        self.values = values

    def copy(self):
        return ScalarField(self.grid, self.values.copy())


class HermitianField:
    """One n x n Hermitian matrix per grid node (complex coefficients)."""

    def __init__(self, grid, matrices):
        n = grid.n
        matrices = np.ascontiguousarray(matrices, dtype=np.complex128)
        if matrices.shape != grid.shape + (n, n):
            raise ValueError(f"matrices shape {matrices.shape} does not match "
                             f"grid shape {grid.shape} + ({n},{n})")
        herm_defect = np.max(np.abs(matrices - np.conj(np.swapaxes(matrices, -1, -2))))
        if herm_defect > 1e-12:
            raise ValueError(f"matrices not Hermitian, defect {herm_defect:.3e}")
        self.grid = grid
        self.matrices = matrices


def _require_same_grid(a, b):
    if not a.grid.compatible(b.grid):
        raise ValueError("fields live on different grids")


def _shift(values, axis, offset):
    # node i maps to i+offset (periodic); offset +1 reads the neighbor at +h
    return np.roll(values, -offset, axis=axis)


def second_difference(values, axis, inv_h2):
    """Central second difference along one axis, periodic wrap."""
    return (_shift(values, axis, 1) + _shift(values, axis, -1)
            - 2.0 * values) * inv_h2


def cross_difference(values, axis_a, axis_b, inv_4hh):
    """Central mixed second difference (four corner stencil)."""
    pp = _shift(_shift(values, axis_a, 1), axis_b, 1)
    pm = _shift(_shift(values, axis_a, 1), axis_b, -1)
    mp = _shift(_shift(values, axis_a, -1), axis_b, 1)
    mm = _shift(_shift(values, axis_a, -1), axis_b, -1)
    return (pp - pm - mp + mm) * inv_4hh


def laplacian5(field):
    """Five-point Laplacian of an n=1 field (axes x, y).

    Evaluation order is pinned: per-axis second differences are computed
    separately and then added, matching the fused solver kernels.
    """
    grid = field.grid
    if grid.n != 1:
        raise ValueError("laplacian5 is the n=1 stencil")
    hx, hy = grid.spacings
    v = field.values
    return (second_difference(v, 0, 1.0 / (hx * hx))
            + second_difference(v, 1, 1.0 / (hy * hy)))


def complex_hessian(field):
    """Discrete complex Hessian dd^c of a potential.

    Entry (j,k) approximates d^2/dz_j dz_bar_k via
    (1/4)[(d_{x_j x_k} + d_{y_j y_k}) + i(d_{x_j y_k} - d_{y_j x_k})]
    on central differences. The output is exactly Hermitian: entry (k,j)
    is set to the conjugate of entry (j,k). For n=1 the single entry is
    exactly one quarter of the five-point Laplacian.
    """
    grid = field.grid
    n = grid.n
    v = field.values
    sp = grid.spacings
    inv_h2 = [1.0 / (s * s) for s in sp]
    out = np.zeros(grid.shape + (n, n), dtype=np.complex128)
    if n == 1:
        out[..., 0, 0] = 0.25 * laplacian5(field)
    else:
        # real axes: x1=0, y1=1, x2=2, y2=3
        d11 = 0.25 * (second_difference(v, 0, inv_h2[0])
                      + second_difference(v, 1, inv_h2[1]))
        d22 = 0.25 * (second_difference(v, 2, inv_h2[2])
                      + second_difference(v, 3, inv_h2[3]))
        re12 = 0.25 * (cross_difference(v, 0, 2, 0.25 / (sp[0] * sp[2]))
                       + cross_difference(v, 1, 3, 0.25 / (sp[1] * sp[3])))
        im12 = 0.25 * (cross_difference(v, 0, 3, 0.25 / (sp[0] * sp[3]))
                       - cross_difference(v, 1, 2, 0.25 / (sp[1] * sp[2])))
        out[..., 0, 0] = d11
        out[..., 1, 1] = d22
        out[..., 0, 1] = re12 + 1j * im12
        out[..., 1, 0] = np.conj(out[..., 0, 1])
    return HermitianField(grid, out)


def sup_norm_diff(a, b):
    """Max over nodes of |a - b|."""
    _require_same_grid(a, b)
    return float(np.max(np.abs(a.values - b.values)))


def mean(a):
    """Grid average (uniform quadrature on the torus)."""
    return float(np.mean(a.values))


def mollify(a, bandwidth):
    """Periodic heat-kernel smoothing with variance bandwidth**2.

    Implemented as a Fourier multiplier exp(-(2 pi k / L)^2 s^2 / 2) per
    axis. bandwidth 0 returns the input unchanged; the mean (zero mode)
    is always preserved exactly.
    """
    if bandwidth < 0:
        raise ValueError("bandwidth must be nonnegative")
    if bandwidth == 0.0:
        return a.copy()
    grid = a.grid
    spec = np.fft.fftn(a.values)
    s2 = bandwidth * bandwidth
    for axis in range(2 * grid.n):
        freq = np.fft.fftfreq(grid.m, d=grid.spacings[axis])
        mult = np.exp(-0.5 * (2.0 * np.pi * freq) ** 2 * s2)
        shape = [1] * (2 * grid.n)
        shape[axis] = grid.m
        spec *= mult.reshape(shape)
    out = np.fft.ifftn(spec).real
    return ScalarField(grid, out)


def save_field(field, path):
    """Write a field snapshot: magic, u32 n, u32 m, f64 periods, f64 values."""
    grid = field.grid
    with open(path, "wb") as fh:
        fh.write(MAGIC)
        fh.write(struct.pack("<II", grid.n, grid.m))
        fh.write(struct.pack(f"<{2 * grid.n}d", *grid.periods))
        fh.write(field.values.astype("<f8").tobytes(order="C"))


def load_field(path):
    with open(path, "rb") as fh:
        magic = fh.read(4)
        if magic != MAGIC:
            raise ValueError(f"not a field snapshot (magic {magic!r})")
        n, m = struct.unpack("<II", fh.read(8))
        periods = struct.unpack(f"<{2 * n}d", fh.read(8 * 2 * n))
        grid = TorusGrid(n, m, periods)
        data = np.frombuffer(fh.read(8 * grid.size), dtype="<f8")
        if data.size != grid.size:
            raise ValueError("snapshot truncated")
        return ScalarField(grid, data.reshape(grid.shape).astype(np.float64))


def export_field_csv(field, path):
    """Plain CSV export: one row per node, index columns then the value."""
    grid = field.grid
    with open(path, "w", newline="") as fh:
        idx_names = ",".join(f"i{a}" for a in range(2 * grid.n))
        fh.write(idx_names + ",value\n")
        it = np.ndindex(grid.shape)
        flat = field.values.ravel()
        for k, idx in enumerate(it):
            fh.write(",".join(str(i) for i in idx) + f",{flat[k]:.17g}\n")
