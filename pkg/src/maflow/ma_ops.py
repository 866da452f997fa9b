"""The degenerate-elliptic complex Monge-Ampere operator.

Determinants of background-plus-Hessian matrices are taken through their
closed-form eigenvalues with negative eigenvalues clamped to zero, which
is what makes the operator degenerate elliptic. The flow right-hand side
is log of that clamped determinant minus log density minus forcing.
"""

import numpy as np

from . import _backend
from . import grid as gridmod


class MAEvaluation:
    """Positive-part determinant and the smallest eigenvalue per node."""

    def __init__(self, det_plus, min_eigenvalue):
        self.det_plus = det_plus
        self.min_eigenvalue = min_eigenvalue


def positive_part_det(H):
    """Clamp negative eigenvalues to zero, return the eigenvalue product.

    Eigenvalues come from the 1x1 entry (n=1) or the 2x2 Hermitian closed
    form (n=2); no general eigensolver. The pre-clamp minimum eigenvalue
    is returned alongside for degeneracy diagnostics.
    """
    g = H.grid
    M = H.matrices
    if g.n == 1:
        e = M[..., 0, 0].real.copy()
        det_plus = np.maximum(e, 0.0)
        min_eig = e
    else:
        a = M[..., 0, 0].real
        d = M[..., 1, 1].real
        b = M[..., 0, 1]
        tr = a + d
        df = a - d
        disc = np.sqrt(df * df + 4.0 * (b.real * b.real + b.imag * b.imag))
        lam1 = 0.5 * (tr + disc)
        lam2 = 0.5 * (tr - disc)
        det_plus = np.maximum(lam1, 0.0) * np.maximum(lam2, 0.0)
        min_eig = lam2
    return MAEvaluation(gridmod.ScalarField(g, det_plus),
                        gridmod.ScalarField(g, min_eig))


def background_plus_hessian(phi, omega):
    """omega + dd^c phi as a HermitianField.

    omega may be a HermitianField on the same grid or a single n x n
    matrix applied at every node.
    """
    H = gridmod.complex_hessian(phi)
    if isinstance(omega, gridmod.HermitianField):
        M = H.matrices + omega.matrices
    else:
        M = H.matrices + np.asarray(omega, dtype=np.complex128)
    return gridmod.HermitianField(phi.grid, M)


def _log_floor(vals, floor):
    if np.isscalar(vals):
        return float(np.log(max(vals, floor)))
    return np.log(np.maximum(vals, floor))


class RhsEvaluator:
    """Cached per-problem preprocessing for fast rhs evaluation.

    Splits the density into a cached log part plus a scalar time shift
    where the floor clamp provably never activates, maps linear forcing
    to the kernel coefficient, and evaluates tabulated forcing per call.
    """

    def __init__(self, problem, det_floor=1e-12, mu_floor=1e-12):
        self.problem = problem
        self.grid = problem.phi0.grid
        self.det_floor = float(det_floor)
        self.mu_floor = float(mu_floor)
        self.ih = [1.0 / s for s in self.grid.spacings]
        self.ih2 = [x * x for x in self.ih]
        mu = problem.mu
        self._logmu_cache = None
        self._base_cache = None
        self._logbase_cache = None
        self._base_min = None
        if not mu.time_dependent:
            base = mu.base_values(0.0, self.grid)
            if mu.scale is None:
                self._logmu_cache = _log_floor(base, self.mu_floor)
            else:
                self._base_cache = base
                self._base_min = (float(base) if np.isscalar(base)
                                  else float(np.min(base)))
        F = problem.forcing
        self._linear = F.kind == "linear"
        self._alpha = float(F.alpha) if self._linear else 0.0

    def logmu_at(self, t):
        """Return (log density with floor, scalar shift) at time t."""
        mu = self.problem.mu
        if self._logmu_cache is not None:
            return self._logmu_cache, 0.0
        if self._base_cache is not None:
            s = mu.scale_value(t)
            if self._base_min * s > self.mu_floor:
                # floor cannot activate, log factorizes exactly
                if self._logbase_cache is None:
                    self._logbase_cache = (np.log(self._base_cache)
                                           if not np.isscalar(self._base_cache)
                                           else float(np.log(self._base_cache)))
                return self._logbase_cache, float(np.log(s))
            return _log_floor(self._base_cache * s, self.mu_floor), 0.0
        vals = mu.values_at(t, self.grid)
        return _log_floor(vals, self.mu_floor), 0.0

    def __call__(self, phi_values, t, out):
        """Write rhs(phi, t) into out.

        Returns (min_eig, max_abs_rhs, sum_rhs, floor_hits) where min_eig
        is the pre-clamp minimum eigenvalue of background plus Hessian
        over all nodes.
        """
        p = self.problem
        logmu, c0 = self.logmu_at(t)
        gg = None
        if not self._linear:
            gg = np.ascontiguousarray(
                p.forcing.values(t, self.grid, phi_values), dtype=np.float64)
        comps = p.family.components_at(t, self.grid)
        if self.grid.n == 1:
            return _backend.rhs_n1(phi_values, comps, logmu, gg,
                                   self._alpha, c0, self.ih2,
                                   self.det_floor, out)
        w11, w22, wbr, wbi = comps
        return _backend.rhs_n2(phi_values, w11, w22, wbr, wbi, logmu, gg,
                               self._alpha, c0, self.ih, self.det_floor, out)


def flow_rhs(phi, t, problem, config=None):
    """Flow right-hand side log det_+(omega_t + dd^c phi) - log mu - F.

    Both logs are clamped from below (det_floor, mu_floor); the number of
    determinant floor activations is attached to the result as floor_hits
    together with min_eig and max_abs_rhs.
    """
    det_floor = getattr(config, "det_floor", 1e-12) if config else 1e-12
    mu_floor = getattr(config, "mu_floor", 1e-12) if config else 1e-12
    ev = RhsEvaluator(problem, det_floor, mu_floor)
    out = np.empty_like(phi.values)
    min_eig, max_abs, _, hits = ev(phi.values, t, out)
    field = gridmod.ScalarField(phi.grid, out)
    field.min_eig = min_eig
    field.max_abs_rhs = max_abs
    field.floor_hits = hits
    return field
