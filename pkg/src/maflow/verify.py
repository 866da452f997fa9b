"""Barrier constructions and discrete certificate checking.

A certificate evaluates, per node and sampled time, the residual

    det_+(omega_t + dd^c phi_t) - e^{d phi/dt + F(t, x, phi_t)} mu(t, x)

A subsolution needs the residual >= -tol everywhere, a supersolution
<= +tol. Nodes where the density sits below mu_floor are excluded from
supersolution verdicts and reported separately (no finite certificate
can hold where mu vanishes but det_+ does not).
"""

import math

import numpy as np

from . import grid as gridmod
from . import background as bgmod
from . import ma_ops
from . import parabolic
from . import elliptic


class CertificateReport:
    """Worst residual of a sub/supersolution check at one tolerance."""

    def __init__(self, kind, worst_residual, worst_node, worst_time,
                 passed, tol, excluded_nodes=0, excluded_worst=None,
                 notes=""):
        self.kind = kind
        self.worst_residual = worst_residual
        self.worst_node = worst_node
        self.worst_time = worst_time
        self.passed = passed
        self.tol = tol
        self.excluded_nodes = excluded_nodes
        self.excluded_worst = excluded_worst
        self.notes = notes

    def csv_row(self, problem_id):
        return [problem_id, self.kind, "%.17g" % self.worst_residual,
                "%r" % (self.worst_node,), str(bool(self.passed))]


class AffineBarrier:
    """base + t * rate; rate may be a scalar or a per-node array."""

    def __init__(self, grid, base, rate):
        self.grid = grid
        if hasattr(base, "values"):
            base = base.values
        self.base = np.ascontiguousarray(base, dtype=np.float64)
        if self.base.shape != grid.shape:
            raise ValueError("base shape %r does not match grid"
                             % (self.base.shape,))
        self.rate = (float(rate) if np.isscalar(rate)
                     else np.ascontiguousarray(rate, dtype=np.float64))

    def field_at(self, t):
        return gridmod.ScalarField(self.grid, self.base + t * self.rate)

    def dfield_dt(self, t):
        return self.rate


class FunctionBarrier:
    """Closed-form time-dependent field fn(t) with derivative dfn(t)."""

    def __init__(self, grid, fn, dfn):
        self.grid = grid
        self.fn = fn
        self.dfn = dfn

    def field_at(self, t):
        return gridmod.ScalarField(
            self.grid, np.ascontiguousarray(self.fn(t), dtype=np.float64))

    def dfield_dt(self, t):
        return self.dfn(t)


def _default_times(T, count=16):
    return list(np.linspace(0.0, T, count + 1)[1:])


def _residual_at(problem, t, phi_values, dphi_values):
    grid = problem.grid
    field = gridmod.ScalarField(grid,
                                np.ascontiguousarray(phi_values,
                                                     dtype=np.float64))
    omega = problem.family.omega_at(t, grid)
    det_plus = ma_ops.positive_part_det(
        ma_ops.background_plus_hessian(field, omega)).det_plus.values
    Fv = problem.forcing.values(t, grid, field.values)
    mu = problem.mu.values_at(t, grid)
    return det_plus - np.exp(dphi_values + Fv) * mu, mu


def _samples(candidate, problem, times):
    """Yield (t, phi values, d phi/dt values) for a barrier or trajectory."""
    if isinstance(candidate, parabolic.Trajectory):
        if len(candidate.snapshots) < 2:
            raise ValueError("need at least two snapshots for a "
                             "finite-difference time derivative")
        for i in range(len(candidate.snapshots) - 1):
            t0, t1 = candidate.times[i], candidate.times[i + 1]
            if t1 - t0 <= 0:
                continue
            a = candidate.snapshots[i].values
            b = candidate.snapshots[i + 1].values
            yield (0.5 * (t0 + t1), 0.5 * (a + b), (b - a) / (t1 - t0))
    else:
        if times is None:
            times = _default_times(problem.T)
        for t in times:
            yield (t, candidate.field_at(t).values, candidate.dfield_dt(t))


def check_subsolution(candidate, problem, tol, times=None):
    """Minimum residual over sampled times; passes when >= -tol."""
    worst = math.inf
    node = None
    when = None
    for t, phi, dphi in _samples(candidate, problem, times):
        R, _ = _residual_at(problem, t, phi, dphi)
        i = int(np.argmin(R))
        if R.flat[i] < worst:
            worst = float(R.flat[i])
            node = tuple(int(k) for k in np.unravel_index(i, R.shape))
            when = t
    return CertificateReport("subsolution", worst, node, when,
                             worst >= -tol, tol)


def check_supersolution(candidate, problem, tol, times=None,
                        mu_floor=1e-12):
    """Maximum residual over sampled times; passes when <= +tol.

    Nodes with density below mu_floor are excluded from the verdict;
    their count and worst residual are reported on the side.
    """
    worst = -math.inf
    node = None
    when = None
    excluded = 0
    excluded_worst = None
    for t, phi, dphi in _samples(candidate, problem, times):
        R, mu = _residual_at(problem, t, phi, dphi)
        if not np.isscalar(mu):
            bad = mu < mu_floor
            nbad = int(np.count_nonzero(bad))
            if nbad:
                excluded += nbad
                eb = float(np.max(R[bad]))
                if excluded_worst is None or eb > excluded_worst:
                    excluded_worst = eb
                R = np.where(bad, -math.inf, R)
        i = int(np.argmax(R))
        if R.flat[i] > worst:
            worst = float(R.flat[i])
            node = tuple(int(k) for k in np.unravel_index(i, R.shape))
            when = t
    return CertificateReport("supersolution", worst, node, when,
                             worst <= tol, tol,
                             excluded_nodes=excluded,
                             excluded_worst=excluded_worst)


def _family_lower_scalar(family, T, grid=None):
    """A scalar m with m I <= omega_t for sampled t (and nodes)."""
    m = math.inf
    for t in bgmod._time_samples(T, 64):
        comps = bgmod._sampled_components(family, t,
                                          grid if family.perturbation
                                          is not None else None)
        if family.n == 1:
            m = min(m, float(np.min(np.asarray(comps))))
        else:
            w11, w22, wbr, wbi = [np.asarray(c, dtype=float) for c in comps]
            tr = w11 + w22
            df = w11 - w22
            disc = np.sqrt(df * df + 4.0 * (wbr * wbr + wbi * wbi))
            m = min(m, float(np.min(0.5 * (tr - disc))))
    return m


def _log_safe(det_plus, floor=1e-12):
    return np.log(np.maximum(det_plus, floor))


def _det_plus_from(problem, t, hess_matrices):
    grid = problem.grid
    omega = problem.family.omega_at(t, grid)
    M = omega.matrices + hess_matrices
    H = gridmod.HermitianField(grid, M)
    return ma_ops.positive_part_det(H).det_plus.values


def build_subbarrier(phi0, problem, eps, eta=None, tol=None,
                     static_tol=1e-3, report_times=None):
    """Barrier u = phi0 + eta (w - phi0) - C t below the Cauchy solution.

    w comes from a static solve on the uniform lower bound form of the
    family against a dominating density, shifted so that w <= phi0
    nodewise; C is the smallest sampled drift making the discrete
    subsolution inequality hold. Guarantees phi0 - eps <= u(0) <= phi0
    at the bit level. Returns (barrier, certificate report).
    """
    grid = problem.grid
    T = problem.T
    if eps < 0.0:
        raise ValueError("eps must be nonnegative")
    if tol is None:
        tol = 10.0 * grid.h * grid.h

    theta_scale = _family_lower_scalar(problem.family, T, grid)
    if theta_scale <= 0.0:
        raise ValueError("family has no positive uniform lower bound")
    theta = theta_scale * (1.0 - 1e-9) * np.eye(grid.n)

    # dominating static density, floored away from zero so the
    # pseudo-time solve stays smooth
    if problem.mu.time_dependent or problem.mu.scale is not None:
        stack = [np.asarray(problem.mu.values_at(t, grid), dtype=float)
                 * np.ones(grid.shape)
                 for t in np.linspace(0.0, T, 17)]
        mu_bar = np.max(np.stack(stack), axis=0) * (1.0 + 1e-6)
    else:
        mu_bar = (np.asarray(problem.mu.values_at(0.0, grid), dtype=float)
                  * np.ones(grid.shape))
    # raising the density only strengthens the inequality the static
    # field satisfies, and it keeps the pseudo-time step size usable
    # when the true density vanishes
    floor0 = max(0.25 * float(np.max(mu_bar)), 1e-8)
    mu_static = parabolic.DensitySpec(
        kind="positive", f=np.maximum(mu_bar, floor0))

    sp = elliptic.StaticProblem(theta, mu_static, alpha=1.0, grid=grid)
    cfg = elliptic.default_static_config(grid, stationarity_tol=static_tol)
    w = elliptic.solve_static(sp, config=cfg)
    wv = w.values - 2.0 * static_tol
    for _ in range(8):
        d = float(np.max(wv - phi0.values))
        if d <= 0.0:
            break
        wv = wv - (d + 1e-15)
    wv = np.minimum(wv, phi0.values)

    s = float(np.max(phi0.values - wv))
    if eta is None:
        if s <= 0.0:
            eta = 0.5
        else:
            if eps <= 0.0:
                raise ValueError("eps=0 requires phi0 itself to dominate "
                                 "the static barrier (sup gap %g)" % s)
            eta = min(0.9, (eps / s) * (1.0 - 1e-12))
    if not (0.0 < eta < 1.0):
        raise ValueError("eta must lie in (0, 1), got %g" % eta)
    if eta * s > eps and eps > 0.0:
        raise ValueError("eta sup(phi0 - w) = %g exceeds eps" % (eta * s))

    u0 = phi0.values + eta * (wv - phi0.values)
    u0 = np.minimum(u0, phi0.values)
    if eps > 0.0:
        u0 = np.maximum(u0, phi0.values - eps)

    hess = gridmod.complex_hessian(gridmod.ScalarField(grid, u0)).matrices
    C = 0.0
    for t in _default_times(T):
        det_plus = _det_plus_from(problem, t, hess)
        mu = np.asarray(problem.mu.values_at(t, grid), dtype=float) \
            * np.ones(grid.shape)
        Fv = problem.forcing.values(t, grid, u0)
        pos = mu > 0.0
        if np.any(pos):
            need = (np.log(mu[pos]) - _log_safe(det_plus[pos])
                    + np.asarray(Fv * np.ones(grid.shape))[pos])
            C = max(C, float(np.max(need)))

    barrier = AffineBarrier(grid, u0, -C)
    report = check_subsolution(barrier, problem, tol, times=report_times)
    report.eta = eta
    report.drift = C
    report.boundary_below_ok = bool(np.all(u0 <= phi0.values))
    report.boundary_close_ok = bool(np.all(u0 >= phi0.values - eps))
    return barrier, report


def build_superbarrier(phi0, problem, eps, bandwidth=None, tol=None,
                       tol_psh=1e-8, report_times=None, mu_floor=1e-12):
    """Barrier v = smoothed-lifted phi0 + t * rate above the solution.

    The initial field is a mollification of phi0 lifted by eps/2 so that
    phi0 <= v(0) <= phi0 + eps at the bit level. For positive densities
    the rate is one constant C; for canonical densities the weight
    cancellation rate C - log e_u (floored) is used, and nodes where the
    density vanishes are excluded from the verdict (reported).
    Returns (barrier, certificate report).
    """
    grid = problem.grid
    T = problem.T
    if problem.mu.kind == "open_vanishing":
        raise ValueError("no superbarrier construction for open-vanishing "
                         "densities")
    if eps < 0.0:
        raise ValueError("eps must be nonnegative")
    if tol is None:
        tol = 10.0 * grid.h * grid.h

    notes = []
    if eps == 0.0 or bandwidth == 0.0:
        smooth = phi0.values.copy()
        bw = 0.0
    else:
        candidates = ([bandwidth] if bandwidth is not None
                      else [4.0 * grid.h, 2.0 * grid.h, grid.h,
                            0.5 * grid.h, 0.0])
        bw = candidates[-1]
        smooth = phi0.values.copy()
        found = False
        for cand in candidates:
            m = gridmod.mollify(phi0, cand)
            if float(np.max(np.abs(m.values - phi0.values))) \
                    <= 0.5 * eps * (1.0 - 1e-9):
                om0 = problem.family.omega_at(0.0, grid)
                defect = ma_ops.positive_part_det(
                    ma_ops.background_plus_hessian(m, om0))
                if float(np.min(defect.min_eigenvalue.values)) >= -tol_psh:
                    smooth, bw, found = m.values, cand, True
                    break
        if not found:
            notes.append("bandwidth search failed; using raw phi0")
            bw = 0.0
    v0 = smooth + 0.5 * eps
    v0 = np.maximum(v0, phi0.values)

    hess = gridmod.complex_hessian(gridmod.ScalarField(grid, v0)).matrices
    if problem.mu.kind == "canonical":
        u_f = np.log(np.maximum(problem.mu.e_u, mu_floor))
        hess_u = gridmod.complex_hessian(
            gridmod.ScalarField(grid, np.ascontiguousarray(u_f))).matrices
        C = 0.0
        for t in _default_times(T):
            det_plus = _det_plus_from(problem, t, hess - t * hess_u)
            mu = np.asarray(problem.mu.values_at(t, grid), dtype=float) \
                * np.ones(grid.shape)
            Fv = np.asarray(problem.forcing.values(t, grid, v0 - t * u_f)) \
                * np.ones(grid.shape)
            pos = mu >= mu_floor
            if np.any(pos):
                need = (_log_safe(det_plus[pos]) + u_f[pos]
                        - np.log(mu[pos]) - Fv[pos])
                C = max(C, float(np.max(need)))
        rate = C - u_f
    else:
        C = 0.0
        for t in _default_times(T):
            det_plus = _det_plus_from(problem, t, hess)
            mu = np.asarray(problem.mu.values_at(t, grid), dtype=float) \
                * np.ones(grid.shape)
            Fv = np.asarray(problem.forcing.values(t, grid, v0)) \
                * np.ones(grid.shape)
            need = _log_safe(det_plus) - np.log(mu) - Fv
            C = max(C, float(np.max(need)))
        rate = C

    barrier = AffineBarrier(grid, v0, rate)
    report = check_supersolution(barrier, problem, tol, times=report_times,
                                 mu_floor=mu_floor)
    report.drift = C
    report.bandwidth = bw
    report.boundary_above_ok = bool(np.all(v0 >= phi0.values))
    report.boundary_close_ok = bool(np.all(v0 <= phi0.values + eps)) \
        if eps > 0.0 else bool(np.all(v0 == phi0.values))
    if notes:
        report.notes = "; ".join(notes)
    return barrier, report


def build_envelopes(problem, tol=None, report_times=None, mu_floor=1e-12):
    """Constant-in-space affine envelopes min phi0 - C1 t and
    max phi0 + C2 t bracketing the solution (flat sandwich).

    Returns (lower barrier, upper barrier, lower report, upper report).
    """
    grid = problem.grid
    T = problem.T
    if tol is None:
        tol = 10.0 * grid.h * grid.h
    rho1 = float(np.min(problem.phi0.values))
    rho2 = float(np.max(problem.phi0.values))
    lo_base = np.full(grid.shape, rho1)
    hi_base = np.full(grid.shape, rho2)
    zero_hess = np.zeros(grid.shape + (grid.n, grid.n), dtype=np.complex128)
    C1 = 0.0
    C2 = 0.0
    for t in _default_times(T):
        det_bg = _det_plus_from(problem, t, zero_hess)
        mu = np.asarray(problem.mu.values_at(t, grid), dtype=float) \
            * np.ones(grid.shape)
        F1 = np.asarray(problem.forcing.values(t, grid, lo_base)) \
            * np.ones(grid.shape)
        F2 = np.asarray(problem.forcing.values(t, grid, hi_base)) \
            * np.ones(grid.shape)
        pos = mu > 0.0
        if np.any(pos):
            C1 = max(C1, float(np.max(np.log(mu[pos])
                                      - _log_safe(det_bg[pos]) + F1[pos])))
        sig = mu >= mu_floor
        if np.any(sig):
            C2 = max(C2, float(np.max(_log_safe(det_bg[sig])
                                      - np.log(mu[sig]) - F2[sig])))
    lower = AffineBarrier(grid, lo_base, -C1)
    upper = AffineBarrier(grid, hi_base, C2)
    lo_rep = check_subsolution(lower, problem, tol, times=report_times)
    hi_rep = check_supersolution(upper, problem, tol, times=report_times,
                                 mu_floor=mu_floor)
    return lower, upper, lo_rep, hi_rep


def sample_barrier(barrier, times, problem):
    """Snapshot a barrier at given times as a Trajectory for gap checks."""
    traj = parabolic.Trajectory(problem, None)
    for t in times:
        traj.record(float(t), barrier.field_at(t).values, 0, math.nan)
    return traj


def comparison_gap(phi_traj, psi_traj):
    """max over snapshots/nodes of (phi - psi) minus the positive part
    of the initial separation; nonpositive means the comparison
    principle held."""
    if phi_traj.problem.grid is not psi_traj.problem.grid and \
            phi_traj.problem.grid.shape != psi_traj.problem.grid.shape:
        raise ValueError("trajectories live on different grids")
    if len(phi_traj.times) != len(psi_traj.times) or any(
            abs(a - b) > 1e-9 for a, b in zip(phi_traj.times,
                                              psi_traj.times)):
        raise ValueError("snapshot times do not match")
    gap0 = max(0.0, float(np.max(phi_traj.snapshots[0].values
                                 - psi_traj.snapshots[0].values)))
    worst = -math.inf
    for a, b in zip(phi_traj.snapshots, psi_traj.snapshots):
        worst = max(worst, float(np.max(a.values - b.values)))
    return worst - gap0
