"""Static degenerate Monge-Ampere solves via pseudo-time flow.

The static equation (omega + dd^c phi)^n = e^{alpha phi} mu is solved by
running the parabolic flow to stationarity; for alpha = 0 the state is
projected to mean zero each step and the density is renormalized inside
the 1 percent solvability allowance so the discrete problem is exactly
compatible.
"""

import csv
import math

import numpy as np

from . import grid as gridmod
from . import background as bgmod
from . import ma_ops
from . import parabolic


class StaticNonConvergence(RuntimeError):
    """Residual failed to reach tolerance within the step budget."""

    def __init__(self, message, residual):
        super().__init__(message)
        self.residual = residual


class _ScheduleStub:
    rule = "constant"


class _FrozenFamily(bgmod._FamilyBase):
    """Time-independent background read off a per-node HermitianField."""

    def __init__(self, omega_field):
        grid = omega_field.grid
        self.n = grid.n
        self.grid = grid
        M = omega_field.matrices
        if self.n == 1:
            self._comps = np.ascontiguousarray(M[..., 0, 0].real)
        else:
            self._comps = tuple(np.ascontiguousarray(c) for c in (
                M[..., 0, 0].real, M[..., 1, 1].real,
                M[..., 0, 1].real, M[..., 0, 1].imag))
        self._mean = M.reshape(-1, self.n, self.n).mean(axis=0)
        self.schedule = _ScheduleStub()

    def class_at(self, t):
        return self._mean

    def components_at(self, t, grid):
        return self._comps


def _as_family(omega, grid=None):
    if isinstance(omega, gridmod.HermitianField):
        return _FrozenFamily(omega), omega.grid
    if hasattr(omega, "class_at"):
        return omega, grid
    return bgmod.ConstantFamily(omega), grid


class StaticProblem:
    """Time-independent background, density, and zeroth-order coefficient."""

    def __init__(self, omega, mu, alpha=1.0, grid=None):
        self.family, g = _as_family(omega, grid)
        if g is None:
            raise ValueError("grid required when omega is a plain matrix")
        self.grid = g
        self.omega = omega
        self.mu = mu
        self.alpha = float(alpha)
        if self.alpha < 0.0:
            raise ValueError("alpha must be nonnegative")

    def det_omega_mean(self):
        om = self.family.omega_at(0.0, self.grid)
        ev = ma_ops.positive_part_det(om)
        return float(np.mean(ev.det_plus.values))


def default_static_config(grid, stationarity_tol=1e-6, dt_eig_floor=None):
    """Stability-limited pseudo-time configuration for static solves.

    The explicit step amplifies the highest mode by 1 - 2 n c for
    dt = c h^2 m, so the factor must stay under 1/n; static runs do not
    need the extra order-preserving margin of the flow rules.
    """
    c = 0.9 if grid.n == 1 else 0.45
    return parabolic.SolverConfig(dt_rule="cfl", cfl_c=c,
                                  stationarity_tol=stationarity_tol,
                                  dt_eig_floor=dt_eig_floor,
                                  max_steps=2_000_000)


def _flow_problem(p, phi0, T):
    forcing = parabolic.ForcingSpec("linear", alpha=p.alpha)
    return parabolic.FlowProblem(p.family, p.mu, forcing, phi0, T)


def solve_static(p, config=None, phi_init=None):
    """Flow to stationarity; returns the static field.

    For alpha = 0 the density is renormalized to match the discrete mass
    of det(omega) (must already agree within 1 percent) and the state is
    projected to mean zero every step; the result has mean 0 within
    1e-12. The final residual and step count are attached as attributes.
    """
    grid = p.grid
    if config is None:
        config = default_static_config(grid)
    tol = config.stationarity_tol
    if tol is None:
        tol = 1e-6
    mu = p.mu
    if p.alpha == 0.0:
        mean_mu = float(np.mean(np.asarray(mu.values_at(0.0, grid))))
        mean_det = p.det_omega_mean()
        ratio = mean_det / mean_mu
        if abs(ratio - 1.0) > 0.01:
            raise ValueError("alpha=0 needs mass-compatible data: "
                             "det(omega) mass / mu mass = %.6g" % ratio)
        base_scale = mu.scale
        if base_scale is None:
            scale = (lambda t, r=ratio: r)
        else:
            scale = (lambda t, r=ratio, s=base_scale: r * float(s(t)))
        mu = parabolic.DensitySpec(kind=mu.kind, f=mu.f, e_u=mu.e_u,
                                   mask=mu.mask, scale=scale,
                                   time_dependent=mu.time_dependent)
    if phi_init is None:
        phi_init = gridmod.ScalarField(grid, np.zeros(grid.shape))
    # pseudo-time iteration: the init need not be admissible Cauchy data
    problem = parabolic.FlowProblem(
        p.family, mu, parabolic.ForcingSpec("linear", alpha=p.alpha),
        phi_init, T=1.0, tol_psh=math.inf)
    ev = ma_ops.RhsEvaluator(problem, config.det_floor, config.mu_floor)
    phi = phi_init.values.copy()
    out = np.empty_like(phi)
    max_abs = math.inf
    steps = 0
    while steps < config.max_steps:
        min_eig, max_abs, _, _ = ev(phi, 0.0, out)
        if not math.isfinite(max_abs):
            raise parabolic.BlowUpError("static iteration blew up at "
                                        "step %d" % steps)
        if max_abs <= tol:
            break
        dt = parabolic._rule_dt(config, grid, min_eig, p.alpha)
        out *= dt
        phi += out
        if p.alpha == 0.0:
            phi -= np.mean(phi)
        steps += 1
    else:
        raise StaticNonConvergence(
            "no stationary state within %d steps; final residual %.3g "
            "(tol %.3g)" % (config.max_steps, max_abs, tol), max_abs)
    if p.alpha == 0.0:
        phi -= np.mean(phi)
    field = gridmod.ScalarField(grid, phi)
    field.residual = float(max_abs)
    field.steps = steps
    return field


class ContractionReport:
    """Gap-versus-exponential-bound series for the fixed-point flow."""

    def __init__(self, rows, tol, violations, dt_used, phi_ke):
        self.rows = rows
        self.tol = tol
        self.violations = violations
        self.dt_used = dt_used
        self.phi_ke = phi_ke

    def to_csv(self, path):
        with open(path, "w", newline="") as fh:
            wr = csv.writer(fh)
            wr.writerow(["time", "gap", "bound"])
            for t, gap, bound in self.rows:
                wr.writerow(["%.17g" % t, "%.17g" % gap, "%.17g" % bound])
        return path


def ke_contraction_check(p, phi0, T, config=None, times=None,
                         static_config=None):
    """Run the alpha=1 flow from phi0 and compare the sup-norm distance
    to the static solution against e^{-t} times the initial distance.

    Violations are gaps exceeding the bound by more than 10 (h^2 + dt).
    """
    if abs(p.alpha - 1.0) > 1e-14:
        raise ValueError("contraction check needs alpha = 1")
    grid = p.grid
    phi_ke = solve_static(p, config=static_config)
    if times is None:
        times = [t for t in (0.5, 1.0, 2.0, 3.0) if t <= T]
    times = sorted(float(t) for t in times)
    if config is None:
        config = parabolic.SolverConfig(dt_rule="cfl", cfl_c=0.4)
    config = config.replace(snapshot_times=times)
    problem = _flow_problem(p, phi0, T)
    traj = parabolic.solve(problem, config)
    gap0 = gridmod.sup_norm_diff(phi0, phi_ke)
    dt_used = T / max(traj.steps, 1)
    tol = 10.0 * (grid.h * grid.h + dt_used)
    rows = []
    violations = 0
    for t in times:
        snap = traj.snapshot_at(t)
        gap = gridmod.sup_norm_diff(snap, phi_ke)
        bound = math.exp(-t) * gap0
        rows.append((t, gap, bound))
        if gap > bound + tol:
            violations += 1
    return ContractionReport(rows, tol, violations, dt_used, phi_ke)
