"""Explicit time stepper for the degenerate parabolic flow.

d phi / dt = log det_+(omega_t + dd^c phi) - log mu_t - F(t, x, phi)

stepped by forward Euler with a step-size rule tied to the smallest
eigenvalue of the evolving background-plus-Hessian matrix. Explicit
stepping keeps the update monotone in neighbor values, which is what the
comparison experiments rely on.
"""

import csv
import math
import os

import numpy as np

from . import grid as gridmod
from . import background as bgmod
from . import ma_ops

DT_UNDERFLOW = 1e-12


class BlowUpError(RuntimeError):
    """The state or right-hand side stopped being finite."""


class TimeStepUnderflow(RuntimeError):
    """The step-size rule produced dt below the underflow threshold."""


class StepBudgetExceeded(RuntimeError):
    """max_steps was hit before reaching the horizon."""


class DensitySpec:
    """The reference density mu(t, x).

    kind "positive": mu = s(t) f(t,x) with f bounded away from zero.
    kind "canonical": mu = s(t) f(t,x) e_u(x) where e_u >= 0 is the
    exponential of a quasi-psh weight stored directly (zeros mark the
    -infinity locus of the weight).
    kind "open_vanishing": mu = s(t) f(t,x) 1_{x not in D} for a node set
    D; flows with such densities are run for the nonexistence experiment
    and are flagged expect_no_viscosity_solution.
    """

    KINDS = ("positive", "canonical", "open_vanishing")

    def __init__(self, kind="positive", f=1.0, e_u=None, mask=None,
                 scale=None, mu_min=None, time_dependent=None):
        if kind not in self.KINDS:
            raise ValueError("unknown density kind %r" % (kind,))
        self.kind = kind
        self.f = f
        self.scale = scale
        self.mu_min = mu_min
        if time_dependent is None:
            time_dependent = callable(f)
        self.time_dependent = bool(time_dependent)
        self.expect_no_viscosity_solution = kind == "open_vanishing"
        self.e_u = None
        self.mask = None
        self._weights = None
        if kind == "canonical":
            if e_u is None:
                raise ValueError("canonical density needs the field e_u")
            vals = e_u.values if isinstance(e_u, gridmod.ScalarField) else e_u
            vals = np.ascontiguousarray(vals, dtype=np.float64)
            if np.min(vals) < 0.0:
                raise ValueError("e_u must be nonnegative")
            self.e_u = vals
            self._weights = vals
        elif kind == "open_vanishing":
            if mask is None:
                raise ValueError("open_vanishing density needs a node mask")
            self.mask = np.asarray(mask, dtype=bool)
            self._weights = np.ascontiguousarray(
                (~self.mask).astype(np.float64))
        elif e_u is not None or mask is not None:
            raise ValueError("e_u/mask only apply to vanishing kinds")

    def _f_values(self, t, grid):
        if callable(self.f):
            return np.asarray(self.f(t, grid), dtype=np.float64)
        if np.isscalar(self.f):
            return float(self.f)
        return np.asarray(self.f, dtype=np.float64)

    def base_values(self, t, grid):
        """Density before the scalar time scale: f times the weight."""
        fv = self._f_values(t, grid)
        if self._weights is None:
            return fv
        return fv * self._weights

    def scale_value(self, t):
        return 1.0 if self.scale is None else float(self.scale(t))

    def values_at(self, t, grid):
        return self.base_values(t, grid) * self.scale_value(t)

    def validate(self, grid, T):
        times = np.linspace(0.0, T, 9) if self.time_dependent else [0.0]
        if self.scale is not None:
            times = np.unique(np.concatenate(
                [np.asarray(times, dtype=float), np.linspace(0.0, T, 17)]))
        inf_f = math.inf
        for t in times:
            fv = self._f_values(t, grid)
            if not np.isscalar(fv) and fv.shape != grid.shape:
                raise ValueError("density f has shape %r, grid needs %r"
                                 % (fv.shape, grid.shape))
            if not np.all(np.isfinite(fv)):
                raise ValueError("density f is not finite at t=%g" % t)
            s = self.scale_value(t)
            if s <= 0.0:
                raise ValueError("density scale %g <= 0 at t=%g" % (s, t))
            inf_f = min(inf_f, float(np.min(fv)) * s)
        if self._weights is not None and self._weights.shape != grid.shape:
            raise ValueError("vanishing weight shape %r, grid needs %r"
                             % (self._weights.shape, grid.shape))
        if self.kind == "positive":
            if inf_f <= 0.0:
                raise ValueError("positive density must stay positive, "
                                 "sampled inf %g" % inf_f)
            if self.mu_min is not None and inf_f < self.mu_min - 1e-15:
                raise ValueError("density drops to %g below declared "
                                 "mu_min %g" % (inf_f, self.mu_min))
            if self.mu_min is None:
                self.mu_min = inf_f
        else:
            if inf_f < 0.0:
                raise ValueError("density factor f must be nonnegative")


class ForcingSpec:
    """The forcing term F(t, x, r), nondecreasing in r.

    kind "linear" is F = alpha r with alpha >= 0; kind "tabulated" takes
    a closed-form fn(t, grid, r_values) with a declared Lipschitz bound
    in r. Monotonicity and the Lipschitz bound are sample-checked.
    """

    def __init__(self, kind="linear", alpha=0.0, fn=None,
                 lipschitz_bound=None):
        if kind not in ("linear", "tabulated"):
            raise ValueError("unknown forcing kind %r" % (kind,))
        self.kind = kind
        if kind == "linear":
            self.alpha = float(alpha)
            if self.alpha < 0.0:
                raise ValueError("linear forcing needs alpha >= 0")
            self.fn = None
            self.lipschitz_bound = self.alpha
        else:
            if fn is None:
                raise ValueError("tabulated forcing needs fn")
            if lipschitz_bound is None:
                raise ValueError("tabulated forcing needs lipschitz_bound")
            self.alpha = 0.0
            self.fn = fn
            self.lipschitz_bound = float(lipschitz_bound)

    def values(self, t, grid, r_values):
        if self.kind == "linear":
            return self.alpha * r_values
        return np.asarray(self.fn(t, grid, r_values), dtype=np.float64)

    def validate(self, grid, T):
        if self.kind == "linear":
            return
        delta = 1e-3
        for t in (0.0, 0.5 * T, T):
            for r in (-1.0, 0.0, 0.7, 2.0):
                base = np.full(grid.shape, r)
                v0 = self.values(t, grid, base)
                v1 = self.values(t, grid, base + delta)
                if np.min(v1 - v0) < -1e-12:
                    raise ValueError("forcing decreases in r near r=%g "
                                     "at t=%g" % (r, t))
                lip = float(np.max(np.abs(v1 - v0))) / delta
                if lip > self.lipschitz_bound * (1.0 + 1e-6) + 1e-9:
                    raise ValueError("forcing Lipschitz constant %g exceeds "
                                     "declared bound %g" %
                                     (lip, self.lipschitz_bound))


class SolverConfig:
    """Step-size rule, floors, snapshot schedule, and stopping options.

    dt_rule "fixed" uses dt as given. dt_rule "cfl" uses
    dt = cfl_c h^2 m_min with m_min the minimum eigenvalue of the
    background-plus-Hessian over the grid, clamped below by
    dt_eig_floor (default det_floor^{1/n}). dt_rule "monotone" uses the
    sharper bound m / (0.5 sum_axes h_a^{-2} + kappa m) scaled by mono_c,
    under which the explicit update is order preserving.
    """

    def __init__(self, dt_rule="cfl", dt=None, cfl_c=0.4, mono_c=0.9,
                 det_floor=1e-12, mu_floor=1e-12, dt_eig_floor=None,
                 snapshot_times=None, stationarity_tol=None,
                 max_steps=20_000_000, tol_psh=1e-8):
        if dt_rule not in ("fixed", "cfl", "monotone"):
            raise ValueError("unknown dt_rule %r" % (dt_rule,))
        if dt_rule == "fixed":
            if dt is None or dt <= 0.0:
                raise ValueError("fixed rule needs dt > 0")
        if det_floor <= 0.0 or mu_floor <= 0.0:
            raise ValueError("floors must be positive")
        self.dt_rule = dt_rule
        self.dt = None if dt is None else float(dt)
        self.cfl_c = float(cfl_c)
        self.mono_c = float(mono_c)
        self.det_floor = float(det_floor)
        self.mu_floor = float(mu_floor)
        self.dt_eig_floor = dt_eig_floor
        self.snapshot_times = (None if snapshot_times is None
                               else [float(s) for s in snapshot_times])
        self.stationarity_tol = stationarity_tol
        self.max_steps = int(max_steps)
        self.tol_psh = float(tol_psh)

    def eig_floor(self, n):
        if self.dt_eig_floor is not None:
            return float(self.dt_eig_floor)
        return self.det_floor ** (1.0 / n)

    def replace(self, **kw):
        fields = dict(dt_rule=self.dt_rule, dt=self.dt, cfl_c=self.cfl_c,
                      mono_c=self.mono_c, det_floor=self.det_floor,
                      mu_floor=self.mu_floor, dt_eig_floor=self.dt_eig_floor,
                      snapshot_times=self.snapshot_times,
                      stationarity_tol=self.stationarity_tol,
                      max_steps=self.max_steps, tol_psh=self.tol_psh)
        fields.update(kw)
        return SolverConfig(**fields)


class FlowProblem:
    """Background family, density, forcing, initial data, and horizon."""

    def __init__(self, family, mu, forcing, phi0, T, tol_psh=1e-8):
        if not isinstance(phi0, gridmod.ScalarField):
            raise TypeError("phi0 must be a ScalarField")
        grid = phi0.grid
        if family.n != grid.n:
            raise ValueError("family dimension %d vs grid %d"
                             % (family.n, grid.n))
        if T <= 0.0:
            raise ValueError("horizon T must be positive")
        self.family = family
        self.mu = mu
        self.forcing = forcing
        self.phi0 = phi0
        self.T = float(T)
        mu.validate(grid, self.T)
        forcing.validate(grid, self.T)
        self._check_horizon()
        self._check_admissible(tol_psh)

    @property
    def grid(self):
        return self.phi0.grid

    def _check_horizon(self):
        sched = getattr(self.family, "schedule", None)
        if sched is not None:
            if sched.rule == "constant":
                return
            tm = bgmod.t_max(sched)
            if self.T >= tm:
                raise ValueError("horizon T=%g reaches the extinction time "
                                 "T_max=%.9g of the class schedule"
                                 % (self.T, tm))
            return
        for t in bgmod._time_samples(self.T, 64):
            if bgmod._min_eig_matrix(self.family.class_at(t)) <= 0.0:
                raise ValueError("background class degenerates at t=%g "
                                 "inside the horizon" % t)

    def _check_admissible(self, tol_psh):
        ev = ma_ops.RhsEvaluator(self)
        out = np.empty(self.grid.shape)
        min_eig = ev(self.phi0.values, 0.0, out)[0]
        if min_eig < -tol_psh:
            raise ValueError("phi0 is not admissible: min eigenvalue of "
                             "omega_0 + dd^c phi0 is %g" % min_eig)


class Trajectory:
    """Snapshots of one solve plus running diagnostics."""

    def __init__(self, problem, config):
        self.problem = problem
        self.config = config
        self.times = []
        self.snapshots = []
        self.rows = []
        self.floor_activations = 0
        self.final_max_abs_rhs = math.nan
        self.steps = 0
        self.stationary_time = None

    def record(self, t, values, floor_hits, max_abs_rhs):
        field = gridmod.ScalarField(self.problem.grid, values.copy())
        self.times.append(float(t))
        self.snapshots.append(field)
        self.rows.append((float(t), float(np.max(np.abs(values))),
                          float(np.mean(values)), int(floor_hits),
                          float(max_abs_rhs)))

    def snapshot_at(self, t, tol=1e-9):
        for ti, snap in zip(self.times, self.snapshots):
            if abs(ti - t) <= tol:
                return snap
        raise KeyError("no snapshot at t=%g" % t)

    @property
    def final(self):
        return self.snapshots[-1]

    def export(self, directory):
        """Write snapshots plus a manifest.csv of per-snapshot stats."""
        os.makedirs(directory, exist_ok=True)
        for i, snap in enumerate(self.snapshots):
            gridmod.save_field(snap,
                               os.path.join(directory, "snapshot_%04d.maf" % i))
        path = os.path.join(directory, "manifest.csv")
        with open(path, "w", newline="") as fh:
            wr = csv.writer(fh)
            wr.writerow(["index", "time", "sup_norm", "mean",
                         "floor_hits", "max_abs_rhs"])
            for i, row in enumerate(self.rows):
                wr.writerow([i] + ["%.17g" % v if isinstance(v, float)
                                   else str(v) for v in row])
        return path


def _rule_dt(config, grid, min_eig, kappa):
    if config.dt_rule == "fixed":
        return config.dt
    m = max(min_eig, config.eig_floor(grid.n))
    if config.dt_rule == "cfl":
        return config.cfl_c * grid.h * grid.h * m
    denom = 0.5 * sum(1.0 / (s * s) for s in grid.spacings)
    return config.mono_c * m / (denom + kappa * m)


def _snapshot_schedule(problem, config):
    times = [0.0, problem.T]
    if config.snapshot_times is not None:
        for s in config.snapshot_times:
            if s < -1e-12 or s > problem.T + 1e-12:
                raise ValueError("snapshot time %g outside [0, T]" % s)
            times.append(min(max(s, 0.0), problem.T))
    times.sort()
    out = [times[0]]
    for s in times[1:]:
        if s - out[-1] > 1e-12:
            out.append(s)
    return out


def _locate_bad_node(arr):
    bad = np.argwhere(~np.isfinite(arr))
    return tuple(int(i) for i in bad[0]) if len(bad) else None


def _run(problem, config, h_fn=None):
    grid = problem.grid
    ev = ma_ops.RhsEvaluator(problem, config.det_floor, config.mu_floor)
    kappa = problem.forcing.lipschitz_bound
    targets = _snapshot_schedule(problem, config)
    traj = Trajectory(problem, config)
    phi = problem.phi0.values.copy()
    out = np.empty_like(phi)
    t = 0.0
    traj.record(0.0, phi, 0, math.nan)
    floor_since = 0
    last_max_abs = math.nan
    stationary = False

    for target in targets[1:]:
        if stationary:
            traj.record(target, phi, 0, last_max_abs)
            continue
        while t < target - 1e-12:
            min_eig, max_abs, _, hits = ev(phi, t, out)
            if not math.isfinite(max_abs):
                node = _locate_bad_node(out)
                raise BlowUpError("non-finite right-hand side at t=%g, "
                                  "node %r" % (t, node))
            last_max_abs = max_abs
            floor_since += hits
            traj.steps += 1
            if traj.steps > config.max_steps:
                raise StepBudgetExceeded("exceeded max_steps=%d at t=%g"
                                         % (config.max_steps, t))
            if (config.stationarity_tol is not None
                    and max_abs <= config.stationarity_tol):
                stationary = True
                traj.stationary_time = t
                break
            dt = _rule_dt(config, grid, min_eig, kappa)
            if dt < DT_UNDERFLOW:
                raise TimeStepUnderflow("dt=%g underflowed at t=%g"
                                        % (dt, t))
            scale = dt
            if h_fn is not None:
                ht = float(h_fn(t))
                if ht < DT_UNDERFLOW:
                    raise ValueError("twist profile h(t)=%g vanished "
                                     "at t=%g" % (ht, t))
                if config.dt_rule != "fixed":
                    dt = dt * ht
                dt = min(dt, target - t)
                scale = dt / ht
            else:
                dt = min(dt, target - t)
                scale = dt
            out *= scale
            phi += out
            if not np.all(np.isfinite(phi)):
                node = _locate_bad_node(phi)
                raise BlowUpError("state blew up at t=%g, node %r"
                                  % (t, node))
            t += dt
        t = target
        traj.record(target, phi, floor_since, last_max_abs)
        traj.floor_activations += floor_since
        floor_since = 0

    min_eig, max_abs, _, hits = ev(phi, problem.T, out)
    traj.final_max_abs_rhs = max_abs
    return traj


def step(phi, t, dt, problem, config=None):
    """One explicit Euler step phi + dt * flow_rhs(phi, t)."""
    if dt <= 0.0:
        raise ValueError("dt must be positive")
    rhs = ma_ops.flow_rhs(phi, t, problem, config)
    values = phi.values + dt * rhs.values
    if not np.all(np.isfinite(values)):
        node = _locate_bad_node(values)
        raise BlowUpError("non-finite update at t=%g, node %r" % (t, node))
    result = gridmod.ScalarField(phi.grid, values)
    result.floor_hits = rhs.floor_hits
    return result


def solve(problem, config):
    """Run the flow to the horizon, returning snapshots at the requested
    times (t=0 and t=T always included; snapshot[0] is phi0 verbatim)."""
    return _run(problem, config, h_fn=None)


def solve_twisted(problem, h, config):
    """Run the twisted flow h(t) d phi/dt = rhs.

    Steps phi += (dt / h(t)) * rhs; h must stay positive on [0, T]. With
    h constant 1 this reproduces solve exactly, step for step.
    """
    for t in bgmod._time_samples(problem.T, 64):
        if float(h(t)) <= 0.0:
            raise ValueError("twist profile must stay positive, h(%g)=%g"
                             % (t, float(h(t))))
    return _run(problem, config, h_fn=h)


def change_time_variable(traj, alpha, t0=0.0, s0=0.0):
    """Rescale a solved alpha-flow into the corresponding alpha=0 flow.

    New time s = s0 + e^{alpha (t - t0)} - 1 and new state
    psi(s) = (1 + s - s0) phi(t). The returned trajectory carries the
    transformed problem: background (1+s-s0) omega_{t(s)}, density
    (1+s-s0)^n mu_{t(s)}, zero forcing. Spatially perturbed backgrounds
    are not supported by the class-level transform.
    """
    if alpha <= 0.0:
        raise ValueError("alpha must be positive")
    problem = traj.problem
    if problem.forcing.kind != "linear" or \
            abs(problem.forcing.alpha - alpha) > 1e-12:
        raise ValueError("trajectory was not produced by the linear "
                         "alpha=%g flow" % alpha)
    if getattr(problem.family, "perturbation", None) is not None:
        raise ValueError("spatially perturbed backgrounds unsupported")
    pairs = [(ti, snap) for ti, snap in zip(traj.times, traj.snapshots)
             if ti >= t0 - 1e-12]
    if not pairs or abs(pairs[0][0] - t0) > 1e-12:
        raise ValueError("trajectory has no snapshot at the base time "
                         "t0=%g" % t0)

    def t_of_s(s):
        return t0 + math.log1p(s - s0) / alpha

    fam = problem.family

    def class_fn(s):
        return (1.0 + (s - s0)) * fam.class_at(t_of_s(s))

    new_family = bgmod.CallableFamily(class_fn)
    mu = problem.mu
    n = problem.grid.n
    if callable(mu.f):
        new_f = lambda s, g: mu._f_values(t_of_s(s), g)
    else:
        new_f = mu.f

    def new_scale(s):
        return (1.0 + (s - s0)) ** n * mu.scale_value(t_of_s(s))

    new_mu = DensitySpec(kind=mu.kind, f=new_f, e_u=mu.e_u, mask=mu.mask,
                         scale=new_scale, time_dependent=mu.time_dependent)
    new_times = [s0 + math.expm1(alpha * (ti - t0)) for ti, _ in pairs]
    new_problem = FlowProblem(new_family, new_mu,
                              ForcingSpec("linear", alpha=0.0),
                              pairs[0][1], max(new_times[-1], s0 + 1e-9))
    out = Trajectory(new_problem, traj.config)
    for (ti, snap), si in zip(pairs, new_times):
        factor = math.exp(alpha * (ti - t0))
        out.record(si, factor * snap.values, 0, math.nan)
    out.steps = traj.steps
    return out


class SweepResult:
    """Trajectories of a viscosity sweep plus the monotonicity report."""

    def __init__(self, epsilons, trajectories, violation_count,
                 violation_tol, max_violation, gaps_to_limit):
        self.epsilons = epsilons
        self.trajectories = trajectories
        self.violation_count = violation_count
        self.violation_tol = violation_tol
        self.max_violation = max_violation
        self.gaps_to_limit = gaps_to_limit

    def __iter__(self):
        return iter(self.trajectories)

    def __getitem__(self, i):
        return self.trajectories[i]

    def __len__(self):
        return len(self.trajectories)


def vanishing_viscosity_sweep(problem, Theta, eps_list, config,
                              violation_tol=1e-3):
    """Solve the flow with backgrounds omega_t + eps Theta, eps decreasing.

    Reports the count of (node, time) pairs violating the expected
    pointwise ordering phi(eps) <= phi(eps') for eps < eps' beyond
    violation_tol, and sup-norm gaps of each run against the eps=0 run
    when the list ends at zero.
    """
    Theta = bgmod._as_matrix(Theta, "Theta")
    if bgmod._min_eig_matrix(Theta) <= 0.0:
        raise ValueError("Theta must be positive definite")
    eps_list = [float(e) for e in eps_list]
    if any(e < 0.0 for e in eps_list):
        raise ValueError("eps must be nonnegative")
    if any(a <= b for a, b in zip(eps_list, eps_list[1:])):
        raise ValueError("eps_list must be strictly decreasing")
    trajectories = []
    for eps in eps_list:
        if eps == 0.0:
            fam = problem.family
        else:
            fam = bgmod.ShiftedFamily(problem.family, eps * Theta)
        prob = FlowProblem(fam, problem.mu, problem.forcing, problem.phi0,
                           problem.T)
        trajectories.append(solve(prob, config))

    violations = 0
    max_violation = 0.0
    for i in range(len(eps_list)):
        for j in range(i + 1, len(eps_list)):
            # eps_list[j] < eps_list[i]: smaller-eps run must sit below
            for snap_i, snap_j in zip(trajectories[i].snapshots,
                                      trajectories[j].snapshots):
                d = snap_j.values - snap_i.values
                violations += int(np.count_nonzero(d > violation_tol))
                max_violation = max(max_violation, float(np.max(d)))
    gaps = None
    if eps_list[-1] == 0.0:
        limit = trajectories[-1]
        gaps = []
        for traj in trajectories:
            gap = max(gridmod.sup_norm_diff(a, b) for a, b in
                      zip(traj.snapshots, limit.snapshots))
            gaps.append(gap)
    return SweepResult(eps_list, trajectories, violations, violation_tol,
                       max_violation, gaps)


def paired_comparison_steps(problem, lower0, upper0, config, max_pairs=500):
    """Step an ordered pair of states with one shared dt sequence.

    Both states see the same background, density, and forcing; dt comes
    from the configured rule evaluated on the worse of the two minimum
    eigenvalues, so the update is order preserving for both. Stops after
    max_pairs steps or when the rule dt collapses toward underflow.
    Returns (steps_taken, max over steps and nodes of lower - upper).
    """
    grid = problem.grid
    ev = ma_ops.RhsEvaluator(problem, config.det_floor, config.mu_floor)
    kappa = problem.forcing.lipschitz_bound
    a = lower0.values.copy()
    b = upper0.values.copy()
    ra = np.empty_like(a)
    rb = np.empty_like(b)
    t = 0.0
    worst = float(np.max(a - b))
    taken = 0
    for _ in range(max_pairs):
        ma = ev(a, t, ra)[0]
        mb = ev(b, t, rb)[0]
        dt = _rule_dt(config, grid, min(ma, mb), kappa)
        if dt < 1e-10 or t + dt > problem.T:
            break
        ra *= dt
        rb *= dt
        a += ra
        b += rb
        t += dt
        taken += 1
        worst = max(worst, float(np.max(a - b)))
    return taken, worst


def h_profile(t, n=1):
    """Closed form n[(e^t - 1) log(e^t - 1) - t e^t], the drift solving
    h'(t) = n e^t log(1 - e^{-t}), h(0) = 0."""
    if t < 0.0:
        raise ValueError("t must be nonnegative")
    if t == 0.0:
        return 0.0
    x = math.expm1(t)
    return n * (x * math.log(x) - t * (1.0 + x))


def h_profile_upper(t, n=1):
    """Closed form n[(e^t + 1) log(e^t + 1) - t e^t - 2 log 2], solving
    h'(t) = n e^t log(1 + e^{-t}), h(0) = 0."""
    if t < 0.0:
        raise ValueError("t must be nonnegative")
    et = math.exp(t)
    return n * ((et + 1.0) * math.log(et + 1.0) - t * et
                - 2.0 * math.log(2.0))


def h_ode_residual(t, n=1, delta=1e-5):
    """|central-difference h'(t) - n e^t log(1 - e^{-t})|."""
    if t <= 0.0:
        raise ValueError("residual needs t > 0")
    d = min(delta, 0.5 * t)
    deriv = (h_profile(t + d, n) - h_profile(t - d, n)) / (2.0 * d)
    exact = n * math.exp(t) * math.log(-math.expm1(-t))
    return abs(deriv - exact)
