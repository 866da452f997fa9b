"""Time-dependent background forms on the flat torus.

Cohomology classes are modeled by constant Hermitian matrices; a family
is a scheduled matrix path plus an optional mean-zero spatial
perturbation. Extinction times, regularity moduli, and monotonicity
checks all reduce to small closed-form eigenvalue computations.
"""

import math
import warnings

import numpy as np

from . import grid as gridmod

_HERM_TOL = 1e-12


def _as_matrix(A, name="matrix"):
    M = np.asarray(A, dtype=np.complex128)
    if M.ndim != 2 or M.shape[0] != M.shape[1] or M.shape[0] not in (1, 2):
        raise ValueError("%s must be 1x1 or 2x2, got shape %r"
                         % (name, M.shape))
    if np.max(np.abs(M - M.conj().T)) > _HERM_TOL:
        raise ValueError("%s is not Hermitian" % name)
    return M


def _min_eig_matrix(M):
    return float(np.linalg.eigvalsh(M)[0])


def _matrix_components(A, n):
    """Kernel-facing scalar components of one constant Hermitian matrix."""
    if n == 1:
        return float(A[0, 0].real)
    return (float(A[0, 0].real), float(A[1, 1].real),
            float(A[0, 1].real), float(A[0, 1].imag))


def _full_array(grid, values):
    arr = np.asarray(values, dtype=np.float64)
    if arr.shape == grid.shape and arr.flags.c_contiguous:
        return arr
    out = np.empty(grid.shape, dtype=np.float64)
    out[...] = arr
    return out


def _time_samples(T, samples_per_unit=64):
    count = max(2, int(round(T * samples_per_unit)) + 1)
    return np.linspace(0.0, float(T), count)


class ClassSchedule:
    """A scheduled path of cohomology classes.

    rule "nkrf": e^{-t} A + (1-e^{-t}) B, rule "krf": A + t B,
    rule "constant": A for all t. A must be positive definite; B may be
    indefinite (it plays the role of a canonical-bundle class).
    """

    RULES = ("nkrf", "krf", "constant")

    def __init__(self, A, B=None, rule="nkrf"):
        if rule not in self.RULES:
            raise ValueError("unknown schedule rule %r" % (rule,))
        self.A = _as_matrix(A, "A")
        if B is None:
            if rule != "constant":
                raise ValueError("rule %r needs a target class B" % (rule,))
            B = np.zeros_like(self.A)
        self.B = _as_matrix(B, "B")
        if self.B.shape != self.A.shape:
            raise ValueError("A and B must have the same shape")
        self.rule = rule
        self.n = self.A.shape[0]
        if _min_eig_matrix(self.A) <= 0.0:
            raise ValueError("initial class A must be positive definite")

    def class_at(self, t):
        if self.rule == "constant":
            return self.A
        if self.rule == "nkrf":
            e = math.exp(-t)
            return e * self.A + (1.0 - e) * self.B
        return self.A + t * self.B


def t_max(schedule, scan_step=1e-3, bisect_tol=1e-10, scan_cap=64.0):
    """Supremum of t with the scheduled class positive definite.

    Bracket by a forward scan, then bisect the minimum eigenvalue to
    absolute tolerance. Returns +inf when the class stays positive
    definite (detected from the limit class for the named rules, by the
    scan cap otherwise). The constant rule never degenerates and has no
    extinction time.
    """
    rule = getattr(schedule, "rule", None)
    if rule == "constant":
        raise ValueError("constant schedule never degenerates")
    if rule in ("nkrf", "krf") and _min_eig_matrix(schedule.B) >= 0.0:
        return math.inf

    def mineig(t):
        return _min_eig_matrix(schedule.class_at(t))

    if mineig(0.0) <= 0.0:
        return 0.0
    lo = 0.0
    hi = None
    t = 0.0
    while t < scan_cap:
        t2 = t + scan_step
        if mineig(t2) <= 0.0:
            lo, hi = t, t2
            break
        t = t2
    if hi is None:
        return math.inf
    while hi - lo > bisect_tol:
        mid = 0.5 * (lo + hi)
        if mineig(mid) <= 0.0:
            hi = mid
        else:
            lo = mid
    return 0.5 * (lo + hi)


class CosineBump:
    """Mean-zero identity-multiple perturbation a cos(2 pi k x_axis / L).

    Optional exponential decay in t keeps the family C^1 in time. The
    spatial mean vanishes on every uniform grid, so the perturbation does
    not move the cohomology class.
    """

    def __init__(self, amplitude, frequency=1, axis=0, decay=0.0):
        self.amplitude = float(amplitude)
        self.frequency = int(frequency)
        self.axis = int(axis)
        self.decay = float(decay)
        if self.frequency < 1:
            raise ValueError("frequency must be a positive integer")

    def _profile(self, t, grid):
        if self.axis >= 2 * grid.n:
            raise ValueError("axis %d out of range for n=%d"
                             % (self.axis, grid.n))
        L = grid.periods[self.axis]
        x = grid.axis_coords(self.axis)
        amp = self.amplitude * math.exp(-self.decay * t)
        return amp * np.cos((2.0 * math.pi * self.frequency / L) * x)

    def components_at(self, t, grid):
        b = self._profile(t, grid)
        if grid.n == 1:
            return b
        return (b, b, 0.0, 0.0)


PERTURBATIONS = {"cosine_bump": CosineBump}


class _FamilyBase:
    """Shared evaluation logic; subclasses supply class_at and n."""

    perturbation = None

    def components_at(self, t, grid):
        """Background matrix entries at time t in kernel layout.

        n=1: a single scalar or per-node array. n=2: (w11, w22, Re w12,
        Im w12), all scalars or all per-node arrays.
        """
        if t < 0.0:
            raise ValueError("time %g out of range" % t)
        comps = _matrix_components(self.class_at(t), self.n)
        pert = self.perturbation
        if pert is None:
            return comps
        pc = pert.components_at(t, grid)
        if self.n == 1:
            return _full_array(grid, comps + pc)
        return tuple(_full_array(grid, c + p) for c, p in zip(comps, pc))

    def omega_at(self, t, grid):
        """The background form at time t as a per-node HermitianField."""
        if grid.n != self.n:
            raise ValueError("grid dimension %d does not match family %d"
                             % (grid.n, self.n))
        comps = self.components_at(t, grid)
        M = np.zeros(grid.shape + (self.n, self.n), dtype=np.complex128)
        if self.n == 1:
            M[..., 0, 0] = comps
        else:
            w11, w22, wbr, wbi = comps
            M[..., 0, 0] = w11
            M[..., 1, 1] = w22
            off = np.asarray(wbr) + 1j * np.asarray(wbi)
            M[..., 0, 1] = off
            M[..., 1, 0] = np.conj(off)
        return gridmod.HermitianField(grid, M)

    def t_max(self):
        sched = getattr(self, "schedule", None)
        if sched is not None:
            return t_max(sched)
        return t_max(self)


class BackgroundFamily(_FamilyBase):
    """A scheduled class path with an optional spatial perturbation.

    theta and Theta, when given, are uniform Hermitian bounds
    theta <= omega_t <= Theta checked by sampled eigenvalue tests over
    [0, check_horizon] at construction.
    """

    def __init__(self, schedule, perturbation=None, theta=None, Theta=None,
                 check_horizon=None, check_grid=None):
        self.schedule = schedule
        self.n = schedule.n
        self.perturbation = perturbation
        self.theta = None if theta is None else _as_matrix(theta, "theta")
        self.Theta = None if Theta is None else _as_matrix(Theta, "Theta")
        if self.theta is not None and _min_eig_matrix(self.theta) < -1e-12:
            raise ValueError("theta must be positive semidefinite")
        if self.Theta is not None and _min_eig_matrix(self.Theta) <= 0.0:
            raise ValueError("Theta must be positive definite")
        if self.theta is not None or self.Theta is not None:
            self._check_bounds(check_horizon, check_grid)

    def class_at(self, t):
        return self.schedule.class_at(t)

    def _check_bounds(self, horizon, grid):
        if horizon is None:
            if self.schedule.rule == "constant":
                horizon = 1.0
            else:
                tm = t_max(self.schedule)
                horizon = 10.0 if math.isinf(tm) else 0.999 * tm
        for t in _time_samples(horizon, 64):
            if grid is not None and self.perturbation is not None:
                om = self.omega_at(t, grid).matrices
                mats = om.reshape(-1, self.n, self.n)
            else:
                mats = [self.class_at(t)]
            for M in mats:
                if (self.theta is not None
                        and _min_eig_matrix(M - self.theta) < -1e-10):
                    raise ValueError("omega_t < theta at t=%g" % t)
                if (self.Theta is not None
                        and _min_eig_matrix(self.Theta - M) < -1e-10):
                    raise ValueError("omega_t > Theta at t=%g" % t)


class ConstantFamily(BackgroundFamily):
    """Convenience wrapper: omega_t = A for all t."""

    def __init__(self, A, perturbation=None, theta=None, Theta=None):
        super().__init__(ClassSchedule(A, rule="constant"),
                         perturbation=perturbation, theta=theta, Theta=Theta)


class ScaledFamily(_FamilyBase):
    """s(t) times a base family, s a positive scalar function of t."""

    def __init__(self, base, scale):
        self.base = base
        self.n = base.n
        self.scale = scale if callable(scale) else (lambda t, s=scale: s)

    def class_at(self, t):
        s = float(self.scale(t))
        if s <= 0.0:
            raise ValueError("scale must stay positive, got %g at t=%g"
                             % (s, t))
        return s * self.base.class_at(t)

    def components_at(self, t, grid):
        if t < 0.0:
            raise ValueError("time %g out of range" % t)
        s = float(self.scale(t))
        if s <= 0.0:
            raise ValueError("scale must stay positive, got %g at t=%g"
                             % (s, t))
        comps = self.base.components_at(t, grid)
        if self.n == 1:
            return s * comps
        return tuple(s * c for c in comps)


class ShiftedFamily(_FamilyBase):
    """A base family plus one constant Hermitian matrix (e.g. eps Theta)."""

    def __init__(self, base, shift):
        self.base = base
        self.n = base.n
        self.shift = _as_matrix(shift, "shift")
        self._shift_comps = _matrix_components(self.shift, self.n)

    def class_at(self, t):
        return self.base.class_at(t) + self.shift

    def components_at(self, t, grid):
        comps = self.base.components_at(t, grid)
        if self.n == 1:
            return comps + self._shift_comps
        return tuple(c + s for c, s in zip(comps, self._shift_comps))


class CallableFamily(_FamilyBase):
    """An arbitrary Hermitian matrix path t -> A(t)."""

    def __init__(self, fn, perturbation=None):
        self.fn = fn
        self.perturbation = perturbation
        A0 = _as_matrix(fn(0.0), "A(0)")
        self.n = A0.shape[0]

    def class_at(self, t):
        return _as_matrix(self.fn(t), "A(t)")


def _sampled_components(family, t, grid):
    if grid is None:
        return _matrix_components(family.class_at(t), family.n)
    return family.components_at(t, grid)


def _pencil_range(P, Q, n):
    """Extremes of the generalized eigenvalues of P relative to Q.

    P, Q are kernel-layout components (scalars or arrays). Returns
    (gmin, gmax), or None when Q fails to be positive definite somewhere.
    """
    if n == 1:
        q = np.asarray(Q, dtype=np.float64)
        p = np.asarray(P, dtype=np.float64)
        if np.any(q <= 0.0):
            return None
        r = p / q
        return float(np.min(r)), float(np.max(r))
    q11, q22, qbr, qbi = [np.asarray(c, dtype=np.float64) for c in Q]
    p11, p22, pbr, pbi = [np.asarray(c, dtype=np.float64) for c in P]
    detq = q11 * q22 - (qbr * qbr + qbi * qbi)
    if np.any(q11 <= 0.0) or np.any(detq <= 0.0):
        return None
    detp = p11 * p22 - (pbr * pbr + pbi * pbi)
    s = p11 * q22 + p22 * q11 - 2.0 * (pbr * qbr + pbi * qbi)
    disc = np.sqrt(np.maximum(s * s - 4.0 * detq * detp, 0.0))
    lo = (s - disc) / (2.0 * detq)
    hi = (s + disc) / (2.0 * detq)
    return float(np.min(lo)), float(np.max(hi))


def regularity_modulus(family, eps, T, grid=None, samples_per_unit=64):
    """Smallest E with (1-E) omega_t <= omega_t' <= (1+E) omega_t.

    Pairs (t, t') are sampled with t in [0, T-2 eps] and |t'-t| < eps.
    Returns +inf (with a warning) if omega_t degenerates at a sample.
    """
    if not (0.0 < eps < T / 2.0):
        raise ValueError("need 0 < eps < T/2")
    times = _time_samples(T, samples_per_unit)
    comps = [_sampled_components(family, t, grid) for t in times]
    E = 0.0
    for i, t in enumerate(times):
        if t > T - 2.0 * eps + 1e-12:
            break
        for j, tp in enumerate(times):
            if abs(tp - t) >= eps or j == i:
                continue
            rng = _pencil_range(comps[j], comps[i], family.n)
            if rng is None:
                warnings.warn("degenerate background at t=%g" % t)
                return math.inf
            gmin, gmax = rng
            E = max(E, gmax - 1.0, 1.0 - gmin)
    return max(E, 0.0)


class VeryRegularReport:
    """Outcome of the lower-bound-against-omega_0 search."""

    def __init__(self, passed, eta, times, eps_values, failure=None):
        self.passed = passed
        self.eta = eta
        self.times = times
        self.eps_values = eps_values
        self.failure = failure


def very_regular_check(family, T, grid=None, samples_per_unit=64):
    """Search for eps(t) with omega_t >= (1-eps(t)) omega_0, eps(0)=0.

    Passes when sup eps < 1 (then eta = 1 - sup eps > 0) and the base
    time witnesses eps(0) = 0.
    """
    times = _time_samples(T, samples_per_unit)
    base = _sampled_components(family, 0.0, grid)
    eps_values = np.empty(len(times))
    for i, t in enumerate(times):
        rng = _pencil_range(_sampled_components(family, t, grid), base,
                            family.n)
        if rng is None:
            return VeryRegularReport(False, 0.0, times, None,
                                     failure="degenerate omega at t=%g" % t)
        eps_values[i] = max(0.0, 1.0 - rng[0])
    sup = float(np.max(eps_values))
    if eps_values[0] > 1e-12:
        return VeryRegularReport(False, 0.0, times, eps_values,
                                 failure="eps(0) = %g nonzero" % eps_values[0])
    if sup >= 1.0:
        return VeryRegularReport(False, 0.0, times, eps_values,
                                 failure="sup eps = %g >= 1" % sup)
    return VeryRegularReport(True, 1.0 - sup, times, eps_values)


def is_nondecreasing(family, T, grid=None, samples_per_unit=64, tol=1e-10):
    """Whether omega_t is non-decreasing in t on sampled consecutive pairs."""
    times = _time_samples(T, samples_per_unit)
    prev = _sampled_components(family, times[0], grid)
    for t in times[1:]:
        cur = _sampled_components(family, t, grid)
        if family.n == 1:
            dmin = float(np.min(np.asarray(cur) - np.asarray(prev)))
        else:
            d11, d22, dbr, dbi = [np.asarray(c) - np.asarray(p)
                                  for c, p in zip(cur, prev)]
            tr = d11 + d22
            df = d11 - d22
            disc = np.sqrt(df * df + 4.0 * (dbr * dbr + dbi * dbi))
            dmin = float(np.min(0.5 * (tr - disc)))
        if dmin < -tol:
            return False
        prev = cur
    return True
