"""Command line front end: solve, static, verify, scenario, cohomology."""

import argparse
import math
import os
import sys

import numpy as np

from . import background as bgmod
from . import config as cfgmod
from . import elliptic
from . import grid as gridmod
from . import parabolic
from . import scenarios as scmod
from . import verify as vermod

_KEY_HELP = """\
config keys (JSON; every key below is optional, unknown keys are rejected):
  grid.n (1)                 complex dimension, 1 or 2
  grid.m (64)                nodes per axis, even
  grid.periods (1.0)         scalar or one entry per real axis
  family.rule (constant)     constant | nkrf | krf
  family.A                   class matrix, entries as [re, im] pairs
  family.B                   target class matrix (nkrf / krf)
  family.perturbation        {name: cosine_bump, amplitude, frequency,
                              axis, decay}
  density.kind (positive)    positive | canonical | open_vanishing
  density.base (1.0)         constant part of the density factor
  density.terms ([])         [{type: cos|sin, axis, frequency, amplitude}]
  density.e_u                {form: sin_squares, weight} (canonical)
  density.disc               {center, radius} vanishing set (open_vanishing)
  forcing.kind (linear)      linear only
  forcing.alpha (1.0)        monotone slope, >= 0
  solver.dt_rule (cfl)       fixed | cfl | monotone
  solver.dt                  step size for the fixed rule
  solver.cfl_c (0.4)         cfl constant
  solver.mono_c (0.9)        monotone-rule constant
  solver.T (1.0)             time horizon
  solver.det_floor (1e-12)   clamp under the log determinant
  solver.mu_floor (1e-12)    clamp under the log density
  solver.dt_eig_floor        eigenvalue floor for step-size rules
  solver.snapshot_times      list of times to record
  solver.stationarity_tol    early stop on sup |rhs| (1e-6)
  solver.max_steps           step budget
  solver.tol_psh             admissibility tolerance for phi0 (1e-8)
  initial.base (0.0)         constant part of phi0
  initial.terms ([])         same shape as density.terms
  scenario.name              comparison_suite | canonical_model | calabi_yau
                             | nonexistence | convergence | flips
  scenario.*                 forwarded to the scenario (resolution, T, ...)
  output.dir (maflow_out)    results directory (MAFLOW_OUTPUT_DIR overrides)
"""


def _fmt(v):
    if isinstance(v, float):
        if math.isinf(v):
            return "infinity" if v > 0 else "-infinity"
        return "%.9g" % v
    return str(v)


class _Parser(argparse.ArgumentParser):
    # argparse exits with its own code on usage errors; route to exit 1
    def error(self, message):
        raise cfgmod.ConfigError(message)


def _build_parser():
    parser = _Parser(
        prog="maflow",
        description="degenerate parabolic complex Monge-Ampere flows "
                    "on flat torus models",
        epilog=_KEY_HELP,
        formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = parser.add_subparsers(dest="command", metavar="command")

    def common(p):
        p.add_argument("config", help="path to a JSON run configuration")
        p.add_argument("--set", action="append", default=[],
                       metavar="KEY=VALUE", dest="overrides",
                       help="override a config key (dotted path, JSON value)")
        p.add_argument("--threads", type=int, default=os.cpu_count(),
                       help="worker threads for independent runs "
                            "(default: machine parallelism)")

    p = sub.add_parser("solve", help="run the parabolic flow")
    common(p)
    p = sub.add_parser("static", help="solve the static equation")
    common(p)
    p = sub.add_parser("verify", help="certificate checks on saved fields")
    common(p)
    p.add_argument("fields", nargs="+",
                   help="field snapshot files (one: constant-in-time "
                        "candidate; several: trajectory at snapshot times)")
    p.add_argument("--rate", type=float, default=0.0,
                   help="linear drift rate for a single-field candidate")
    p.add_argument("--kind", choices=("sub", "super", "both"),
                   default="both", help="which certificate to check")
    p = sub.add_parser("scenario", help="run a named scenario")
    common(p)
    p = sub.add_parser("cohomology", help="class schedule diagnostics")
    common(p)
    return parser


def _load(args):
    cfg = cfgmod.load_config(args.config)
    cfg = cfgmod.apply_overrides(cfg, args.overrides)
    return cfg


def _output_dir(cfg):
    env = os.environ.get("MAFLOW_OUTPUT_DIR")
    if env:
        return env
    return cfg.get("output", {}).get("dir", "maflow_out")


def cmd_solve(args):
    cfg = _load(args)
    problem = cfgmod.build_problem(cfg)
    scfg = cfgmod.build_solver_config(cfg)
    traj = parabolic.solve(problem, scfg)
    out = _output_dir(cfg)
    manifest = traj.export(out)
    final = traj.final
    print("steps %d" % traj.steps)
    print("final sup |phi| %s" % _fmt(float(np.max(np.abs(final.values)))))
    print("floor activations %d" % traj.floor_activations)
    print("final max |rhs| %s" % _fmt(traj.final_max_abs_rhs))
    print("wrote %s" % manifest)
    return 0


def _static_problem(cfg):
    grid = cfgmod.build_grid(cfg)
    family = cfgmod.build_family(cfg, grid)
    mu = cfgmod.build_density(cfg, grid)
    alpha = float(cfg.get("forcing", {}).get("alpha", 1.0))
    if family.perturbation is not None:
        omega = family.omega_at(0.0, grid)
    else:
        omega = family.schedule.class_at(0.0)
    return elliptic.StaticProblem(omega, mu, alpha=alpha, grid=grid), grid


def cmd_static(args):
    cfg = _load(args)
    sp, grid = _static_problem(cfg)
    sec = cfg.get("solver", {})
    scfg = elliptic.default_static_config(
        grid, stationarity_tol=float(sec.get("stationarity_tol", 1e-6)),
        dt_eig_floor=sec.get("dt_eig_floor"))
    updates = {k: sec[k] for k in ("max_steps", "cfl_c", "dt_rule", "dt")
               if k in sec}
    if updates:
        scfg = scfg.replace(**updates)
    phi = elliptic.solve_static(sp, config=scfg)
    out = _output_dir(cfg)
    os.makedirs(out, exist_ok=True)
    path = os.path.join(out, "static.maf")
    gridmod.save_field(phi, path)
    print("steps %d" % phi.steps)
    print("residual %s" % _fmt(phi.residual))
    print("wrote %s" % path)
    return 0


def cmd_verify(args):
    cfg = _load(args)
    problem = cfgmod.build_problem(cfg)
    fields = []
    for path in args.fields:
        field = gridmod.load_field(path)
        if not field.grid.compatible(problem.grid):
            raise cfgmod.ConfigError(
                "field %s grid does not match the configured grid" % path)
        fields.append(field)
    sec = cfg.get("solver", {})
    dt_for_tol = float(sec.get("dt", 0.0) or 0.0)
    tol = 10.0 * (problem.grid.h ** 2 + dt_for_tol)
    if len(fields) == 1:
        candidate = vermod.AffineBarrier(problem.grid, fields[0], args.rate)
    else:
        times = sec.get("snapshot_times")
        if times is None:
            times = list(np.linspace(0.0, problem.T, len(fields)))
        if len(times) != len(fields):
            raise cfgmod.ConfigError(
                "got %d fields but %d snapshot times"
                % (len(fields), len(times)))
        scfg = cfgmod.build_solver_config(cfg)
        candidate = parabolic.Trajectory(problem, scfg)
        for t, field in zip(times, fields):
            candidate.record(float(t), field.values, 0, 0.0)
    ok = True
    if args.kind in ("sub", "both"):
        rep = vermod.check_subsolution(candidate, problem, tol)
        ok = ok and rep.passed
        print("subsolution: worst residual %s at node %s -> %s"
              % (_fmt(rep.worst_residual), rep.worst_node,
                 "PASS" if rep.passed else "FAIL"))
    if args.kind in ("super", "both"):
        rep = vermod.check_supersolution(candidate, problem, tol)
        ok = ok and rep.passed
        print("supersolution: worst residual %s at node %s -> %s"
              % (_fmt(rep.worst_residual), rep.worst_node,
                 "PASS" if rep.passed else "FAIL"))
    return 0 if ok else 2


def cmd_scenario(args):
    cfg = _load(args)
    sec = cfg.get("scenario", {})
    name = sec.get("name")
    if not name:
        raise cfgmod.ConfigError("scenario.name is required")
    params = {k: v for k, v in sec.items() if k != "name"}
    scenario = scmod.get_scenario(name, **params)
    out = os.path.join(_output_dir(cfg), name)
    result = scenario.run(output_dir=out, threads=max(1, args.threads))
    for c in result.checks:
        print("%-34s value %-14s tol %-12s %s"
              % (c.name, _fmt(c.value), _fmt(c.tolerance),
                 "PASS" if c.passed else "FAIL"))
    print("scenario %s: %s (%.9g s, wrote %s)"
          % (result.name, "PASS" if result.passed else "FAIL",
             result.elapsed, out))
    return 0 if result.passed else 2


def cmd_cohomology(args):
    cfg = _load(args)
    grid = cfgmod.build_grid(cfg)
    family = cfgmod.build_family(cfg, grid)
    schedule = family.schedule
    if schedule.rule == "constant":
        print("t_max: undefined (constant schedule never degenerates)")
    else:
        print("t_max: %s" % _fmt(bgmod.t_max(schedule)))
    T = float(cfg.get("solver", {}).get("T", 1.0))
    print("regularity modulus over [0, %s]:" % _fmt(T))
    for eps in (T / 8.0, T / 16.0, T / 32.0):
        val = bgmod.regularity_modulus(family, eps, T, grid=grid)
        print("  E(%s) = %s" % (_fmt(eps), _fmt(val)))
    report = bgmod.very_regular_check(family, T, grid=grid)
    if report.passed:
        print("very regular: PASS (eta = %s)" % _fmt(report.eta))
    else:
        print("very regular: FAIL (%s)" % report.failure)
    return 0


_COMMANDS = {
    "solve": cmd_solve,
    "static": cmd_static,
    "verify": cmd_verify,
    "scenario": cmd_scenario,
    "cohomology": cmd_cohomology,
}


def main(argv=None):
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command is None:
            parser.print_usage()
            return 1
        return _COMMANDS[args.command](args)
    except cfgmod.ConfigError as exc:
        print("error: %s" % exc, file=sys.stderr)
        return 1
    except (parabolic.BlowUpError, parabolic.TimeStepUnderflow,
            parabolic.StepBudgetExceeded,
            elliptic.StaticNonConvergence) as exc:
        print("error: %s" % exc, file=sys.stderr)
        return 2
    except ValueError as exc:
        print("error: %s" % exc, file=sys.stderr)
        return 1
    except Exception as exc:  # last resort: report, never traceback
        print("error: %s: %s" % (type(exc).__name__, exc), file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
