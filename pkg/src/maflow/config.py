"""Run configuration: JSON files, dotted overrides, strict key checking.

The documented key tree is validated recursively; any key outside it is
rejected by name so typos never silently change a run.
"""

import json
import math

import numpy as np

from . import grid as gridmod
from . import background as bgmod
from . import parabolic


class ConfigError(ValueError):
    """Malformed or unknown configuration content."""


# Leaf sentinel: value checked at build time, not by the key walker.
_LEAF = None

SCHEMA = {
    "grid": {"n": _LEAF, "m": _LEAF, "periods": _LEAF},
    "family": {
        "rule": _LEAF, "A": _LEAF, "B": _LEAF,
        "perturbation": {"name": _LEAF, "amplitude": _LEAF,
                         "frequency": _LEAF, "axis": _LEAF, "decay": _LEAF},
    },
    "density": {
        "kind": _LEAF, "base": _LEAF, "terms": _LEAF,
        "e_u": {"form": _LEAF, "weight": _LEAF},
        "disc": {"center": _LEAF, "radius": _LEAF},
    },
    "forcing": {"kind": _LEAF, "alpha": _LEAF},
    "solver": {
        "dt_rule": _LEAF, "dt": _LEAF, "cfl_c": _LEAF, "mono_c": _LEAF,
        "T": _LEAF, "det_floor": _LEAF, "mu_floor": _LEAF,
        "dt_eig_floor": _LEAF, "snapshot_times": _LEAF,
        "stationarity_tol": _LEAF, "max_steps": _LEAF, "tol_psh": _LEAF,
    },
    "initial": {"base": _LEAF, "terms": _LEAF},
    "scenario": {"name": _LEAF, "resolution": _LEAF, "resolutions": _LEAF,
                 "T": _LEAF, "eps": _LEAF, "epsilons": _LEAF, "delta": _LEAF,
                 "n1_resolutions": _LEAF, "n2_resolutions": _LEAF},
    "output": {"dir": _LEAF},
}

DEFAULTS = {
    "grid": {"n": 1, "m": 64, "periods": 1.0},
    "family": {"rule": "constant", "A": [[[1.0, 0.0]]]},
    "density": {"kind": "positive", "base": 1.0},
    "forcing": {"kind": "linear", "alpha": 1.0},
    "solver": {"dt_rule": "cfl", "T": 1.0},
    "output": {"dir": "maflow_out"},
}


def validate_keys(cfg, schema=None, prefix=""):
    if schema is None:
        schema = SCHEMA
    if not isinstance(cfg, dict):
        raise ConfigError("expected a table at %r" % (prefix or "<root>"))
    for key, value in cfg.items():
        path = prefix + key if not prefix else prefix + "." + key
        if key not in schema:
            raise ConfigError("unknown config key: %s" % path)
        sub = schema[key]
        if isinstance(sub, dict):
            validate_keys(value, sub, path)
    return cfg


def load_config(path):
    with open(path) as fh:
        try:
            cfg = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ConfigError("config %s is not valid JSON: %s"
                              % (path, exc)) from exc
    return validate_keys(cfg)


def apply_overrides(cfg, assignments):
    """Apply --set key=value pairs; values parse as JSON, else strings."""
    for item in assignments:
        if "=" not in item:
            raise ConfigError("override %r is not of the form key=value"
                              % item)
        key, raw = item.split("=", 1)
        try:
            value = json.loads(raw)
        except json.JSONDecodeError:
            value = raw
        parts = key.split(".")
        node = cfg
        for part in parts[:-1]:
            node = node.setdefault(part, {})
            if not isinstance(node, dict):
                raise ConfigError("override %s crosses a non-table key"
                                  % key)
        node[parts[-1]] = value
    return validate_keys(cfg)


def merged_defaults(cfg):
    out = {}
    for section, defaults in DEFAULTS.items():
        out[section] = dict(defaults)
        out[section].update(cfg.get(section, {}))
    for section in cfg:
        if section not in out:
            out[section] = cfg[section]
    return out


def _parse_matrix(spec, n, name):
    """Row-major entries, each a [real, imag] pair."""
    try:
        arr = np.asarray(spec, dtype=np.float64)
    except (TypeError, ValueError) as exc:
        raise ConfigError("family.%s is not numeric" % name) from exc
    if arr.shape != (n, n, 2):
        raise ConfigError(
            "family.%s must be %dx%d entries of [re, im] pairs" % (name, n, n))
    return arr[..., 0] + 1j * arr[..., 1]


def build_grid(cfg):
    sec = cfg.get("grid", {})
    n = int(sec.get("n", 1))
    m = int(sec.get("m", 64))
    periods = sec.get("periods", 1.0)
    try:
        return gridmod.TorusGrid(n, m, periods)
    except ValueError as exc:
        raise ConfigError("grid: %s" % exc) from exc


def build_family(cfg, grid):
    sec = cfg.get("family", {})
    rule = sec.get("rule", "constant")
    A = _parse_matrix(sec.get("A", [[[1.0, 0.0]]] if grid.n == 1 else None),
                      grid.n, "A")
    pert = None
    if "perturbation" in sec:
        psec = sec["perturbation"]
        name = psec.get("name", "cosine_bump")
        if name not in bgmod.PERTURBATIONS:
            raise ConfigError("unknown family.perturbation.name %r" % name)
        kwargs = {k: v for k, v in psec.items() if k != "name"}
        pert = bgmod.PERTURBATIONS[name](**kwargs)
    if rule == "constant" and "B" not in sec:
        schedule = bgmod.ClassSchedule(A, rule="constant")
    else:
        if "B" not in sec:
            raise ConfigError("family.rule %r needs family.B" % rule)
        B = _parse_matrix(sec["B"], grid.n, "B")
        schedule = bgmod.ClassSchedule(A, B, rule=rule)
    try:
        return bgmod.BackgroundFamily(schedule, perturbation=pert)
    except ValueError as exc:
        raise ConfigError("family: %s" % exc) from exc


def _terms_array(grid, base, terms, where):
    vals = np.full(grid.shape, float(base))
    for k, term in enumerate(terms or []):
        if not isinstance(term, dict):
            raise ConfigError("%s.terms[%d] must be a table" % (where, k))
        kind = term.get("type", "cos")
        axis = int(term.get("axis", 0))
        freq = float(term.get("frequency", 1.0))
        amp = float(term.get("amplitude", 0.0))
        if kind not in ("cos", "sin"):
            raise ConfigError("%s.terms[%d].type must be cos or sin"
                              % (where, k))
        if not 0 <= axis < 2 * grid.n:
            raise ConfigError("%s.terms[%d].axis out of range" % (where, k))
        x = grid.axis_coords(axis)
        arg = 2.0 * math.pi * freq * x / grid.periods[axis]
        vals = vals + amp * (np.cos(arg) if kind == "cos" else np.sin(arg))
    return np.ascontiguousarray(vals)


def build_density(cfg, grid):
    sec = cfg.get("density", {})
    kind = sec.get("kind", "positive")
    base = sec.get("base", 1.0)
    f = _terms_array(grid, base, sec.get("terms"), "density")
    kwargs = {}
    if kind == "canonical":
        esec = sec.get("e_u", {"form": "sin_squares", "weight": 0.5})
        if esec.get("form", "sin_squares") != "sin_squares":
            raise ConfigError("unknown density.e_u.form %r" % esec.get("form"))
        w = float(esec.get("weight", 0.5))
        e_u = np.zeros(grid.shape)
        for axis in range(2 * grid.n):
            x = grid.axis_coords(axis)
            e_u = e_u + np.sin(math.pi * x / grid.periods[axis]) ** 2
        kwargs["e_u"] = np.ascontiguousarray(w * e_u)
    elif kind == "open_vanishing":
        dsec = sec.get("disc")
        if dsec is None:
            mask = np.zeros(grid.shape, dtype=bool)
        else:
            center = dsec.get("center", [0.5] * (2 * grid.n))
            radius = float(dsec.get("radius", 0.1))
            r2 = np.zeros(grid.shape)
            for axis in range(2 * grid.n):
                d = grid.axis_coords(axis) - float(center[axis])
                L = grid.periods[axis]
                d = d - L * np.round(d / L)
                r2 = r2 + d * d
            mask = r2 < radius * radius
        kwargs["mask"] = mask
    elif kind != "positive":
        raise ConfigError("unknown density.kind %r" % kind)
    try:
        return parabolic.DensitySpec(kind=kind, f=f, **kwargs)
    except ValueError as exc:
        raise ConfigError("density: %s" % exc) from exc


def build_forcing(cfg):
    sec = cfg.get("forcing", {})
    kind = sec.get("kind", "linear")
    if kind != "linear":
        raise ConfigError("only forcing.kind = linear is configurable")
    try:
        return parabolic.ForcingSpec("linear",
                                     alpha=float(sec.get("alpha", 1.0)))
    except ValueError as exc:
        raise ConfigError("forcing: %s" % exc) from exc


def build_solver_config(cfg):
    sec = cfg.get("solver", {})
    kwargs = {}
    for key in ("dt_rule", "dt", "cfl_c", "mono_c", "det_floor", "mu_floor",
                "dt_eig_floor", "snapshot_times", "stationarity_tol",
                "max_steps"):
        if key in sec:
            kwargs[key] = sec[key]
    try:
        return parabolic.SolverConfig(**kwargs)
    except (TypeError, ValueError) as exc:
        raise ConfigError("solver: %s" % exc) from exc


def build_phi0(cfg, grid):
    sec = cfg.get("initial", {})
    vals = _terms_array(grid, sec.get("base", 0.0), sec.get("terms"),
                        "initial")
    return gridmod.ScalarField(grid, vals)


def build_problem(cfg):
    grid = build_grid(cfg)
    family = build_family(cfg, grid)
    mu = build_density(cfg, grid)
    forcing = build_forcing(cfg)
    phi0 = build_phi0(cfg, grid)
    T = float(cfg.get("solver", {}).get("T", 1.0))
    tol_psh = float(cfg.get("solver", {}).get("tol_psh", 1e-8))
    return parabolic.FlowProblem(family, mu, forcing, phi0, T,
                                 tol_psh=tol_psh)
