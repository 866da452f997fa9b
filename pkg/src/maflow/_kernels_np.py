"""Pure numpy stepping kernels, the fallback when the compiled core is
unavailable. Same call contract and evaluation order as maflow._core."""

import numpy as np


def _sd(v, axis, inv_h2):
    return (np.roll(v, -1, axis=axis) + np.roll(v, 1, axis=axis)
            - 2.0 * v) * inv_h2


def _cross(v, axis_a, axis_b, q):
    pp = np.roll(np.roll(v, -1, axis=axis_a), -1, axis=axis_b)
    pm = np.roll(np.roll(v, -1, axis=axis_a), 1, axis=axis_b)
    mp = np.roll(np.roll(v, 1, axis=axis_a), -1, axis=axis_b)
    mm = np.roll(np.roll(v, 1, axis=axis_a), 1, axis=axis_b)
    return (pp - pm - mp + mm) * q


def _finish(e_min, rhs, det_plus, det_floor, out):
    np.copyto(out, rhs)
    floor_hits = int(np.count_nonzero(det_plus < det_floor))
    return (float(e_min), float(np.max(np.abs(rhs))), float(np.sum(rhs)),
            floor_hits)


def rhs_n1(phi, w, logmu, g, alpha, c0, ih2, det_floor, out):
    """Flow right-hand side on an n=1 grid. See maflow._core.rhs_n1."""
    lap = _sd(phi, 0, ih2[0]) + _sd(phi, 1, ih2[1])
    e = w + 0.25 * lap
    det_plus = np.maximum(e, 0.0)
    dc = np.maximum(det_plus, det_floor)
    rhs = np.log(dc) - logmu - c0 - alpha * phi
    if g is not None:
        rhs -= g
    return _finish(np.min(e), rhs, det_plus, det_floor, out)


def rhs_n2(phi, w11, w22, wbr, wbi, logmu, g, alpha, c0, ih, det_floor, out):
    """Flow right-hand side on an n=2 grid. See maflow._core.rhs_n2."""
    ih2 = [x * x for x in ih]
    p11 = w11 + 0.25 * (_sd(phi, 0, ih2[0]) + _sd(phi, 1, ih2[1]))
    p22 = w22 + 0.25 * (_sd(phi, 2, ih2[2]) + _sd(phi, 3, ih2[3]))
    br = wbr + 0.25 * (_cross(phi, 0, 2, 0.25 * ih[0] * ih[2])
                       + _cross(phi, 1, 3, 0.25 * ih[1] * ih[3]))
    bi = wbi + 0.25 * (_cross(phi, 0, 3, 0.25 * ih[0] * ih[3])
                       - _cross(phi, 1, 2, 0.25 * ih[1] * ih[2]))
    tr = p11 + p22
    df = p11 - p22
    disc = np.sqrt(df * df + 4.0 * (br * br + bi * bi))
    lam1 = 0.5 * (tr + disc)
    lam2 = 0.5 * (tr - disc)
    det_plus = np.maximum(lam1, 0.0) * np.maximum(lam2, 0.0)
    dc = np.maximum(det_plus, det_floor)
    rhs = np.log(dc) - logmu - c0 - alpha * phi
    if g is not None:
        rhs -= g
    return _finish(np.min(lam2), rhs, det_plus, det_floor, out)
