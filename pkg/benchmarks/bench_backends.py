"""Time the stepping kernels: compiled extension vs numpy fallback.

Runs the raw right-hand-side kernels of both backends on identical data
and reports per-call times and the speedup. The two backends must agree
on the returned scalars to near machine precision; the benchmark aborts
if they do not, since a fast wrong kernel is not interesting.

Usage: python3 benchmarks/bench_backends.py [--reps 50] [--n1-sizes 64,128,256]
"""

import argparse
import time

import numpy as np

from maflow import _kernels_np

try:
    from maflow import _core
except ImportError:
    _core = None


def _time_call(fn, args, reps):
    fn(*args)  # warm up
    best = float("inf")
    for _ in range(reps):
        t0 = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best


def _n1_args(m, rng):
    h = 1.0 / m
    phi = 0.05 * np.cos(2.0 * np.pi * np.arange(m) * h)[:, None] \
        + np.zeros((m, m))
    phi += 0.01 * rng.standard_normal((m, m))
    logmu = np.zeros((m, m))
    out = np.empty((m, m))
    ih2 = np.array([1.0 / (h * h), 1.0 / (h * h)])
    return (np.ascontiguousarray(phi), 1.0, logmu, None, 0.5, 0.1,
            ih2, 1e-12, out)

def _n2_args(m, rng):
    h = 1.0 / m
    shape = (m, m, m, m)
    phi = 0.01 * rng.standard_normal(shape)
    logmu = np.zeros(shape)
    out = np.empty(shape)
    ih = np.array([1.0 / h] * 4)
    return (np.ascontiguousarray(phi), 1.0, 1.0, 0.0, 0.0, logmu, None,
            0.5, 0.1, ih, 1e-12, out)


def _check_agreement(res_a, res_b, out_a, out_b):
    for a, b in zip(res_a[:3], res_b[:3]):
        if abs(a - b) > 1e-9 * max(1.0, abs(a)):
            raise SystemExit("backend mismatch: %r vs %r" % (res_a, res_b))
    if res_a[3] != res_b[3]:
        raise SystemExit("floor count mismatch: %d vs %d"
                         % (res_a[3], res_b[3]))
    gap = float(np.max(np.abs(out_a - out_b)))
    if gap > 1e-9:
        raise SystemExit("rhs field mismatch: sup %g" % gap)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--reps", type=int, default=50)
    ap.add_argument("--n1-sizes", default="64,128,256")
    ap.add_argument("--n2-sizes", default="16,32")
    args = ap.parse_args()

    if _core is None:
        print("compiled backend unavailable; timing the numpy fallback only")

    rng = np.random.default_rng(0)
    rows = []
    for m in [int(s) for s in args.n1_sizes.split(",") if s]:
        ka = _n1_args(m, rng)
        t_np = _time_call(_kernels_np.rhs_n1, ka, args.reps)
        row = ("n=1 m=%d" % m, t_np, None)
        if _core is not None:
            out_np = ka[-1].copy()
            res_np = _kernels_np.rhs_n1(*ka)
            res_c = _core.rhs_n1(*ka)
            _check_agreement(res_np, res_c, out_np, ka[-1])
            row = (row[0], t_np, _time_call(_core.rhs_n1, ka, args.reps))
        rows.append(row)
    for m in [int(s) for s in args.n2_sizes.split(",") if s]:
        ka = _n2_args(m, rng)
        t_np = _time_call(_kernels_np.rhs_n2, ka, max(3, args.reps // 10))
        row = ("n=2 m=%d" % m, t_np, None)
        if _core is not None:
            out_np = ka[-1].copy()
            res_np = _kernels_np.rhs_n2(*ka)
            res_c = _core.rhs_n2(*ka)
            _check_agreement(res_np, res_c, out_np, ka[-1])
            row = (row[0], t_np,
                   _time_call(_core.rhs_n2, ka, max(3, args.reps // 10)))
        rows.append(row)

    print("%-12s %12s %12s %9s" % ("case", "numpy ms", "compiled ms",
                                   "speedup"))
    for label, t_np, t_c in rows:
        if t_c is None:
            print("%-12s %12.3f %12s %9s" % (label, 1e3 * t_np, "-", "-"))
        else:
            print("%-12s %12.3f %12.3f %8.1fx"
                  % (label, 1e3 * t_np, 1e3 * t_c, t_np / t_c))


if __name__ == "__main__":
    main()
