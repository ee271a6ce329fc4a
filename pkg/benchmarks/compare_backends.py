"""Time the compiled kernels against the pure-numpy fallback.

Runs the quad-selection and normal-stage kernels, plus full end-to-end solves,
under both backends and prints a table with speedups. The native backend is
exercised in-process; the python backend numbers come from the same functions
in posekit._kernels._fallback, so both see identical inputs.

Usage: python3 benchmarks/compare_backends.py [--points N] [--repeats R]
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from posekit import _kernels
from posekit._kernels import _fallback
from posekit.quads import select_quads
from posekit.scene import default_intrinsics, make_random_target, project_target, random_pose
from posekit.solver import CorrespondenceSet, solve_pose


def _best_of(repeats, fn, *args):
    best = float("inf")
    out = None
    for _ in range(repeats):
        t0 = time.perf_counter()
        out = fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best, out


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--points", type=int, default=40,
                        help="target points for the kernel benchmarks (default 40)")
    parser.add_argument("--repeats", type=int, default=5,
                        help="repetitions per measurement, best-of (default 5)")
    args = parser.parse_args()

    if _kernels.backend_name() != "native":
        print("native backend not built; run `pip install -e . --no-build-isolation` "
              "or `python3 setup.py build_ext --inplace` first")
        return

    native = _kernels._impl
    rng = np.random.default_rng(0)
    target = make_random_target(args.points, extent=2.0, rng=rng)
    pose = random_pose(rng, target)
    _, bearings = project_target(pose, target, default_intrinsics())
    points = target.points

    rows = []

    def bench(label, fn_native, fn_python, *fargs):
        t_nat, out_nat = _best_of(args.repeats, fn_native, *fargs)
        t_py, out_py = _best_of(args.repeats, fn_python, *fargs)
        rows.append((label, t_py, t_nat, t_py / t_nat))
        return out_nat, out_py

    (nat_quads, _), _ = bench(
        f"top_spread_quads (n={args.points}, k=20)",
        native.top_spread_quads, _fallback.top_spread_quads, points, 1e-9, 20,
    )
    bench(
        f"enumerate_valid_quads (n={args.points}, all)",
        native.enumerate_valid_quads, _fallback.enumerate_valid_quads, points, 1e-9, -1,
    )
    bench(
        f"quad_normal_batch ({nat_quads.shape[0]} quads)",
        native.quad_normal_batch, _fallback.quad_normal_batch, points, bearings, nat_quads,
    )

    # end-to-end: same solve under each backend via the dispatch seam
    corr = CorrespondenceSet(points, bearings)
    saved = _kernels._impl
    try:
        t_nat, _ = _best_of(args.repeats, solve_pose, corr)
        _kernels._impl = _fallback
        _kernels.quad_normal_batch = _fallback.quad_normal_batch
        _kernels.top_spread_quads = _fallback.top_spread_quads
        _kernels.enumerate_valid_quads = _fallback.enumerate_valid_quads
        t_py, _ = _best_of(args.repeats, solve_pose, corr)
    finally:
        _kernels._impl = saved
        _kernels.quad_normal_batch = saved.quad_normal_batch
        _kernels.top_spread_quads = saved.top_spread_quads
        _kernels.enumerate_valid_quads = saved.enumerate_valid_quads
    rows.append((f"solve_pose (n={args.points})", t_py, t_nat, t_py / t_nat))

    width = max(len(r[0]) for r in rows)
    print(f"{'benchmark':<{width}}  {'python':>10}  {'native':>10}  {'speedup':>8}")
    for label, t_py, t_nat, speed in rows:
        print(f"{label:<{width}}  {t_py * 1e3:>8.3f}ms  {t_nat * 1e3:>8.3f}ms  {speed:>7.1f}x")


if __name__ == "__main__":
    main()
