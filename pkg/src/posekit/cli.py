"""Command-line interface: solve, simulate, bench, plot-data."""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import _kernels
from .bench import METHODS, SweepSpec, rmse_metrics, run_sweep, trajectory_series
from .errors import PoseKitError
from .geometry import rotation_to_euler
from .io import (
    read_correspondence_file,
    read_scenario,
    write_correspondence_file,
    write_ground_truth,
    write_series_csv,
    write_summary_csv,
    write_trial_csv,
)
from .normal import SmoothedNormal
from .scene import (
    NoiseModel,
    PoseConstraints,
    default_intrinsics,
    make_grid_target,
    perturb_pixels,
    project_target,
    random_pose,
    trial_rng,
)
from .solver import DISTANCE_WEIGHTINGS, CorrespondenceSet, SolverConfig, solve_pose

CONVENTION_NOTE = (
    "bearings are unit vectors in the camera frame; normal is the target-plane "
    "unit normal in camera coordinates, signed toward the camera; distance is the "
    "perpendicular camera-to-plane distance; a target point x maps to camera "
    "coordinates rotation^T @ [x, 0] - position, so the camera center sits at "
    "rotation @ position in target coordinates; euler_deg is intrinsic "
    "yaw(z)-pitch(y)-roll(x) of rotation"
)


def _add_target_args(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--rows", type=int, default=5, help="grid target rows (default 5)")
    parser.add_argument("--cols", type=int, default=5, help="grid target columns (default 5)")
    parser.add_argument("--pitch", type=float, default=0.4,
                        help="grid spacing in meters (default 0.4)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="posekit",
        description="Planar pose estimation from point correspondences.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_solve = sub.add_parser("solve", help="solve poses from a correspondence JSON file")
    p_solve.add_argument("input", help="correspondence JSON file")
    p_solve.add_argument("--fusion", choices=METHODS, default="algebraic",
                         help="normal fusion mode (default algebraic)")
    p_solve.add_argument("--max-quads", type=int, default=20,
                         help="quad budget for the normal stage (default 20)")
    p_solve.add_argument("--d-weighting", choices=DISTANCE_WEIGHTINGS, default="uniform",
                         help="per-point distance averaging (default uniform)")
    p_solve.add_argument("--quad-strategy", choices=("spread-first", "all"),
                         default="spread-first", help="quad selection strategy")
    p_solve.add_argument("--out", help="write the JSON result here instead of stdout")
    p_solve.set_defaults(func=_cmd_solve)

    p_sim = sub.add_parser("simulate", help="generate a synthetic scene with ground truth")
    _add_target_args(p_sim)
    p_sim.add_argument("--sigma", type=float, default=0.5,
                       help="pixel noise standard deviation (default 0.5)")
    p_sim.add_argument("--frames", type=int, default=1,
                       help="noisy frames of the same pose (default 1)")
    p_sim.add_argument("--seed", type=int, default=0, help="master seed (default 0)")
    p_sim.add_argument("--d-over-extent", type=float, default=3.0,
                       help="camera distance as a multiple of target size (default 3)")
    p_sim.add_argument("--max-tilt", type=float, default=0.5,
                       help="maximum tilt from the plane normal in radians (default 0.5)")
    p_sim.add_argument("--out-dir", required=True,
                       help="directory for correspondences.json and truth.json")
    p_sim.set_defaults(func=_cmd_simulate)

    p_bench = sub.add_parser("bench", help="run a Monte-Carlo sweep from a scenario file")
    p_bench.add_argument("scenario", help="scenario JSON file")
    p_bench.add_argument("--out-dir", required=True,
                         help="directory for trials.csv and summary.csv")
    p_bench.add_argument("--threads", type=int, default=None,
                         help="worker threads (default: POSEKIT_THREADS or CPU count)")
    p_bench.add_argument("--timing", action="store_true",
                         help="record wall-clock solve times (off by default so "
                              "output is byte-reproducible)")
    p_bench.set_defaults(func=_cmd_bench)

    p_plot = sub.add_parser("plot-data",
                            help="emit truth-vs-estimate series along a camera path")
    _add_target_args(p_plot)
    p_plot.add_argument("--sigma", type=float, default=0.5,
                        help="pixel noise standard deviation (default 0.5)")
    p_plot.add_argument("--frames", type=int, default=60,
                        help="number of frames along the path (default 60)")
    p_plot.add_argument("--methods", default="algebraic,smooth",
                        help="comma-separated methods (default algebraic,smooth)")
    p_plot.add_argument("--seed", type=int, default=0, help="master seed (default 0)")
    p_plot.add_argument("--out", required=True, help="output CSV path")
    p_plot.set_defaults(func=_cmd_plot_data)

    return parser


def _solution_json(solution, n_points: int) -> dict:
    euler = rotation_to_euler(solution.rotation)
    spread = solution.per_point_distance
    return {
        "normal": [float(v) for v in solution.normal],
        "distance": float(solution.distance),
        "position": [float(v) for v in solution.position],
        "target_frame_position": [float(v) for v in solution.target_frame_position],
        "rotation": [[float(v) for v in row] for row in solution.rotation],
        "euler_deg": {
            "roll": float(np.degrees(euler[0])),
            "pitch": float(np.degrees(euler[1])),
            "yaw": float(np.degrees(euler[2])),
        },
        "diagnostics": {
            "n_points": n_points,
            "excluded_indices": list(solution.excluded_indices),
            "distance_spread_m": float(np.ptp(spread)) if spread.size else 0.0,
            "backend": _kernels.backend_name(),
        },
    }


def _cmd_solve(args) -> int:
    data = read_correspondence_file(args.input)
    config = SolverConfig(
        normal_fusion=args.fusion,
        max_quads=args.max_quads,
        distance_weighting=args.d_weighting,
        quad_strategy=args.quad_strategy,
    )
    session = SmoothedNormal() if args.fusion == "smooth" else None
    frames = []
    for index, bearings in enumerate(data.frames):
        try:
            solution = solve_pose(
                CorrespondenceSet(data.points, bearings), config, session
            )
        except PoseKitError as exc:
            record = {"error": type(exc).__name__, "message": str(exc), "frame": index}
            print(json.dumps(record, indent=2, sort_keys=True))
            return 3
        frames.append(_solution_json(solution, data.points.shape[0]))
    doc = {"convention": CONVENTION_NOTE, "fusion": args.fusion, "frames": frames}
    text = json.dumps(doc, indent=2, sort_keys=True) + "\n"
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
        print(f"wrote {args.out} ({len(frames)} frame(s))")
    else:
        sys.stdout.write(text)
    return 0


def _cmd_simulate(args) -> int:
    target = make_grid_target(rows=args.rows, cols=args.cols, pitch=args.pitch)
    intr = default_intrinsics()
    distance = args.d_over_extent * target.size
    constraints = PoseConstraints(
        d_range=(distance, distance),
        max_tilt=args.max_tilt,
        lateral_range=0.25 * target.size,
    )
    pose = random_pose(trial_rng(args.seed, 0), target, constraints, intr)
    pixels, _ = project_target(pose, target, intr)
    noise = NoiseModel(sigma_px=args.sigma)
    frames = [
        perturb_pixels(pixels, noise, rng=trial_rng(args.seed, 1, frame))
        for frame in range(args.frames)
    ]
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    corr_path = out_dir / "correspondences.json"
    truth_path = out_dir / "truth.json"
    write_correspondence_file(corr_path, target.points, frames, intr, as_pixels=True)
    write_ground_truth(truth_path, [pose] * args.frames)
    print(f"wrote {corr_path} and {truth_path} "
          f"({target.n} points, {args.frames} frame(s), sigma={args.sigma}px)")
    return 0


def _cmd_bench(args) -> int:
    spec = read_scenario(args.scenario)
    records = run_sweep(spec, threads=args.threads, measure_timing=args.timing)
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    trials_path = out_dir / "trials.csv"
    summary_path = out_dir / "summary.csv"
    write_trial_csv(trials_path, records)
    write_summary_csv(summary_path, rmse_metrics(records))
    print(f"wrote {trials_path} ({len(records)} records) and {summary_path}")
    return 0


def _cmd_plot_data(args) -> int:
    methods = tuple(m for m in args.methods.split(",") if m)
    for method in methods:
        if method not in METHODS:
            raise ValueError(f"unknown method {method!r}; choose from {METHODS}")
    target = make_grid_target(rows=args.rows, cols=args.cols, pitch=args.pitch)
    rows = trajectory_series(
        target,
        sigma_px=args.sigma,
        frames=args.frames,
        methods=methods,
        master_seed=args.seed,
    )
    write_series_csv(args.out, rows)
    print(f"wrote {args.out} ({len(rows)} rows)")
    return 0


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except PoseKitError as exc:
        print(json.dumps({"error": type(exc).__name__, "message": str(exc)},
                         indent=2, sort_keys=True))
        return 3


if __name__ == "__main__":
    sys.exit(main())
