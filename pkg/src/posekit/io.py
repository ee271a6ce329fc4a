"""File formats: JSON correspondence/scenario inputs, CSV benchmark outputs.

All writers are deterministic (sorted JSON keys, fixed column orders,
shortest round-trip float repr, `\\n` line endings) so identical inputs
produce byte-identical files.
"""

from __future__ import annotations

import csv
import io as _io
import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

from .bench import SweepSpec, TrialRecord
from .geometry import CameraIntrinsics, pixels_to_bearings
from .scene import GroundTruthPose, TargetModel, make_grid_target, make_random_target

TRIAL_CSV_HEADER = (
    "trial,method,sigma_px,d_over_extent,pos_err_m,rot_err_rad,roll_dev_rad,"
    "pitch_dev_rad,yaw_dev_rad,normal_err_rad,dir_err_rad,time_ns,failed"
)

SUMMARY_CSV_HEADER = (
    "method,sigma_px,d_over_extent,n_records,n_failed,pos_rmse_m,rot_rmse_deg,"
    "euler_rmse_deg,normal_rmse_deg,dir_rmse_deg,median_time_ns"
)

SERIES_CSV_HEADER = (
    "frame,method,true_x,true_y,true_z,true_roll_deg,true_pitch_deg,true_yaw_deg,"
    "est_x,est_y,est_z,est_roll_deg,est_pitch_deg,est_yaw_deg,failed"
)


@dataclass(frozen=True)
class CorrespondenceFile:
    """Parsed correspondence input: target points plus per-frame bearings."""

    points: np.ndarray  # (n, 2) target coordinates in the plane
    frames: tuple[np.ndarray, ...]  # each (n, 3) unit bearings
    intrinsics: CameraIntrinsics | None = None

    @property
    def n_frames(self) -> int:
        return len(self.frames)


def _fail(path: str, message: str) -> ValueError:
    return ValueError(f"{path}: {message}")


def _as_float_matrix(value, path: str, cols: int, min_rows: int = 1) -> np.ndarray:
    if not isinstance(value, list) or len(value) < min_rows:
        raise _fail(path, f"expected a list of at least {min_rows} rows")
    rows = []
    for i, row in enumerate(value):
        if not isinstance(row, list) or len(row) != cols:
            raise _fail(f"{path}[{i}]", f"expected {cols} numbers")
        try:
            rows.append([float(v) for v in row])
        except (TypeError, ValueError):
            raise _fail(f"{path}[{i}]", "entries must be numbers") from None
    out = np.asarray(rows, dtype=np.float64)
    if not np.all(np.isfinite(out)):
        raise _fail(path, "entries must be finite")
    return out


def _as_float(value, path: str) -> float:
    try:
        out = float(value)
    except (TypeError, ValueError):
        raise _fail(path, "expected a number") from None
    if not math.isfinite(out):
        raise _fail(path, "expected a finite number")
    return out


def _as_int(value, path: str, minimum: int | None = None) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise _fail(path, "expected an integer")
    if minimum is not None and value < minimum:
        raise _fail(path, f"expected an integer >= {minimum}")
    return value


def _parse_intrinsics(obj, path: str) -> CameraIntrinsics:
    if not isinstance(obj, dict):
        raise _fail(path, "expected an object with fx, fy, cx, cy")
    for key in ("fx", "fy", "cx", "cy"):
        if key not in obj:
            raise _fail(path, f"missing field {key!r}")
    return CameraIntrinsics(
        fx=_as_float(obj["fx"], f"{path}.fx"),
        fy=_as_float(obj["fy"], f"{path}.fy"),
        cx=_as_float(obj["cx"], f"{path}.cx"),
        cy=_as_float(obj["cy"], f"{path}.cy"),
    )


def _load_json(path) -> dict:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            data = json.load(fh)
    except json.JSONDecodeError as exc:
        raise ValueError(f"{path}: not valid JSON ({exc})") from None
    if not isinstance(data, dict):
        raise ValueError(f"{path}: top level must be a JSON object")
    return data


def _dump_json(path, obj: dict) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(obj, fh, indent=2, sort_keys=True)
        fh.write("\n")


def read_correspondence_file(path) -> CorrespondenceFile:
    """Parse a correspondence JSON file.

    Layout::

        {
          "target_points": [[x, y], ...],          # n >= 4 rows
          "intrinsics": {"fx":., "fy":., "cx":., "cy":.},   # required with pixels
          "frames": [ {"bearings": [[bx,by,bz], ...]} | {"pixels": [[u,v], ...]} ]
        }

    Pixel frames are converted to unit bearings with the intrinsics.
    Raises ValueError with the offending field path on malformed input.
    """
    data = _load_json(path)
    if "target_points" not in data:
        raise _fail(str(path), "missing field 'target_points'")
    points = _as_float_matrix(data["target_points"], "target_points", cols=2, min_rows=4)

    intrinsics = None
    if "intrinsics" in data:
        intrinsics = _parse_intrinsics(data["intrinsics"], "intrinsics")

    raw_frames = data.get("frames")
    if not isinstance(raw_frames, list) or not raw_frames:
        raise _fail(str(path), "'frames' must be a non-empty list")

    frames = []
    n = points.shape[0]
    for i, frame in enumerate(raw_frames):
        where = f"frames[{i}]"
        if not isinstance(frame, dict):
            raise _fail(where, "expected an object")
        has_bearings = "bearings" in frame
        has_pixels = "pixels" in frame
        if has_bearings == has_pixels:
            raise _fail(where, "provide exactly one of 'bearings' or 'pixels'")
        if has_bearings:
            bearings = _as_float_matrix(frame["bearings"], f"{where}.bearings", cols=3)
            norms = np.linalg.norm(bearings, axis=1)
            if np.any(norms < 1e-12):
                raise _fail(f"{where}.bearings", "zero-length bearing")
            bearings = bearings / norms[:, None]
        else:
            if intrinsics is None:
                raise _fail(where, "'pixels' frames require top-level 'intrinsics'")
            pixels = _as_float_matrix(frame["pixels"], f"{where}.pixels", cols=2)
            bearings = pixels_to_bearings(pixels, intrinsics)
        if bearings.shape[0] != n:
            raise _fail(where, f"expected {n} rows to match target_points, got {bearings.shape[0]}")
        frames.append(bearings)
    return CorrespondenceFile(points=points, frames=tuple(frames), intrinsics=intrinsics)


def write_correspondence_file(path, points: np.ndarray, frames: Sequence[np.ndarray],
                              intrinsics: CameraIntrinsics | None = None,
                              as_pixels: bool = False) -> None:
    """Write a correspondence JSON file (inverse of read_correspondence_file).

    With as_pixels=True the frames are interpreted as (n, 2) pixel arrays and
    intrinsics become mandatory; otherwise frames hold (n, 3) bearings.
    """
    if as_pixels and intrinsics is None:
        raise ValueError("as_pixels=True requires intrinsics")
    doc: dict = {"target_points": [[float(x), float(y)] for x, y in np.asarray(points)]}
    if intrinsics is not None:
        doc["intrinsics"] = {
            "fx": intrinsics.fx, "fy": intrinsics.fy,
            "cx": intrinsics.cx, "cy": intrinsics.cy,
        }
    key = "pixels" if as_pixels else "bearings"
    doc["frames"] = [
        {key: [[float(v) for v in row] for row in np.asarray(frame)]} for frame in frames
    ]
    _dump_json(path, doc)


def read_ground_truth(path) -> list[GroundTruthPose]:
    """Parse a ground-truth sidecar: {"frames": [{"rotation": 3x3, "position": [3]}]}."""
    data = _load_json(path)
    raw_frames = data.get("frames")
    if not isinstance(raw_frames, list) or not raw_frames:
        raise _fail(str(path), "'frames' must be a non-empty list")
    poses = []
    for i, frame in enumerate(raw_frames):
        where = f"frames[{i}]"
        if not isinstance(frame, dict) or "rotation" not in frame or "position" not in frame:
            raise _fail(where, "expected an object with 'rotation' and 'position'")
        rotation = _as_float_matrix(frame["rotation"], f"{where}.rotation", cols=3, min_rows=3)
        if rotation.shape[0] != 3:
            raise _fail(f"{where}.rotation", "expected a 3x3 matrix")
        position = _as_float_matrix([frame["position"]], f"{where}.position", cols=3)[0]
        poses.append(GroundTruthPose(rotation=rotation, position=position))
    return poses


def write_ground_truth(path, poses: Sequence[GroundTruthPose]) -> None:
    doc = {
        "frames": [
            {
                "rotation": [[float(v) for v in row] for row in pose.rotation],
                "position": [float(v) for v in pose.position],
            }
            for pose in poses
        ]
    }
    _dump_json(path, doc)


def _parse_target(obj, rng_seed_path: str) -> TargetModel:
    if not isinstance(obj, dict) or "type" not in obj:
        raise _fail("target", "expected an object with a 'type' field")
    kind = obj["type"]
    if kind == "grid":
        rows = _as_int(obj.get("rows", 5), "target.rows", minimum=2)
        cols = _as_int(obj.get("cols", 5), "target.cols", minimum=2)
        pitch = _as_float(obj.get("pitch", 0.4), "target.pitch")
        if pitch <= 0:
            raise _fail("target.pitch", "must be positive")
        return make_grid_target(rows=rows, cols=cols, pitch=pitch)
    if kind == "points":
        points = _as_float_matrix(obj.get("points"), "target.points", cols=2, min_rows=4)
        extent = np.ptp(points, axis=0)
        return TargetModel(points=points, extent=(float(extent[0]), float(extent[1])))
    if kind == "random":
        n = _as_int(obj.get("n", 12), "target.n", minimum=4)
        extent = _as_float(obj.get("extent", 2.0), "target.extent")
        if extent <= 0:
            raise _fail("target.extent", "must be positive")
        seed = _as_int(obj.get("seed", 0), rng_seed_path, minimum=0)
        return make_random_target(n=n, extent=extent, rng=np.random.default_rng(seed))
    raise _fail("target.type", f"unknown type {kind!r}; expected grid, points, or random")


def read_scenario(path) -> SweepSpec:
    """Parse a benchmark scenario JSON file into a SweepSpec.

    Layout::

        {
          "target": {"type": "grid", "rows": 5, "cols": 5, "pitch": 0.4},
          "sigma_px": [0.0, 0.5],
          "d_over_extent": [2.0, 4.0],
          "trials": 100,
          "methods": ["algebraic", "smooth"],
          "seed": 0,
          "frames": 1,
          "max_tilt": 0.5,
          "lateral_factor": 0.25
        }

    target.type may also be "points" (explicit coordinate list) or "random"
    (n, extent, seed). Fields past "target" have the defaults shown.
    """
    data = _load_json(path)
    if "target" not in data:
        raise _fail(str(path), "missing field 'target'")
    target = _parse_target(data["target"], "target.seed")

    def float_list(key, default):
        raw = data.get(key, default)
        if not isinstance(raw, list) or not raw:
            raise _fail(key, "expected a non-empty list of numbers")
        return tuple(_as_float(v, f"{key}[{i}]") for i, v in enumerate(raw))

    methods = data.get("methods", ["algebraic"])
    if not isinstance(methods, list) or not all(isinstance(m, str) for m in methods):
        raise _fail("methods", "expected a list of method names")
    try:
        return SweepSpec(
            sigma_list=float_list("sigma_px", [0.5]),
            d_over_extent_list=float_list("d_over_extent", [3.0]),
            trials=_as_int(data.get("trials", 100), "trials", minimum=1),
            target=target,
            methods=tuple(methods),
            master_seed=_as_int(data.get("seed", 0), "seed", minimum=0),
            frames=_as_int(data.get("frames", 1), "frames", minimum=1),
            max_tilt=_as_float(data.get("max_tilt", 0.5), "max_tilt"),
            lateral_factor=_as_float(data.get("lateral_factor", 0.25), "lateral_factor"),
        )
    except ValueError as exc:
        raise _fail(str(path), str(exc)) from None


def _format(value) -> str:
    if isinstance(value, bool):
        return str(int(value))
    if isinstance(value, float):
        return repr(value)
    if value is None:
        return ""
    return str(value)


def _write_csv(path_or_file, header: str, rows) -> None:
    own = isinstance(path_or_file, (str, Path))
    fh = open(path_or_file, "w", encoding="utf-8", newline="") if own else path_or_file
    try:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header.split(","))
        for row in rows:
            writer.writerow([_format(v) for v in row])
    finally:
        if own:
            fh.close()


def write_trial_csv(path_or_file, records: Sequence[TrialRecord]) -> None:
    """Write per-trial records under TRIAL_CSV_HEADER (error detail is not serialized)."""
    fields = TRIAL_CSV_HEADER.split(",")
    _write_csv(
        path_or_file, TRIAL_CSV_HEADER,
        ([getattr(r, f) for f in fields] for r in records),
    )


def read_trial_csv(path) -> list[TrialRecord]:
    """Parse a trial CSV back into records (inverse of write_trial_csv)."""
    with open(path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header != TRIAL_CSV_HEADER.split(","):
            raise ValueError(f"{path}: unexpected header {header!r}")
        records = []
        for row in reader:
            records.append(
                TrialRecord(
                    trial=int(row[0]), method=row[1],
                    sigma_px=float(row[2]), d_over_extent=float(row[3]),
                    pos_err_m=float(row[4]), rot_err_rad=float(row[5]),
                    roll_dev_rad=float(row[6]), pitch_dev_rad=float(row[7]),
                    yaw_dev_rad=float(row[8]), normal_err_rad=float(row[9]),
                    dir_err_rad=float(row[10]), time_ns=int(row[11]),
                    failed=bool(int(row[12])),
                )
            )
    return records


def write_summary_csv(path_or_file, rows: Sequence[dict]) -> None:
    """Write rmse_metrics rows under SUMMARY_CSV_HEADER."""
    fields = SUMMARY_CSV_HEADER.split(",")
    _write_csv(path_or_file, SUMMARY_CSV_HEADER, ([row[f] for f in fields] for row in rows))


def write_series_csv(path_or_file, rows: Sequence[dict]) -> None:
    """Write trajectory_series rows under SERIES_CSV_HEADER."""
    fields = SERIES_CSV_HEADER.split(",")
    _write_csv(path_or_file, SERIES_CSV_HEADER, ([row[f] for f in fields] for row in rows))


def trial_csv_text(records: Sequence[TrialRecord]) -> str:
    """Render the trial CSV to a string (handy for stdout and tests)."""
    buf = _io.StringIO()
    write_trial_csv(buf, records)
    return buf.getvalue()
