"""Command-line entry point.

One binary with subcommands: calibrate, transfer, angles, filter, extract,
evaluate, grid-search, compare-gt, gps-stats, synth, serve. Every command
exits 0 on success, 1 on a domain error (with one machine-readable JSON
line on stderr), and 2 on usage errors. Log lines go to stderr; data goes
to files or stdout, so pipelines stay clean.

Options may also come from a JSON config file (--config); explicit flags
win over config values. Worker counts fall back to the PLANEVAL_WORKERS
environment variable, then the CPU count. All randomness flows from one
--seed flag.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np

from . import calibration, depthraster, detection, evaluation, geometry, gps, synthcam
from .errors import DomainError, InvalidInput


def _log(message: str) -> None:
    print(message, file=sys.stderr)


def _load_config(path: str | None) -> dict:
    if not path:
        return {}
    try:
        payload = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise InvalidInput(f"cannot read config file {path}: {exc}") from None
    if not isinstance(payload, dict):
        raise InvalidInput(f"config file {path} must hold a JSON object")
    return payload


class _Options:
    """Flag/config/default resolution: explicit flags beat config beats defaults."""

    def __init__(self, args: argparse.Namespace):
        self.args = args
        self.config = _load_config(getattr(args, "config", None))

    def get(self, key: str, default=None):
        value = getattr(self.args, key, None)
        if value is not None:
            return value
        if key in self.config:
            return self.config[key]
        return default

    def require(self, key: str):
        value = self.get(key)
        if value is None:
            raise InvalidInput(f"missing required option --{key.replace('_', '-')}")
        return value

    def workers(self) -> int:
        value = self.get("workers")
        if value is None:
            value = os.environ.get("PLANEVAL_WORKERS")
        if value is None:
            return os.cpu_count() or 1
        count = int(value)
        if count < 1:
            raise InvalidInput(f"--workers must be >= 1, got {count}")
        return count


def _parse_float_list(text) -> list[float]:
    if isinstance(text, (list, tuple)):
        return [float(v) for v in text]
    try:
        return [float(tok) for tok in str(text).split(",") if tok.strip() != ""]
    except ValueError as exc:
        raise InvalidInput(f"bad numeric list {text!r}: {exc}") from None


def _ordered_frame_groups(items, key) -> list[tuple[str, list]]:
    groups: dict[str, list] = {}
    for item in items:
        groups.setdefault(key(item), []).append(item)
    return list(groups.items())


# ---------------------------------------------------------------- calibrate


def cmd_calibrate(args) -> int:
    opts = _Options(args)
    session = calibration.read_session(opts.require("session"))
    h, residuals = calibration.fit_session(session)
    out = opts.require("out")
    geometry.write_homography(h, out, camera_id=opts.get("camera_id", session.image_id))
    lines = ["index,image_u,image_v,plane_x,plane_y,residual_m"]
    for i, (c, r) in enumerate(zip(session.correspondences, residuals)):
        lines.append(
            f"{i},{c.image.u:g},{c.image.v:g},{c.plane.x:g},{c.plane.y:g},{r:.6g}"
        )
    report = "\n".join(lines) + "\n"
    residuals_path = opts.get("residuals")
    if residuals_path:
        Path(residuals_path).write_text(report)
    else:
        sys.stdout.write(report)
    _log(f"calibrated {len(residuals)} points; max residual {max(residuals):.6g} m; wrote {out}")
    return 0


def cmd_transfer(args) -> int:
    opts = _Options(args)
    base, _ = geometry.read_homography(opts.require("base"))
    pairs = []
    with open(opts.require("pairs")) as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            payload = json.loads(line)
            try:
                pairs.append(
                    (
                        geometry.PixelPoint(float(payload["base"][0]), float(payload["base"][1])),
                        geometry.PixelPoint(
                            float(payload["shifted"][0]), float(payload["shifted"][1])
                        ),
                    )
                )
            except (KeyError, TypeError, ValueError, IndexError) as exc:
                raise InvalidInput(f"bad pair record {line!r}: {exc}") from None
    shifted = geometry.transfer_homography(base, pairs, float(opts.require("camera_height_m")))
    out = opts.require("out")
    geometry.write_homography(shifted, out, camera_id=opts.get("camera_id", "shifted"))
    _log(f"transferred homography from {len(pairs)} pairs; wrote {out}")
    return 0


def cmd_angles(args) -> int:
    opts = _Options(args)
    session = calibration.read_session(opts.require("session"))
    if session.intrinsics is None or session.vanishing_point is None:
        raise InvalidInput("session lacks intrinsics or vanishing_point; cannot compute angles")
    result = {
        "pitch_deg": calibration.pitch_from_vp(session.intrinsics, session.vanishing_point),
        "yaw_deg": calibration.yaw_from_vp(session.intrinsics, session.vanishing_point),
    }
    print(json.dumps(result))
    return 0


# ------------------------------------------------------------------- filter


def _read_detection_records(path) -> list[dict]:
    records = []
    with open(path) as fh:
        for line in fh:
            line = line.strip()
            if line:
                records.append(json.loads(line))
    return records


def cmd_filter(args) -> int:
    opts = _Options(args)
    thresholds = detection.default_area_thresholds()
    for entry in opts.get("area_threshold", []) or []:
        try:
            cls_name, value = str(entry).split("=")
            thresholds[detection.ObjectClass(cls_name.strip())] = float(value)
        except ValueError as exc:
            raise InvalidInput(f"bad --area-threshold {entry!r}: {exc}") from None
    cfg = detection.FilterConfig(
        horizon_v=float(opts.require("horizon_v")),
        min_confidence=float(opts.get("min_confidence", 0.5)),
        area_thresholds_px2=thresholds,
        occlusion_overlap_min=float(opts.get("occlusion_overlap_min", 0.0)),
    )
    records = _read_detection_records(opts.require("detections"))
    dets = [detection.detection_from_dict(r) for r in records]

    groups = _ordered_frame_groups(list(enumerate(dets)), key=lambda pair: pair[1].frame_id)

    def filter_group(group):
        indices = [i for i, _ in group[1]]
        frame_dets = [d for _, d in group[1]]
        kept, rejected = detection.filter_detections(frame_dets, cfg)
        reason_by_det = {id(d): reason for d, reason in rejected}
        return [(i, d, reason_by_det.get(id(d))) for i, d in zip(indices, frame_dets)]

    workers = opts.workers()
    if workers > 1 and len(groups) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(filter_group, groups))
    else:
        results = [filter_group(g) for g in groups]

    flat = sorted((row for rows in results for row in rows), key=lambda row: row[0])
    keep_rejected = bool(opts.get("keep_rejected", False))
    n_kept = 0
    with open(opts.require("out"), "w") as fh:
        for _, d, reason in flat:
            if reason is None:
                fh.write(json.dumps(detection.detection_to_dict(d)) + "\n")
                n_kept += 1
            elif keep_rejected:
                record = detection.detection_to_dict(d)
                record["reject_reason"] = reason
                fh.write(json.dumps(record) + "\n")
    _log(f"kept {n_kept}/{len(dets)} detections across {len(groups)} frames")
    return 0


# ------------------------------------------------------------------ extract


def _load_frames(manifest_path: str, detections_path: str):
    manifest = depthraster.read_manifest(manifest_path)
    dets = detection.read_detections(detections_path)
    by_frame: dict[str, list[detection.Detection]] = {}
    for d in dets:
        by_frame.setdefault(d.frame_id, []).append(d)
    root = Path(manifest_path).parent
    return [
        (frame_id, root / raster_rel, by_frame.get(frame_id, []))
        for frame_id, raster_rel in manifest
    ]


def cmd_extract(args) -> int:
    opts = _Options(args)
    h, _ = geometry.read_homography(opts.require("homography"))
    params = depthraster.ExtractionParams(
        alpha=float(opts.get("alpha", 0.75)), beta=float(opts.get("beta", 75.0))
    )
    camera = evaluation.Camera(opts.get("camera", "base"))
    viewpoint_id = str(opts.require("viewpoint_id"))
    frames = _load_frames(opts.require("manifest"), opts.require("detections"))
    skipped = {"horizon": 0, "empty_region": 0}

    def extract_frame(frame):
        frame_id, raster_path, frame_dets = frame
        raster = depthraster.read_pfm(raster_path, frame_id=frame_id)
        samples = []
        for d in frame_dets:
            try:
                gt = detection.assign_gt_distance(d, h)
            except geometry.PointAtInfinity:
                skipped["horizon"] += 1
                continue
            try:
                pred = depthraster.extract_distance(raster, d, params)
            except depthraster.EmptyRegion:
                skipped["empty_region"] += 1
                continue
            samples.append(
                evaluation.ObjectSample(
                    frame_id=frame_id,
                    viewpoint_id=viewpoint_id,
                    camera=camera,
                    gt_distance_m=gt,
                    pred_distance_raw=pred,
                )
            )
        return samples

    workers = opts.workers()
    if workers > 1 and len(frames) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            per_frame = list(pool.map(extract_frame, frames))
    else:
        per_frame = [extract_frame(f) for f in frames]
    samples = [s for group in per_frame for s in group]
    out = opts.require("out")
    evaluation.write_samples(samples, out)
    _log(
        f"extracted {len(samples)} samples from {len(frames)} frames "
        f"(skipped {skipped['horizon']} at horizon, {skipped['empty_region']} empty regions)"
    )
    return 0


# ----------------------------------------------------------------- evaluate


def cmd_evaluate(args) -> int:
    opts = _Options(args)
    samples = evaluation.read_samples(opts.require("samples"))
    if not samples:
        raise evaluation.EmptyInput("samples file holds no records")

    diagnostic = bool(opts.get("per_position_diagnostic", False))
    scale_value = opts.get("scale_value")
    if diagnostic:
        samples = evaluation.apply_per_position_scaling(samples)
        scale = evaluation.ScaleFactor(1.0, evaluation.ScaleScope.GLOBAL)
    elif scale_value is not None:
        scale = evaluation.ScaleFactor(float(scale_value), evaluation.ScaleScope.GLOBAL)
    else:
        pool = samples
        if opts.get("scale_from", "all") == "base":
            pool = [s for s in samples if s.camera is evaluation.Camera.BASE]
        scale = evaluation.compute_scale(pool, evaluation.ScaleScope.GLOBAL)

    reports = evaluation.build_position_reports(samples, scale)
    out_dir = Path(opts.require("out_dir"))
    out_dir.mkdir(parents=True, exist_ok=True)
    csv_path = out_dir / "report.csv"
    json_path = out_dir / "report.json"
    evaluation.write_report(reports, csv_path, json_path)
    if not opts.get("no_figures", False):
        from . import report as reportmod

        reportmod.render_abs_rel_figure(reports, out_dir / "report_abs_rel.png")
        reportmod.render_scale_figure(reports, out_dir / "report_scale.png")
    _log(
        f"evaluated {len(samples)} samples over {len(reports)} viewpoints "
        f"with scale {scale.value:.6g}; wrote {csv_path}"
    )
    return 0


# -------------------------------------------------------------- grid-search


def _grid_frames(opts: _Options) -> list[evaluation.GridFrame]:
    h, _ = geometry.read_homography(opts.require("homography"))
    viewpoint_id = str(opts.get("viewpoint_id", ""))
    frames = []
    for frame_id, raster_path, frame_dets in _load_frames(
        opts.require("manifest"), opts.require("detections")
    ):
        raster = depthraster.read_pfm(raster_path, frame_id=frame_id)
        dets, gts = [], []
        for d in frame_dets:
            try:
                gts.append(detection.assign_gt_distance(d, h))
            except geometry.PointAtInfinity:
                continue
            dets.append(d)
        frames.append(
            evaluation.GridFrame(
                frame_id=frame_id,
                raster=raster,
                detections=tuple(dets),
                gt_m=tuple(gts),
                viewpoint_id=viewpoint_id,
            )
        )
    return frames


def cmd_grid_search(args) -> int:
    opts = _Options(args)
    alphas = _parse_float_list(opts.get("alphas", "0.5,0.75,1.0"))
    betas = _parse_float_list(opts.get("betas", "50,75,90"))
    scaling = evaluation.ScaleScope(opts.get("scaling", "global"))
    frames = _grid_frames(opts)
    result = evaluation.grid_search_alpha_beta(
        frames, alphas, betas, scaling=scaling, workers=opts.workers()
    )
    out_dir = Path(opts.require("out_dir"))
    out_dir.mkdir(parents=True, exist_ok=True)
    from . import report as reportmod

    (out_dir / "grid_search.csv").write_text(
        reportmod.grid_table_csv(result.table, alphas, betas)
    )
    if not opts.get("no_figures", False):
        reportmod.render_grid_search_figure(
            result.table, alphas, betas, out_dir / "grid_search.png"
        )
    print(f"best: alpha={result.best_alpha:g} beta={result.best_beta:g}")
    return 0


# --------------------------------------------------------------- compare-gt


def cmd_compare_gt(args) -> int:
    opts = _Options(args)
    primary, reference, pred = [], [], []
    with open(opts.require("input")) as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            payload = json.loads(line)
            try:
                primary.append(float(payload["gt_primary"]))
                reference.append(float(payload["gt_reference"]))
                pred.append(float(payload["pred"]))
            except (KeyError, TypeError, ValueError) as exc:
                raise InvalidInput(f"bad compare-gt record {line!r}: {exc}") from None
    result = evaluation.compare_gt_sources(primary, reference, pred)
    payload = {
        "abs_rel_primary": float(format(result.abs_rel_primary, ".6g")),
        "abs_rel_reference": float(format(result.abs_rel_reference, ".6g")),
        "difference": float(format(result.difference, ".6g")),
        "spearman_between_sources": float(format(result.spearman_between_sources, ".6g")),
        "n_objects": len(pred),
    }
    text = json.dumps(payload)
    out = opts.get("out")
    if out:
        Path(out).write_text(text + "\n")
    print(text)
    return 0


# ---------------------------------------------------------------- gps-stats


def cmd_gps_stats(args) -> int:
    opts = _Options(args)
    trace = gps.read_gps_csv(opts.require("trace"))
    stats = gps.slope_stats(
        trace,
        min_horizontal_m=float(opts.get("min_horizontal_m", 1.0)),
        altitude_step_m=float(opts.get("altitude_step_m", 1.0)),
        fraction_over_raw_points=bool(opts.get("raw_points", False)),
    )
    print(
        json.dumps(
            {
                "mean_abs_deg": float(format(stats.mean_abs_deg, ".6g")),
                "median_abs_deg": float(format(stats.median_abs_deg, ".6g")),
                "p99_abs_deg": float(format(stats.p99_abs_deg, ".6g")),
                "altitude_change_fraction": float(format(stats.altitude_change_fraction, ".6g")),
                "n_segments": stats.n_segments,
            }
        )
    )
    return 0


# -------------------------------------------------------------------- synth


def _scene_objects(rng: np.random.Generator, count: int) -> list[synthcam.SceneObject]:
    classes = list(detection.ObjectClass)
    objects = []
    for i in range(count):
        objects.append(
            synthcam.SceneObject(
                cls=classes[i % len(classes)],
                ground_x_m=float(rng.uniform(-6.0, 6.0)),
                ground_y_m=float(rng.uniform(8.0, 45.0)),
                width_m=float(rng.uniform(0.6, 2.2)),
                height_m=float(rng.uniform(1.2, 2.4)),
            )
        )
    return objects


def cmd_synth(args) -> int:
    opts = _Options(args)
    pose = synthcam.CameraPose(
        height_m=float(opts.get("height_m", 1.778)),
        pitch_deg=float(opts.get("pitch", 0.0)),
        yaw_deg=float(opts.get("yaw", 0.0)),
        roll_deg=float(opts.get("roll", 0.0)),
    )
    k = calibration.Intrinsics(
        fx=float(opts.get("fx", 1000.0)),
        fy=float(opts.get("fy", 1000.0)),
        cu=float(opts.get("cu", 640.0)),
        cv=float(opts.get("cv", 360.0)),
    )
    width = int(opts.get("image_width", 1280))
    height = int(opts.get("image_height", 720))
    seed = int(opts.get("seed", 0))
    n_frames = int(opts.get("frames", 1))
    n_objects = int(opts.get("objects", 6))
    raster_sigma = float(opts.get("raster_noise", 0.0))
    box_sigma = float(opts.get("box_noise", 0.0))

    rng = np.random.default_rng(seed)
    scenes = []
    for i in range(n_frames):
        noise = None
        if raster_sigma > 0.0 or box_sigma > 0.0:
            noise = synthcam.NoiseSpec(
                raster_sigma_rel=raster_sigma,
                box_sigma_px=box_sigma,
                seed=int(rng.integers(0, 2**31 - 1)),
            )
        scenes.append(
            synthcam.generate_scene(
                pose,
                k,
                _scene_objects(rng, n_objects),
                noise=noise,
                image_width=width,
                image_height=height,
                frame_id=f"frame_{i:06d}",
            )
        )
    out_dir = Path(opts.require("out_dir"))
    paths = synthcam.write_scenes(scenes, out_dir, camera_id=str(opts.get("camera_id", "synth")))
    _log(
        f"generated {n_frames} frame(s), {sum(len(s.detections) for s in scenes)} objects; "
        f"wrote {paths.truth.parent}"
    )

    tilt_table = opts.get("tilt_table")
    if tilt_table:
        rows = synthcam.tilt_error_table(
            pose,
            k,
            tilts_deg=_parse_float_list(opts.get("tilts", "0.3,0.6,0.9,1.2")),
            distances_m=_parse_float_list(opts.get("tilt_distances", "5,10,20,30,40,50")),
        )
        from . import report as reportmod

        Path(tilt_table).write_text(reportmod.tilt_table_csv(rows))
        if not opts.get("no_figures", False):
            reportmod.render_tilt_error_figure(
                rows, Path(tilt_table).with_suffix(".png")
            )
        _log(f"wrote tilt-error table {tilt_table}")
    return 0


# -------------------------------------------------------------------- serve


def cmd_serve(args) -> int:
    opts = _Options(args)
    from . import serve

    session_path = opts.get("session")
    if session_path:
        session = calibration.read_session(session_path)
    else:
        session = calibration.CalibrationSession(
            image_id=str(opts.get("image_id", "session")),
            camera_height_m=float(opts.get("camera_height_m", 1.778)),
        )
    server = serve.build_server(
        session=session,
        image_path=opts.get("image"),
        out_dir=str(opts.get("out_dir", ".")),
        port=int(opts.get("port", 8791)),
        ui_dir=opts.get("ui_dir"),
        host=str(opts.get("host", "127.0.0.1")),
    )
    _log(f"serving calibration UI on http://{server.server_address[0]}:{server.server_address[1]}")
    try:
        server.serve_forever()
    except KeyboardInterrupt:
        _log("shutting down")
    finally:
        server.server_close()
    return 0


# ------------------------------------------------------------------- parser


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="planeval",
        description=(
            "Homography-based ground-truth distances and viewpoint-shift "
            "evaluation for monocular depth estimators."
        ),
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, func, help_text):
        p = sub.add_parser(name, help=help_text)
        p.set_defaults(func=func)
        p.add_argument("--config", help="JSON config file; explicit flags win")
        return p

    p = add("calibrate", cmd_calibrate, "fit a session file to a homography plus residual report")
    p.add_argument("--session", help="correspondence-set JSON file")
    p.add_argument("--out", help="output homography JSON path")
    p.add_argument("--camera-id", dest="camera_id", help="camera id stored in the homography file")
    p.add_argument("--residuals", help="write the residual CSV here instead of stdout")

    p = add("transfer", cmd_transfer, "estimate a second camera's homography from pixel pairs")
    p.add_argument("--base", help="base homography JSON")
    p.add_argument("--pairs", help="JSONL of {\"base\":[u,v],\"shifted\":[u,v]}")
    p.add_argument("--camera-height-m", dest="camera_height_m", type=float)
    p.add_argument("--out", help="output homography JSON path")
    p.add_argument("--camera-id", dest="camera_id")

    p = add("angles", cmd_angles, "pitch/yaw from a session's vanishing point")
    p.add_argument("--session", help="correspondence-set JSON file")

    p = add("filter", cmd_filter, "apply the detection filtering cascade")
    p.add_argument("--detections", help="input detections JSONL")
    p.add_argument("--out", help="output detections JSONL")
    p.add_argument("--horizon-v", dest="horizon_v", type=float, help="vanishing point v coordinate")
    p.add_argument("--min-confidence", dest="min_confidence", type=float)
    p.add_argument(
        "--occlusion-overlap-min", dest="occlusion_overlap_min", type=float,
        help="intersection-over-min-area above this marks occlusion (default 0)",
    )
    p.add_argument(
        "--area-threshold", dest="area_threshold", action="append",
        help="override one class area threshold, e.g. car=3000 (repeatable)",
    )
    p.add_argument("--keep-rejected", dest="keep_rejected", action="store_const", const=True)
    p.add_argument("--workers", type=int)

    p = add("extract", cmd_extract, "rasters + detections + homography -> samples file")
    p.add_argument("--manifest", help="frame_id -> raster JSONL manifest")
    p.add_argument("--detections", help="filtered detections JSONL")
    p.add_argument("--homography", help="homography JSON")
    p.add_argument("--alpha", type=float, help="box resize fraction (default 0.75)")
    p.add_argument("--beta", type=float, help="percentile (default 75)")
    p.add_argument("--viewpoint-id", dest="viewpoint_id")
    p.add_argument("--camera", choices=["base", "shifted"])
    p.add_argument("--out", help="output samples JSONL")
    p.add_argument("--workers", type=int)

    p = add("evaluate", cmd_evaluate, "samples -> per-viewpoint error/scale report")
    p.add_argument("--samples", help="samples JSONL")
    p.add_argument("--out-dir", dest="out_dir")
    p.add_argument("--scale-value", dest="scale_value", type=float,
                   help="explicit global scale factor (default: computed from samples)")
    p.add_argument("--scale-from", dest="scale_from", choices=["all", "base"],
                   help="compute the global factor from all samples or base camera only")
    p.add_argument(
        "--per-position-diagnostic", dest="per_position_diagnostic",
        action="store_const", const=True,
        help="rescale each (viewpoint, camera) group by its own factor first",
    )
    p.add_argument("--no-figures", dest="no_figures", action="store_const", const=True)

    p = add("grid-search", cmd_grid_search, "search extraction alpha/beta on abs-rel")
    p.add_argument("--manifest")
    p.add_argument("--detections")
    p.add_argument("--homography")
    p.add_argument("--alphas", help="comma-separated, default 0.5,0.75,1.0")
    p.add_argument("--betas", help="comma-separated, default 50,75,90")
    p.add_argument("--scaling", choices=["global", "per_image", "per_position"])
    p.add_argument("--viewpoint-id", dest="viewpoint_id")
    p.add_argument("--out-dir", dest="out_dir")
    p.add_argument("--no-figures", dest="no_figures", action="store_const", const=True)
    p.add_argument("--workers", type=int)

    p = add("compare-gt", cmd_compare_gt, "compare two ground-truth sources on one prediction set")
    p.add_argument("--input", help="JSONL of {gt_primary, gt_reference, pred}")
    p.add_argument("--out", help="also write the JSON result here")

    p = add("gps-stats", cmd_gps_stats, "road-slope statistics from a GPS CSV trace")
    p.add_argument("--trace", help="CSV with header t,lat,lon,alt,speed")
    p.add_argument("--min-horizontal-m", dest="min_horizontal_m", type=float)
    p.add_argument("--altitude-step-m", dest="altitude_step_m", type=float)
    p.add_argument("--raw-points", dest="raw_points", action="store_const", const=True,
                   help="count altitude changes over all 1 Hz pairs, not kept segments")

    p = add("synth", cmd_synth, "generate an exact synthetic scene (oracle)")
    p.add_argument("--out-dir", dest="out_dir")
    p.add_argument("--height-m", dest="height_m", type=float)
    p.add_argument("--pitch", type=float)
    p.add_argument("--yaw", type=float)
    p.add_argument("--roll", type=float)
    p.add_argument("--fx", type=float)
    p.add_argument("--fy", type=float)
    p.add_argument("--cu", type=float)
    p.add_argument("--cv", type=float)
    p.add_argument("--image-width", dest="image_width", type=int)
    p.add_argument("--image-height", dest="image_height", type=int)
    p.add_argument("--frames", type=int)
    p.add_argument("--objects", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--raster-noise", dest="raster_noise", type=float,
                   help="relative gaussian sigma on raster values")
    p.add_argument("--box-noise", dest="box_noise", type=float,
                   help="gaussian sigma in pixels on box corners")
    p.add_argument("--camera-id", dest="camera_id")
    p.add_argument("--tilt-table", dest="tilt_table",
                   help="also write the road-tilt error table CSV here")
    p.add_argument("--tilts", help="comma-separated tilt degrees for --tilt-table")
    p.add_argument("--tilt-distances", dest="tilt_distances",
                   help="comma-separated distances for --tilt-table")
    p.add_argument("--no-figures", dest="no_figures", action="store_const", const=True)

    p = add("serve", cmd_serve, "run the calibration UI backend")
    p.add_argument("--session", help="load an existing session file")
    p.add_argument("--image", help="calibration image served to the UI")
    p.add_argument("--image-id", dest="image_id")
    p.add_argument("--camera-height-m", dest="camera_height_m", type=float)
    p.add_argument("--port", type=int, help="default 8791")
    p.add_argument("--host")
    p.add_argument("--out-dir", dest="out_dir", help="export directory")
    p.add_argument("--ui-dir", dest="ui_dir", help="static UI assets directory")

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except DomainError as exc:
        print(json.dumps({"error": exc.code, "detail": str(exc)}), file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
