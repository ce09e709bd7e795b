"""Metrics, median scaling, alpha/beta grid search, and viewpoint-shift reports.

Monocular predictions carry an unknown scale, so evaluation multiplies raw
predictions by a median-ratio factor

    s = median(gt) / median(pred)

computed globally, per image, or per viewpoint position. Deliberately using
one global factor for every position is what exposes viewpoint-induced scale
distortion: each position's *perceived scale* (the Eq-above factor computed
per position and camera on the raw predictions) then drifts away from the
training-position value, and the base/shifted perceived-scale delta tracks
the error degradation.

All medians and percentiles interpolate linearly between the two closest
order statistics. Aggregations are sums and sorted medians, so results do
not depend on worker count or iteration order.
"""

from __future__ import annotations

import csv
import io
import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from enum import Enum
from pathlib import Path

import numpy as np

from .depthraster import DepthRaster, ExtractionParams, extract_distance
from .detection import Detection
from .errors import (
    AllCellsInvalid,
    ConstantInput,
    EmptyGroup,
    EmptyInput,
    EmptyRegion,
    InsufficientData,
    InvalidInput,
    LengthMismatch,
    NonPositiveGroundTruth,
)


class Camera(str, Enum):
    BASE = "base"
    SHIFTED = "shifted"


class ScaleScope(str, Enum):
    GLOBAL = "global"
    PER_IMAGE = "per_image"
    PER_POSITION = "per_position"


@dataclass(frozen=True)
class ObjectSample:
    """One evaluated object: its ground-truth distance and raw predicted distance."""

    frame_id: str
    viewpoint_id: str
    camera: Camera
    gt_distance_m: float
    pred_distance_raw: float

    def __post_init__(self):
        if not (math.isfinite(self.gt_distance_m) and self.gt_distance_m > 0.0):
            raise ValueError(f"gt_distance_m must be positive, got {self.gt_distance_m}")
        if not (math.isfinite(self.pred_distance_raw) and self.pred_distance_raw > 0.0):
            raise ValueError(f"pred_distance_raw must be positive, got {self.pred_distance_raw}")


@dataclass(frozen=True)
class ScaleFactor:
    value: float
    scope: ScaleScope

    def __post_init__(self):
        if not (math.isfinite(self.value) and self.value > 0.0):
            raise ValueError(f"scale factor must be positive, got {self.value}")


@dataclass(frozen=True)
class PositionReport:
    """One viewpoint's row of the error and perceived-scale tables."""

    viewpoint_id: str
    abs_rel_base: float | None
    abs_rel_shifted: float | None
    abs_rel_delta: float | None
    scale_base: float | None
    scale_shifted: float | None
    scale_delta: float | None
    n_objects_base: int
    n_objects_shifted: int


def _paired_arrays(gt, pred) -> tuple[np.ndarray, np.ndarray]:
    gt = np.asarray(gt, dtype=float)
    pred = np.asarray(pred, dtype=float)
    if gt.shape != pred.shape or gt.ndim != 1:
        raise LengthMismatch(f"gt has {gt.shape} entries, pred has {pred.shape}")
    return gt, pred


def abs_rel(gt, pred) -> float:
    """Mean absolute relative error in percent: 100 * mean(|gt - pred| / gt)."""
    gt, pred = _paired_arrays(gt, pred)
    if gt.size == 0:
        raise EmptyInput("abs_rel needs at least one pair")
    if np.any(gt <= 0.0):
        raise NonPositiveGroundTruth("abs_rel requires strictly positive ground truth")
    return 100.0 * float(np.mean(np.abs(gt - pred) / gt))


def average_ranks(values: np.ndarray) -> np.ndarray:
    """Ranks 1..n with ties assigned the mean of their rank span."""
    values = np.asarray(values, dtype=float)
    order = np.argsort(values, kind="stable")
    ranks = np.empty(values.size, dtype=float)
    i = 0
    while i < values.size:
        j = i
        while j + 1 < values.size and values[order[j + 1]] == values[order[i]]:
            j += 1
        ranks[order[i : j + 1]] = (i + j) / 2.0 + 1.0
        i = j + 1
    return ranks


def spearman(a, b) -> float:
    """Spearman rank correlation: Pearson correlation of average-ranked data."""
    a, b = _paired_arrays(a, b)
    if a.size < 2:
        raise InsufficientData(f"spearman needs at least 2 pairs, got {a.size}")
    if np.unique(a).size < 2 or np.unique(b).size < 2:
        raise ConstantInput("spearman is undefined for a constant input")
    ra = average_ranks(a)
    rb = average_ranks(b)
    ra -= ra.mean()
    rb -= rb.mean()
    denom = math.sqrt(float(ra @ ra) * float(rb @ rb))
    return float(ra @ rb) / denom


def median(values) -> float:
    """Median with linear interpolation of the two middle order statistics."""
    arr = np.asarray(values, dtype=float)
    if arr.size == 0:
        raise EmptyGroup("median of an empty group")
    return float(np.median(arr))


def _scale_of(samples: list[ObjectSample], scope: ScaleScope) -> ScaleFactor:
    if not samples:
        raise EmptyGroup("cannot compute a scale factor for an empty group")
    gts = [s.gt_distance_m for s in samples]
    preds = [s.pred_distance_raw for s in samples]
    return ScaleFactor(value=median(gts) / median(preds), scope=scope)


def compute_scale(
    samples: list[ObjectSample], scope: ScaleScope = ScaleScope.GLOBAL
) -> ScaleFactor | dict[str, ScaleFactor]:
    """Median-ratio scale factor(s): one global value, or one per group key.

    GLOBAL returns a single ScaleFactor; PER_IMAGE and PER_POSITION return a
    dict keyed by frame_id / viewpoint_id.
    """
    if scope is ScaleScope.GLOBAL:
        return _scale_of(list(samples), scope)
    key = (lambda s: s.frame_id) if scope is ScaleScope.PER_IMAGE else (lambda s: s.viewpoint_id)
    groups: dict[str, list[ObjectSample]] = {}
    for s in samples:
        groups.setdefault(key(s), []).append(s)
    if not groups:
        raise EmptyGroup("cannot compute scale factors for an empty sample set")
    return {k: _scale_of(g, scope) for k, g in sorted(groups.items())}


def apply_per_position_scaling(samples: list[ObjectSample]) -> list[ObjectSample]:
    """Diagnostic rescaling: each (viewpoint, camera) group gets its own factor.

    Replaces every sample's raw prediction with its group-scaled value, which
    by construction drives each group's perceived scale to 1 and every
    perceived-scale delta to 0. Evaluate the result with scale 1 to see how
    much of the single-scale error was pure scale distortion.
    """
    groups: dict[tuple[str, Camera], list[ObjectSample]] = {}
    for s in samples:
        groups.setdefault((s.viewpoint_id, s.camera), []).append(s)
    factor = {k: _scale_of(g, ScaleScope.PER_POSITION).value for k, g in groups.items()}
    return [
        ObjectSample(
            frame_id=s.frame_id,
            viewpoint_id=s.viewpoint_id,
            camera=s.camera,
            gt_distance_m=s.gt_distance_m,
            pred_distance_raw=factor[(s.viewpoint_id, s.camera)] * s.pred_distance_raw,
        )
        for s in samples
    ]


def build_position_reports(
    samples: list[ObjectSample], scale: ScaleFactor
) -> list[PositionReport]:
    """Per-viewpoint error and perceived-scale table under one provided scale.

    abs-rel columns use scale.value * pred_raw; the perceived-scale columns
    are the median-ratio factor computed per viewpoint per camera on the raw
    predictions as stored. Viewpoints with only one camera report that side
    and null deltas. Rows are sorted by viewpoint_id.
    """
    if not samples:
        raise EmptyInput("no samples to report on")
    by_viewpoint: dict[str, dict[Camera, list[ObjectSample]]] = {}
    for s in samples:
        by_viewpoint.setdefault(s.viewpoint_id, {}).setdefault(s.camera, []).append(s)

    reports = []
    for viewpoint_id in sorted(by_viewpoint):
        sides = by_viewpoint[viewpoint_id]

        def side_stats(camera: Camera) -> tuple[float | None, float | None, int]:
            group = sides.get(camera, [])
            if not group:
                return None, None, 0
            gts = [s.gt_distance_m for s in group]
            preds = [s.pred_distance_raw for s in group]
            err = abs_rel(gts, [scale.value * p for p in preds])
            perceived = median(gts) / median(preds)
            return err, perceived, len(group)

        err_b, scale_b, n_b = side_stats(Camera.BASE)
        err_s, scale_s, n_s = side_stats(Camera.SHIFTED)
        both = n_b > 0 and n_s > 0
        reports.append(
            PositionReport(
                viewpoint_id=viewpoint_id,
                abs_rel_base=err_b,
                abs_rel_shifted=err_s,
                abs_rel_delta=(err_s - err_b) if both else None,
                scale_base=scale_b,
                scale_shifted=scale_s,
                scale_delta=(scale_s - scale_b) if both else None,
                n_objects_base=n_b,
                n_objects_shifted=n_s,
            )
        )
    return reports


@dataclass(frozen=True)
class GtComparison:
    abs_rel_primary: float
    abs_rel_reference: float
    difference: float
    spearman_between_sources: float


def compare_gt_sources(primary_gt, reference_gt, pred) -> GtComparison:
    """Abs-rel under two ground-truth sources plus their rank correlation.

    Predictions are aligned to each source with that source's own global
    median-ratio factor before the error is computed, mirroring how each
    source would be used on its own; difference is primary minus reference.
    """
    primary, pred_a = _paired_arrays(primary_gt, pred)
    reference, pred_b = _paired_arrays(reference_gt, pred)
    if primary.size != reference.size:
        raise LengthMismatch(
            f"primary has {primary.size} entries, reference has {reference.size}"
        )
    if primary.size == 0:
        raise EmptyInput("compare_gt_sources needs at least one object")

    def scaled_abs_rel(gt: np.ndarray) -> float:
        s = median(gt) / median(pred_a)
        return abs_rel(gt, s * pred_a)

    err_primary = scaled_abs_rel(primary)
    err_reference = scaled_abs_rel(reference)
    return GtComparison(
        abs_rel_primary=err_primary,
        abs_rel_reference=err_reference,
        difference=err_primary - err_reference,
        spearman_between_sources=spearman(primary, reference),
    )


@dataclass(frozen=True)
class GridFrame:
    """Everything grid search needs to re-extract one frame's predictions."""

    frame_id: str
    raster: DepthRaster
    detections: tuple[Detection, ...]
    gt_m: tuple[float, ...]
    viewpoint_id: str = ""

    def __post_init__(self):
        if len(self.detections) != len(self.gt_m):
            raise LengthMismatch(
                f"{len(self.detections)} detections but {len(self.gt_m)} gt distances"
            )


@dataclass(frozen=True)
class GridSearchResult:
    best_alpha: float
    best_beta: float
    table: dict[tuple[float, float], float | None]


def _grid_cell(frames: list[GridFrame], alpha: float, beta: float, scaling: ScaleScope) -> float | None:
    params = ExtractionParams(alpha=alpha, beta=beta)
    cell_samples: list[ObjectSample] = []
    for frame in frames:
        for d, gt in zip(frame.detections, frame.gt_m):
            try:
                pred = extract_distance(frame.raster, d, params)
            except EmptyRegion:
                continue
            if pred <= 0.0:
                continue
            cell_samples.append(
                ObjectSample(
                    frame_id=frame.frame_id,
                    viewpoint_id=frame.viewpoint_id,
                    camera=Camera.BASE,
                    gt_distance_m=gt,
                    pred_distance_raw=pred,
                )
            )
    if not cell_samples:
        return None
    factors = compute_scale(cell_samples, scaling)
    if isinstance(factors, ScaleFactor):
        scaled = [factors.value * s.pred_distance_raw for s in cell_samples]
    else:
        key = (
            (lambda s: s.frame_id) if scaling is ScaleScope.PER_IMAGE else (lambda s: s.viewpoint_id)
        )
        scaled = [factors[key(s)].value * s.pred_distance_raw for s in cell_samples]
    return abs_rel([s.gt_distance_m for s in cell_samples], scaled)


def grid_search_alpha_beta(
    frames: list[GridFrame],
    alphas: list[float],
    betas: list[float],
    scaling: ScaleScope = ScaleScope.GLOBAL,
    workers: int | None = None,
) -> GridSearchResult:
    """Evaluate abs-rel for every (alpha, beta) cell, re-scaling per cell.

    Cells where every extraction fails are marked invalid (None). The best
    cell is the minimum; ties break toward larger alpha, then larger beta.
    """
    if not alphas or not betas:
        raise EmptyInput("grid search requires nonempty alpha and beta grids")
    frames = list(frames)
    cells = [(a, b) for a in alphas for b in betas]
    if workers is not None and workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            values = list(pool.map(lambda ab: _grid_cell(frames, *ab, scaling), cells))
    else:
        values = [_grid_cell(frames, a, b, scaling) for a, b in cells]
    table = dict(zip(cells, values))
    valid = [(v, -a, -b) for (a, b), v in table.items() if v is not None]
    if not valid:
        raise AllCellsInvalid("every grid cell failed to produce a metric")
    _, neg_a, neg_b = min(valid)
    return GridSearchResult(best_alpha=-neg_a, best_beta=-neg_b, table=table)


def sample_to_dict(s: ObjectSample) -> dict:
    return {
        "frame_id": s.frame_id,
        "viewpoint_id": s.viewpoint_id,
        "camera": s.camera.value,
        "gt_m": float(s.gt_distance_m),
        "pred_raw": float(s.pred_distance_raw),
    }


def sample_from_dict(payload: dict) -> ObjectSample:
    try:
        return ObjectSample(
            frame_id=str(payload["frame_id"]),
            viewpoint_id=str(payload["viewpoint_id"]),
            camera=Camera(payload["camera"]),
            gt_distance_m=float(payload["gt_m"]),
            pred_distance_raw=float(payload["pred_raw"]),
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise InvalidInput(f"bad sample record: {exc}") from None


def write_samples(samples: list[ObjectSample], path: str | Path) -> None:
    with open(path, "w") as fh:
        for s in samples:
            fh.write(json.dumps(sample_to_dict(s)) + "\n")


def read_samples(path: str | Path) -> list[ObjectSample]:
    out = []
    with open(path) as fh:
        for line in fh:
            line = line.strip()
            if line:
                out.append(sample_from_dict(json.loads(line)))
    return out


REPORT_FIELDS = (
    "viewpoint_id",
    "abs_rel_base",
    "abs_rel_shifted",
    "abs_rel_delta",
    "scale_base",
    "scale_shifted",
    "scale_delta",
    "n_base",
    "n_shifted",
)


def _fmt6(value: float | None) -> str:
    return "" if value is None else format(value, ".6g")


def _round6(value: float | None) -> float | None:
    return None if value is None else float(format(value, ".6g"))


def report_row(r: PositionReport) -> dict:
    return {
        "viewpoint_id": r.viewpoint_id,
        "abs_rel_base": _round6(r.abs_rel_base),
        "abs_rel_shifted": _round6(r.abs_rel_shifted),
        "abs_rel_delta": _round6(r.abs_rel_delta),
        "scale_base": _round6(r.scale_base),
        "scale_shifted": _round6(r.scale_shifted),
        "scale_delta": _round6(r.scale_delta),
        "n_base": r.n_objects_base,
        "n_shifted": r.n_objects_shifted,
    }


def render_report_csv(reports: list[PositionReport]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(REPORT_FIELDS)
    for r in reports:
        writer.writerow(
            [
                r.viewpoint_id,
                _fmt6(r.abs_rel_base),
                _fmt6(r.abs_rel_shifted),
                _fmt6(r.abs_rel_delta),
                _fmt6(r.scale_base),
                _fmt6(r.scale_shifted),
                _fmt6(r.scale_delta),
                r.n_objects_base,
                r.n_objects_shifted,
            ]
        )
    return buf.getvalue()


def write_report(reports: list[PositionReport], csv_path: str | Path, json_path: str | Path) -> None:
    Path(csv_path).write_text(render_report_csv(reports))
    Path(json_path).write_text(
        json.dumps({"reports": [report_row(r) for r in reports]}, indent=2) + "\n"
    )
