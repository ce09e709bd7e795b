"""Detection data model, ground-truth anchor point, and the filtering cascade.

Filtering applies four stages in a fixed order, each tagging rejections with
its own reason: confidence, horizon, occlusion, area. The occlusion relation
is evaluated over the *full* input set (a box rejected for low confidence
still counts as an occluder), so tightening any other stage never resurrects
an occluded box and raising the confidence threshold can only shrink the
kept set.

The ground-truth anchor is the midpoint of a box's lower edge,
((x1+x2)/2, y2): the pixel where the object is assumed to touch the road.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path

from .errors import InvalidInput
from .geometry import Homography, PixelPoint, ground_distance


class ObjectClass(str, Enum):
    CAR = "car"
    TRUCK = "truck"
    BUS = "bus"
    MOTORCYCLE = "motorcycle"
    BICYCLE = "bicycle"
    PERSON = "person"


VEHICLE_CLASSES = (ObjectClass.CAR, ObjectClass.TRUCK, ObjectClass.BUS)


def default_area_thresholds() -> dict[ObjectClass, float]:
    # vehicles 3000 px^2, person and bicycle 1000, motorcycle 1500
    return {
        ObjectClass.CAR: 3000.0,
        ObjectClass.TRUCK: 3000.0,
        ObjectClass.BUS: 3000.0,
        ObjectClass.MOTORCYCLE: 1500.0,
        ObjectClass.BICYCLE: 1000.0,
        ObjectClass.PERSON: 1000.0,
    }


@dataclass(frozen=True)
class Detection:
    cls: ObjectClass
    x1: float
    y1: float
    x2: float
    y2: float
    confidence: float
    frame_id: str
    object_id: str | None = None

    def __post_init__(self):
        if not all(math.isfinite(v) for v in (self.x1, self.y1, self.x2, self.y2)):
            raise ValueError("box coordinates must be finite")
        if not (self.x1 < self.x2 and self.y1 < self.y2):
            raise ValueError(
                f"box must have positive extent, got ({self.x1}, {self.y1}, {self.x2}, {self.y2})"
            )
        if not (0.0 <= self.confidence <= 1.0):
            raise ValueError(f"confidence must lie in [0, 1], got {self.confidence}")

    @property
    def area(self) -> float:
        return (self.x2 - self.x1) * (self.y2 - self.y1)


@dataclass(frozen=True)
class FilterConfig:
    horizon_v: float
    min_confidence: float = 0.5
    area_thresholds_px2: dict[ObjectClass, float] = field(default_factory=default_area_thresholds)
    occlusion_overlap_min: float = 0.0

    def __post_init__(self):
        if any(v < 0.0 for v in self.area_thresholds_px2.values()):
            raise ValueError("area thresholds must be non-negative")
        if not (0.0 <= self.occlusion_overlap_min <= 1.0):
            raise ValueError("occlusion_overlap_min must lie in [0, 1]")


REASON_LOW_CONFIDENCE = "low_confidence"
REASON_ABOVE_HORIZON = "above_horizon"
REASON_OCCLUDED = "occluded"
REASON_SMALL_AREA = "small_area"


def anchor_point(d: Detection) -> PixelPoint:
    """Midpoint of the lower edge: the assumed ground-contact pixel."""
    return PixelPoint((d.x1 + d.x2) / 2.0, d.y2)


def intersection_over_min_area(a: Detection, b: Detection) -> float:
    """Intersection area over the smaller box's area: a contained box scores 1."""
    iw = min(a.x2, b.x2) - max(a.x1, b.x1)
    ih = min(a.y2, b.y2) - max(a.y1, b.y1)
    if iw <= 0.0 or ih <= 0.0:
        return 0.0
    return (iw * ih) / min(a.area, b.area)


def _occluded_indices(ds: list[Detection], overlap_min: float) -> set[int]:
    # Greedy from the lowest box up: a box is occluded if it overlaps any box
    # already accepted as foreground. Ties in y2 break by larger area, then
    # input order.
    order = sorted(range(len(ds)), key=lambda i: (-ds[i].y2, -ds[i].area, i))
    foreground: list[int] = []
    occluded: set[int] = set()
    for i in order:
        if any(intersection_over_min_area(ds[i], ds[j]) > overlap_min for j in foreground):
            occluded.add(i)
        else:
            foreground.append(i)
    return occluded


def filter_detections(
    ds: list[Detection], cfg: FilterConfig
) -> tuple[list[Detection], list[tuple[Detection, str]]]:
    """Split detections into kept and (rejected, reason) per the four-stage cascade.

    Kept preserves input order; kept and rejected partition the input.
    """
    reasons: list[str | None] = [None] * len(ds)
    occluded = _occluded_indices(ds, cfg.occlusion_overlap_min)
    for i, d in enumerate(ds):
        if d.confidence < cfg.min_confidence:
            reasons[i] = REASON_LOW_CONFIDENCE
        elif d.y2 < cfg.horizon_v:
            reasons[i] = REASON_ABOVE_HORIZON
        elif i in occluded:
            reasons[i] = REASON_OCCLUDED
        elif d.area < cfg.area_thresholds_px2[d.cls]:
            reasons[i] = REASON_SMALL_AREA
    kept = [d for i, d in enumerate(ds) if reasons[i] is None]
    rejected = [(d, reasons[i]) for i, d in enumerate(ds) if reasons[i] is not None]
    return kept, rejected


def assign_gt_distance(d: Detection, h: Homography) -> float:
    """Metric ground-truth distance of a detection via its anchor point.

    Propagates PointAtInfinity for anchors on the horizon; callers should
    treat such detections as filtered.
    """
    return ground_distance(h, anchor_point(d))


def detection_to_dict(d: Detection) -> dict:
    return {
        "frame_id": d.frame_id,
        "cls": d.cls.value,
        "box": [float(d.x1), float(d.y1), float(d.x2), float(d.y2)],
        "confidence": float(d.confidence),
        "object_id": d.object_id,
    }


def detection_from_dict(payload: dict) -> Detection:
    try:
        box = payload["box"]
        return Detection(
            cls=ObjectClass(payload["cls"]),
            x1=float(box[0]),
            y1=float(box[1]),
            x2=float(box[2]),
            y2=float(box[3]),
            confidence=float(payload["confidence"]),
            frame_id=str(payload["frame_id"]),
            object_id=payload.get("object_id"),
        )
    except (KeyError, TypeError, ValueError, IndexError) as exc:
        raise InvalidInput(f"bad detection record: {exc}") from None


def write_detections(
    path: str | Path,
    kept: list[Detection],
    rejected: list[tuple[Detection, str]] | None = None,
) -> None:
    """Write detections as JSON Lines; rejected records carry a reject_reason."""
    with open(path, "w") as fh:
        for d in kept:
            fh.write(json.dumps(detection_to_dict(d)) + "\n")
        for d, reason in rejected or []:
            record = detection_to_dict(d)
            record["reject_reason"] = reason
            fh.write(json.dumps(record) + "\n")


def read_detections(path: str | Path) -> list[Detection]:
    """Read a JSON Lines detections file, skipping records marked rejected."""
    out = []
    with open(path) as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            payload = json.loads(line)
            if payload.get("reject_reason"):
                continue
            out.append(detection_from_dict(payload))
    return out
