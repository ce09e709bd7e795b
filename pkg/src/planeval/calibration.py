"""Camera intrinsics, vanishing-point orientation angles, and calibration sessions.

Pitch and yaw are derived from the manually labeled horizontal vanishing
point (v_u, v_v):

    pitch = (180/pi) * arctan((c_v - v_v) / f_y)
    yaw   = (180/pi) * arctan((c_u - v_u) / f_x)

Sign convention follows these formulas literally: image v grows downward,
so a camera tilted further down pushes the vanishing point up the image
(v_v < c_v) and yields a positive pitch.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path

from .errors import InvalidInput
from .geometry import (
    Correspondence,
    Homography,
    PixelPoint,
    PlanePoint,
    estimate_homography,
    project,
)


@dataclass(frozen=True)
class Intrinsics:
    """Pinhole intrinsics in pixels: focal lengths and principal point."""

    fx: float
    fy: float
    cu: float
    cv: float

    def __post_init__(self):
        for name in ("fx", "fy"):
            val = getattr(self, name)
            if not (math.isfinite(val) and val > 0.0):
                raise ValueError(f"{name} must be positive and finite, got {val}")
        if not (math.isfinite(self.cu) and math.isfinite(self.cv)):
            raise ValueError("principal point must be finite")


@dataclass(frozen=True)
class VanishingPoint:
    vu: float
    vv: float

    def __post_init__(self):
        if not (math.isfinite(self.vu) and math.isfinite(self.vv)):
            raise ValueError("vanishing point must be finite")


def pitch_from_vp(k: Intrinsics, vp: VanishingPoint) -> float:
    """Camera pitch in degrees from the vanishing point's vertical offset."""
    return math.degrees(math.atan((k.cv - vp.vv) / k.fy))


def yaw_from_vp(k: Intrinsics, vp: VanishingPoint) -> float:
    """Camera yaw in degrees from the vanishing point's horizontal offset."""
    return math.degrees(math.atan((k.cu - vp.vu) / k.fx))


@dataclass
class CalibrationSession:
    """Editable state of one manual calibration: labeled points plus camera metadata.

    The correspondence list preserves insertion order; point edits are
    index-stable in the sense that deleting point i shifts all subsequent
    indices down by one (UI edits reference indices).
    """

    image_id: str
    camera_height_m: float
    correspondences: list[Correspondence] = field(default_factory=list)
    intrinsics: Intrinsics | None = None
    vanishing_point: VanishingPoint | None = None

    def __post_init__(self):
        if not (math.isfinite(self.camera_height_m) and self.camera_height_m > 0.0):
            raise ValueError(f"camera_height_m must be positive, got {self.camera_height_m}")

    def add_point(self, image: PixelPoint, plane: PlanePoint) -> int:
        self.correspondences.append(Correspondence(image, plane))
        return len(self.correspondences) - 1

    def update_point(self, index: int, image: PixelPoint, plane: PlanePoint) -> None:
        self.correspondences[index] = Correspondence(image, plane)

    def delete_point(self, index: int) -> None:
        del self.correspondences[index]


def fit_session(session: CalibrationSession) -> tuple[Homography, list[float]]:
    """Fit the session's homography and report per-point plane residuals (meters).

    Residual i is the Euclidean distance between the projection of image
    point i and its labeled plane point; the list matches correspondence
    order.
    """
    h = estimate_homography(session.correspondences, session.camera_height_m)
    residuals = []
    for c in session.correspondences:
        got = project(h, c.image)
        residuals.append(math.hypot(got.x - c.plane.x, got.y - c.plane.y))
    return h, residuals


def session_to_dict(session: CalibrationSession) -> dict:
    return {
        "image_id": session.image_id,
        "camera_height_m": float(session.camera_height_m),
        "intrinsics": (
            None
            if session.intrinsics is None
            else {
                "fx": float(session.intrinsics.fx),
                "fy": float(session.intrinsics.fy),
                "cu": float(session.intrinsics.cu),
                "cv": float(session.intrinsics.cv),
            }
        ),
        "vanishing_point": (
            None
            if session.vanishing_point is None
            else {"vu": float(session.vanishing_point.vu), "vv": float(session.vanishing_point.vv)}
        ),
        "points": [
            {
                "image": [float(c.image.u), float(c.image.v)],
                "plane": [float(c.plane.x), float(c.plane.y)],
            }
            for c in session.correspondences
        ],
    }


def session_from_dict(payload: dict) -> CalibrationSession:
    try:
        intr = payload.get("intrinsics")
        vp = payload.get("vanishing_point")
        session = CalibrationSession(
            image_id=str(payload["image_id"]),
            camera_height_m=float(payload["camera_height_m"]),
            intrinsics=None if intr is None else Intrinsics(**{k: float(v) for k, v in intr.items()}),
            vanishing_point=None if vp is None else VanishingPoint(float(vp["vu"]), float(vp["vv"])),
        )
        for entry in payload.get("points", []):
            session.add_point(
                PixelPoint(float(entry["image"][0]), float(entry["image"][1])),
                PlanePoint(float(entry["plane"][0]), float(entry["plane"][1])),
            )
    except (KeyError, TypeError, ValueError) as exc:
        raise InvalidInput(f"bad correspondence-set payload: {exc}") from None
    return session


def write_session(session: CalibrationSession, path: str | Path) -> None:
    Path(path).write_text(json.dumps(session_to_dict(session), indent=2) + "\n")


def read_session(path: str | Path) -> CalibrationSession:
    return session_from_dict(json.loads(Path(path).read_text()))
