"""Pinhole-camera oracle: exact synthetic scenes for verifying every pipeline stage.

World frame: x lateral right, y up, z forward; the ground plane is y = 0 and
plane coordinates (x, y) map to world (x, 0, y). Scenes are generated with
the plane origin directly below the camera, so the distance to a ground
point is exactly sqrt(x^2 + y^2 + height^2).

Orientation is built so that the image of the world-forward direction lands
exactly at

    (v_u, v_v) = (c_u - f_x tan(yaw), c_v - f_y tan(pitch))

for any pitch/yaw combination, which makes the calibration-side angle
formulas an exact inverse. Positive pitch tilts the camera down, positive
yaw pans it right. The rotation realizing this is the unique one whose
camera-right axis stays horizontal (a yaw-then-pitch composition with the
yaw angle measured in the tangent plane); roll is then applied about the
world-forward axis through the camera, which leaves the vanishing point
untouched, so the closed form remains the true projective limit even for
rolled cameras. Positive roll raises the right-hand side of the scene in
the image.

Scene objects are vertical billboards whose bottom edge runs along the
camera-right direction on the ground, so with zero roll the detection box's
lower-edge midpoint is exactly the image of the billboard's ground center.
Rasters are "idealized": each box region holds the object's constant true
distance, and everything else holds the exact per-pixel ground range (sky
pixels are invalid zeros). Any percentile of any centered shrink of a box
therefore equals the object's ground-truth distance exactly.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .calibration import (
    CalibrationSession,
    Intrinsics,
    VanishingPoint,
    session_to_dict,
)
from .depthraster import DepthRaster, write_manifest, write_pfm
from .detection import Detection, ObjectClass, detection_to_dict
from .errors import BehindCamera
from .geometry import (
    Correspondence,
    Homography,
    PixelPoint,
    PlanePoint,
    ground_distance,
    homography_to_dict,
)

_MIN_DEPTH = 1e-9


@dataclass(frozen=True)
class CameraPose:
    """Camera placement: height above ground, orientation, windshield offsets.

    height_m is the authoritative height of this camera above the road;
    x_m and z_m are lateral/forward offsets in a shared multi-camera world
    frame (zero for a lone camera). y_m records the windshield vertical
    offset for bookkeeping and does not enter projection: fold it into
    height_m (see shifted_pose).
    """

    height_m: float
    pitch_deg: float = 0.0
    yaw_deg: float = 0.0
    roll_deg: float = 0.0
    x_m: float = 0.0
    y_m: float = 0.0
    z_m: float = 0.0

    def __post_init__(self):
        if not (math.isfinite(self.height_m) and self.height_m > 0.0):
            raise ValueError(f"height_m must be positive, got {self.height_m}")
        if not (abs(self.pitch_deg) < 90.0 and abs(self.yaw_deg) < 90.0):
            raise ValueError("pitch and yaw must lie in (-90, 90) degrees")


def shifted_pose(
    base: CameraPose,
    dx_m: float = 0.0,
    dy_m: float = 0.0,
    dz_m: float = 0.0,
    pitch_deg: float | None = None,
    yaw_deg: float | None = None,
    roll_deg: float | None = None,
) -> CameraPose:
    """Pose for a second camera displaced from a base camera's position."""
    return CameraPose(
        height_m=base.height_m + dy_m,
        pitch_deg=base.pitch_deg if pitch_deg is None else pitch_deg,
        yaw_deg=base.yaw_deg if yaw_deg is None else yaw_deg,
        roll_deg=base.roll_deg if roll_deg is None else roll_deg,
        x_m=base.x_m + dx_m,
        y_m=dy_m,
        z_m=base.z_m + dz_m,
    )


@dataclass(frozen=True)
class SceneObject:
    """A vertical billboard standing on the ground plane."""

    cls: ObjectClass
    ground_x_m: float
    ground_y_m: float
    width_m: float = 1.8
    height_m: float = 1.5

    def __post_init__(self):
        if self.width_m <= 0.0 or self.height_m <= 0.0:
            raise ValueError("billboard extents must be positive")


@dataclass(frozen=True)
class NoiseSpec:
    """Seeded degradations: relative Gaussian raster noise, pixel box jitter."""

    raster_sigma_rel: float = 0.0
    box_sigma_px: float = 0.0
    seed: int = 0


def rotation_world_to_camera(pose: CameraPose) -> np.ndarray:
    """World-to-camera direction map (camera axes: x right, y down, z forward)."""
    ty = math.tan(math.radians(pose.yaw_deg))
    tp = math.tan(math.radians(pose.pitch_deg))
    c = 1.0 / math.sqrt(1.0 + ty * ty + tp * tp)
    r1 = math.sqrt(1.0 - ty * ty * c * c)
    right = np.array([r1, 0.0, -ty * c])
    forward = np.array([ty * c * c / r1, -tp * c / r1, c])
    down = np.cross(right, forward)
    align = np.vstack([right, down, forward])

    g = math.radians(pose.roll_deg)
    roll_world = np.array(
        [
            [math.cos(g), -math.sin(g), 0.0],
            [math.sin(g), math.cos(g), 0.0],
            [0.0, 0.0, 1.0],
        ]
    )
    return align @ roll_world


def camera_center(pose: CameraPose) -> np.ndarray:
    return np.array([pose.x_m, pose.height_m, pose.z_m])


def project_world_point(pose: CameraPose, k: Intrinsics, point_w) -> PixelPoint:
    """Project an arbitrary 3D world point; raises BehindCamera for depth <= 0."""
    rel = np.asarray(point_w, dtype=float) - camera_center(pose)
    pc = rotation_world_to_camera(pose) @ rel
    if pc[2] <= _MIN_DEPTH:
        raise BehindCamera(f"point {tuple(point_w)} has camera depth {pc[2]:.3e}")
    return PixelPoint(k.cu + k.fx * pc[0] / pc[2], k.cv + k.fy * pc[1] / pc[2])


def project_ground_point(pose: CameraPose, k: Intrinsics, g: PlanePoint) -> PixelPoint:
    """Pixel of a ground-plane point under the posed pinhole camera."""
    return project_world_point(pose, k, (g.x, 0.0, g.y))


def vanishing_point_of(pose: CameraPose, k: Intrinsics) -> VanishingPoint:
    """Horizontal vanishing point; exact inverse of the pitch/yaw formulas."""
    return VanishingPoint(
        vu=k.cu - k.fx * math.tan(math.radians(pose.yaw_deg)),
        vv=k.cv - k.fy * math.tan(math.radians(pose.pitch_deg)),
    )


def true_homography(pose: CameraPose, k: Intrinsics, own_frame: bool = True) -> Homography:
    """Analytic image-to-plane homography of the posed camera.

    With own_frame the plane origin sits below this camera (x_m, z_m
    ignored), matching generate_scene; otherwise plane coordinates live in
    the shared world frame, which is what cross-camera transfer needs.
    """
    cx, cz = (0.0, 0.0) if own_frame else (pose.x_m, pose.z_m)
    plane_to_world = np.array(
        [
            [1.0, 0.0, -cx],
            [0.0, 0.0, -pose.height_m],
            [0.0, 1.0, -cz],
        ]
    )
    kk = np.array([[k.fx, 0.0, k.cu], [0.0, k.fy, k.cv], [0.0, 0.0, 1.0]])
    plane_to_image = kk @ rotation_world_to_camera(pose) @ plane_to_world
    return Homography(np.linalg.inv(plane_to_image), pose.height_m)


def default_correspondence_grid() -> list[PlanePoint]:
    """A parking-lot-like pattern: 3 lateral columns by 4 forward rows."""
    return [PlanePoint(x, y) for y in (6.0, 10.0, 18.0, 30.0) for x in (-4.0, 0.0, 4.0)]


def ground_correspondences(
    pose: CameraPose, k: Intrinsics, grid: list[PlanePoint] | None = None
) -> list[Correspondence]:
    """Exact correspondences for the grid under the posed camera (own frame)."""
    own = CameraPose(
        height_m=pose.height_m,
        pitch_deg=pose.pitch_deg,
        yaw_deg=pose.yaw_deg,
        roll_deg=pose.roll_deg,
    )
    return [
        Correspondence(project_ground_point(own, k, g), g)
        for g in (grid if grid is not None else default_correspondence_grid())
    ]


def ground_range_raster(
    pose: CameraPose, k: Intrinsics, width: int, height: int
) -> np.ndarray:
    """Exact camera-to-ground range per pixel; sky/invalid pixels are 0.

    Computed by ray casting (independent of the homography machinery): each
    pixel's ray is intersected with the ground plane below the camera.
    """
    r = rotation_world_to_camera(pose)
    us = (np.arange(width) - k.cu) / k.fx
    vs = (np.arange(height) - k.cv) / k.fy
    uu, vv = np.meshgrid(us, vs)
    dirs_c = np.stack([uu, vv, np.ones_like(uu)], axis=-1)
    dirs_w = dirs_c @ r  # row-vector form of R^T @ dir
    dy = dirs_w[..., 1]
    with np.errstate(divide="ignore", invalid="ignore"):
        t = -pose.height_m / dy
    norms = np.linalg.norm(dirs_c, axis=-1)
    ranges = t * norms
    ranges[(dy >= -1e-12) | ~np.isfinite(ranges)] = 0.0
    return ranges


def _billboard_box(
    pose: CameraPose, k: Intrinsics, obj: SceneObject
) -> tuple[float, float, float, float]:
    right = rotation_world_to_camera(pose)[0]
    center = np.array([obj.ground_x_m, 0.0, obj.ground_y_m])
    half = 0.5 * obj.width_m * right
    up = np.array([0.0, obj.height_m, 0.0])
    bottom_l = project_world_point(pose, k, center - half)
    bottom_r = project_world_point(pose, k, center + half)
    top_l = project_world_point(pose, k, center - half + up)
    top_r = project_world_point(pose, k, center + half + up)
    x1 = min(bottom_l.u, bottom_r.u)
    x2 = max(bottom_l.u, bottom_r.u)
    y1 = min(top_l.v, top_r.v)
    y2 = max(bottom_l.v, bottom_r.v)
    return x1, y1, x2, y2


@dataclass
class Scene:
    """Everything one synthetic frame feeds into the pipeline, plus its truth."""

    frame_id: str
    pose: CameraPose
    intrinsics: Intrinsics
    image_width: int
    image_height: int
    correspondences: list[Correspondence]
    vanishing_point: VanishingPoint
    homography: Homography
    detections: list[Detection]
    true_distances: list[float]
    object_planes: list[PlanePoint]
    raster: DepthRaster

    def calibration_session(self) -> CalibrationSession:
        return CalibrationSession(
            image_id=self.frame_id,
            camera_height_m=self.pose.height_m,
            correspondences=list(self.correspondences),
            intrinsics=self.intrinsics,
            vanishing_point=self.vanishing_point,
        )


def generate_scene(
    pose: CameraPose,
    k: Intrinsics,
    objects: list[SceneObject],
    noise: NoiseSpec | None = None,
    image_width: int = 1280,
    image_height: int = 720,
    frame_id: str = "frame_000000",
    corr_grid: list[PlanePoint] | None = None,
) -> Scene:
    """Generate one frame's correspondences, detections, raster, and truth.

    The scene is expressed in the camera's own plane frame (origin below the
    camera); x_m/z_m offsets on the pose are ignored here.
    """
    own = CameraPose(
        height_m=pose.height_m,
        pitch_deg=pose.pitch_deg,
        yaw_deg=pose.yaw_deg,
        roll_deg=pose.roll_deg,
    )
    rng = np.random.default_rng(noise.seed) if noise is not None else None

    corrs = ground_correspondences(own, k, corr_grid)
    vp = vanishing_point_of(own, k)
    homography = true_homography(own, k)

    ranges = ground_range_raster(own, k, image_width, image_height)

    boxes = {i: _billboard_box(own, k, obj) for i, obj in enumerate(objects)}
    # paint in ascending lower-edge order so the box winning the occlusion
    # rule ("keep the lowest") is painted last and its region stays pure
    paint_order = sorted(
        boxes,
        key=lambda i: (
            boxes[i][3],
            (boxes[i][2] - boxes[i][0]) * (boxes[i][3] - boxes[i][1]),
            -i,
        ),
    )
    for i in paint_order:
        obj = objects[i]
        x1, y1, x2, y2 = boxes[i]
        dist = math.sqrt(obj.ground_x_m**2 + obj.ground_y_m**2 + own.height_m**2)
        u0, u1 = max(0, math.ceil(x1)), min(image_width, math.ceil(x2))
        v0, v1 = max(0, math.ceil(y1)), min(image_height, math.ceil(y2))
        if u0 < u1 and v0 < v1:
            ranges[v0:v1, u0:u1] = dist

    if rng is not None and noise.raster_sigma_rel > 0.0:
        valid = ranges > 0.0
        jitter = 1.0 + noise.raster_sigma_rel * rng.standard_normal(ranges.shape)
        ranges[valid] = np.maximum(ranges[valid] * jitter[valid], 1e-3)

    detections = []
    true_distances = []
    object_planes = []
    for i, obj in enumerate(objects):
        x1, y1, x2, y2 = boxes[i]
        if rng is not None and noise.box_sigma_px > 0.0:
            dx1, dy1, dx2, dy2 = noise.box_sigma_px * rng.standard_normal(4)
            x1, y1, x2, y2 = x1 + dx1, y1 + dy1, x2 + dx2, y2 + dy2
            if x2 <= x1:
                x1, x2 = x2 - 0.5, x1 + 0.5
            if y2 <= y1:
                y1, y2 = y2 - 0.5, y1 + 0.5
        detections.append(
            Detection(
                cls=obj.cls,
                x1=x1,
                y1=y1,
                x2=x2,
                y2=y2,
                confidence=round(0.8 + 0.19 * ((i * 7919) % 100) / 100.0, 4),
                frame_id=frame_id,
                object_id=f"obj_{i:03d}",
            )
        )
        true_distances.append(
            math.sqrt(obj.ground_x_m**2 + obj.ground_y_m**2 + own.height_m**2)
        )
        object_planes.append(PlanePoint(obj.ground_x_m, obj.ground_y_m))

    raster = DepthRaster(
        width=image_width, height=image_height, values=ranges, frame_id=frame_id
    )
    return Scene(
        frame_id=frame_id,
        pose=own,
        intrinsics=k,
        image_width=image_width,
        image_height=image_height,
        correspondences=corrs,
        vanishing_point=vp,
        homography=homography,
        detections=detections,
        true_distances=true_distances,
        object_planes=object_planes,
        raster=raster,
    )


def corresponding_pixel_pairs(
    base_pose: CameraPose,
    shifted_pose_: CameraPose,
    k_base: Intrinsics,
    k_shifted: Intrinsics,
    plane_points: list[PlanePoint],
) -> list[tuple[PixelPoint, PixelPoint]]:
    """Pixels of shared world ground points as seen by two posed cameras.

    Plane points are in the shared world frame (the base camera's frame when
    base x_m = z_m = 0), honoring each pose's windshield offsets.
    """
    return [
        (
            project_ground_point(base_pose, k_base, g),
            project_ground_point(shifted_pose_, k_shifted, g),
        )
        for g in plane_points
    ]


def tilt_error_table(
    pose: CameraPose,
    k: Intrinsics,
    tilts_deg: list[float],
    distances_m: list[float],
) -> list[dict]:
    """Ground-truth error from calibrating flat while the road is tilted.

    For each (tilt, along-road distance) the true road point is projected
    with the pinhole camera and then measured through the flat-plane
    homography; rows report the true range, the homography range, and their
    absolute difference. Uphill tilts are positive.
    """
    flat = true_homography(pose, k)
    center = camera_center(pose)
    rows = []
    for tilt in tilts_deg:
        rad = math.radians(tilt)
        for dist in distances_m:
            point_w = np.array([0.0, dist * math.sin(rad), dist * math.cos(rad)])
            pixel = project_world_point(pose, k, point_w)
            assigned = ground_distance(flat, pixel)
            true_range = float(np.linalg.norm(point_w - center))
            rows.append(
                {
                    "tilt_deg": tilt,
                    "distance_m": dist,
                    "true_range_m": true_range,
                    "homography_range_m": assigned,
                    "error_m": abs(assigned - true_range),
                }
            )
    return rows


@dataclass
class SceneFilePaths:
    correspondences: Path
    homography: Path
    detections: Path
    manifest: Path
    truth: Path
    rasters: list[Path] = field(default_factory=list)


def write_scenes(scenes: list[Scene], out_dir: str | Path, camera_id: str = "synth") -> SceneFilePaths:
    """Write a batch of frames from one camera in the pipeline's file formats."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    first = scenes[0]

    paths = SceneFilePaths(
        correspondences=out / "correspondences.json",
        homography=out / "homography.json",
        detections=out / "detections.jsonl",
        manifest=out / "manifest.jsonl",
        truth=out / "scene_truth.json",
    )

    session = first.calibration_session()
    paths.correspondences.write_text(json.dumps(session_to_dict(session), indent=2) + "\n")
    paths.homography.write_text(
        json.dumps(homography_to_dict(first.homography, camera_id), indent=2) + "\n"
    )

    manifest_entries = []
    with open(paths.detections, "w") as det_fh:
        for scene in scenes:
            raster_path = out / f"raster_{scene.frame_id}.pfm"
            write_pfm(scene.raster, raster_path)
            paths.rasters.append(raster_path)
            manifest_entries.append((scene.frame_id, raster_path.name))
            for d in scene.detections:
                det_fh.write(json.dumps(detection_to_dict(d)) + "\n")
    write_manifest(manifest_entries, paths.manifest)

    truth = {
        "camera_id": camera_id,
        "pose": {
            "height_m": first.pose.height_m,
            "pitch_deg": first.pose.pitch_deg,
            "yaw_deg": first.pose.yaw_deg,
            "roll_deg": first.pose.roll_deg,
        },
        "intrinsics": {
            "fx": first.intrinsics.fx,
            "fy": first.intrinsics.fy,
            "cu": first.intrinsics.cu,
            "cv": first.intrinsics.cv,
        },
        "vanishing_point": [first.vanishing_point.vu, first.vanishing_point.vv],
        "frames": [
            {
                "frame_id": scene.frame_id,
                "objects": [
                    {
                        "object_id": d.object_id,
                        "cls": d.cls.value,
                        "box": [d.x1, d.y1, d.x2, d.y2],
                        "plane": [g.x, g.y],
                        "true_distance_m": dist,
                    }
                    for d, g, dist in zip(
                        scene.detections, scene.object_planes, scene.true_distances
                    )
                ],
            }
            for scene in scenes
        ],
    }
    paths.truth.write_text(json.dumps(truth, indent=2) + "\n")
    return paths
