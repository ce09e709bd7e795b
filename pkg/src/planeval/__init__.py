"""Homography-based ground-truth distances and viewpoint-shift evaluation
for monocular depth estimators on road scenes.

Calibrate an image-to-ground-plane homography from labeled points, assign
metric distances to detected objects, extract predicted distances from
depth rasters, and report per-viewpoint error and perceived-scale drift.
A synthetic pinhole oracle makes every geometric stage verifiable.
"""

__version__ = "0.1.0"

from .calibration import CalibrationSession, Intrinsics, VanishingPoint, fit_session
from .depthraster import DepthRaster, ExtractionParams, extract_distance, read_pfm, write_pfm
from .detection import Detection, FilterConfig, ObjectClass, anchor_point, filter_detections
from .errors import DomainError
from .evaluation import (
    Camera,
    ObjectSample,
    ScaleFactor,
    ScaleScope,
    abs_rel,
    build_position_reports,
    compare_gt_sources,
    compute_scale,
    grid_search_alpha_beta,
    spearman,
)
from .geometry import (
    Correspondence,
    Homography,
    PixelPoint,
    PlanePoint,
    estimate_homography,
    ground_distance,
    project,
    transfer_homography,
)
from .gps import GpsPoint, SlopeStats, slope_stats
from .synthcam import CameraPose, SceneObject, generate_scene

__all__ = [
    "__version__",
    "CalibrationSession",
    "Intrinsics",
    "VanishingPoint",
    "fit_session",
    "DepthRaster",
    "ExtractionParams",
    "extract_distance",
    "read_pfm",
    "write_pfm",
    "Detection",
    "FilterConfig",
    "ObjectClass",
    "anchor_point",
    "filter_detections",
    "DomainError",
    "Camera",
    "ObjectSample",
    "ScaleFactor",
    "ScaleScope",
    "abs_rel",
    "build_position_reports",
    "compare_gt_sources",
    "compute_scale",
    "grid_search_alpha_beta",
    "spearman",
    "Correspondence",
    "Homography",
    "PixelPoint",
    "PlanePoint",
    "estimate_homography",
    "ground_distance",
    "project",
    "transfer_homography",
    "GpsPoint",
    "SlopeStats",
    "slope_stats",
    "CameraPose",
    "SceneObject",
    "generate_scene",
]
