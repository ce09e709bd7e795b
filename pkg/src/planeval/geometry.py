"""Projective geometry core: image-to-ground-plane homographies.

Conventions
-----------
Image coordinates (u, v) are pixels, u growing right and v growing down
from the top-left corner. Plane coordinates (x, y) are meters on the road
plane, x lateral and y forward, with the origin directly below the camera.
A homography H maps homogeneous pixels to homogeneous plane points,

    [X, Y, W]^T = H [u, v, 1]^T,   (x, y) = (X/W, Y/W),

and the metric distance from the camera to a ground point is
sqrt(x^2 + y^2 + h^2) where h is the camera height.

Matrices are stored in a canonical form (Frobenius norm 1, deterministic
sign) so that equality of calibrations is equality of matrices.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import DegenerateConfiguration, InsufficientPoints, PointAtInfinity

# |W| at or below this (for a canonically scaled matrix) counts as the line
# at infinity: below double-precision meaningfulness.
W_EPSILON = 1e-12

# Entries smaller than this are ignored when picking the canonical sign.
_SIGN_EPSILON = 1e-9

# A design matrix whose 8th singular value falls below this, relative to the
# largest, cannot pin down a unique homography.
_RANK_GAP_RTOL = 1e-10


@dataclass(frozen=True)
class PixelPoint:
    """A point in image coordinates (pixels). May lie outside the frame."""

    u: float
    v: float

    def __post_init__(self):
        if not (math.isfinite(self.u) and math.isfinite(self.v)):
            raise ValueError(f"pixel point must be finite, got ({self.u}, {self.v})")


@dataclass(frozen=True)
class PlanePoint:
    """A point on the metric ground plane (meters): x lateral, y forward."""

    x: float
    y: float

    def __post_init__(self):
        if not (math.isfinite(self.x) and math.isfinite(self.y)):
            raise ValueError(f"plane point must be finite, got ({self.x}, {self.y})")


@dataclass(frozen=True)
class Correspondence:
    """One labeled image point paired with its measured plane position."""

    image: PixelPoint
    plane: PlanePoint


def _canonicalize(m: np.ndarray) -> np.ndarray:
    """Scale a 3x3 matrix to Frobenius norm 1 with a deterministic sign."""
    norm = float(np.linalg.norm(m))
    if norm == 0.0 or not math.isfinite(norm):
        raise DegenerateConfiguration("homography matrix has no finite nonzero norm")
    # Skip the division when already canonical so that a read-back file
    # reproduces its bytes exactly.
    if abs(norm - 1.0) > 1e-12:
        m = m / norm
    if abs(m[2, 2]) > _SIGN_EPSILON:
        if m[2, 2] < 0.0:
            m = -m
    else:
        flat = m.ravel()
        lead = flat[np.abs(flat) > _SIGN_EPSILON]
        if lead.size and lead[0] < 0.0:
            m = -m
    return m


@dataclass(frozen=True)
class Homography:
    """Image-to-plane projective map plus the camera height it was calibrated at.

    The matrix is canonicalized on construction; any nonzero scalar multiple
    of a matrix constructs the same Homography.
    """

    m: np.ndarray
    camera_height_m: float

    def __post_init__(self):
        if not (math.isfinite(self.camera_height_m) and self.camera_height_m > 0.0):
            raise ValueError(f"camera_height_m must be positive, got {self.camera_height_m}")
        m = np.array(self.m, dtype=float)
        if m.shape != (3, 3):
            raise ValueError(f"homography matrix must be 3x3, got shape {m.shape}")
        if not np.all(np.isfinite(m)):
            raise ValueError("homography matrix must be finite")
        m = _canonicalize(m)
        if abs(float(np.linalg.det(m))) <= 1e-12:
            raise DegenerateConfiguration("homography matrix is singular after normalization")
        m.setflags(write=False)
        object.__setattr__(self, "m", m)

    def inverse(self) -> "Homography":
        return Homography(np.linalg.inv(self.m), self.camera_height_m)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Homography):
            return NotImplemented
        return (
            self.camera_height_m == other.camera_height_m
            and bool(np.array_equal(self.m, other.m))
        )


def project(h: Homography, p: PixelPoint) -> PlanePoint:
    """Map a pixel to the ground plane; raises PointAtInfinity on the horizon."""
    m = h.m
    w = m[2, 0] * p.u + m[2, 1] * p.v + m[2, 2]
    if abs(w) <= W_EPSILON:
        raise PointAtInfinity(f"pixel ({p.u:g}, {p.v:g}) lies on the horizon line (|W|={abs(w):.3e})")
    x = (m[0, 0] * p.u + m[0, 1] * p.v + m[0, 2]) / w
    y = (m[1, 0] * p.u + m[1, 1] * p.v + m[1, 2]) / w
    return PlanePoint(x, y)


def ground_distance(h: Homography, p: PixelPoint) -> float:
    """Metric camera-to-ground-point distance for a pixel assumed on the road."""
    pt = project(h, p)
    return math.sqrt(pt.x * pt.x + pt.y * pt.y + h.camera_height_m * h.camera_height_m)


def _hartley_normalization(points: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Similarity transform taking points to centroid 0, mean distance sqrt(2).

    Returns (T, transformed points). Required for a well-conditioned design
    matrix; exact on noise-free data.
    """
    centroid = points.mean(axis=0)
    shifted = points - centroid
    mean_dist = float(np.mean(np.linalg.norm(shifted, axis=1)))
    if mean_dist <= 0.0:
        raise DegenerateConfiguration("all points coincide; cannot normalize")
    s = math.sqrt(2.0) / mean_dist
    t = np.array(
        [[s, 0.0, -s * centroid[0]], [0.0, s, -s * centroid[1]], [0.0, 0.0, 1.0]]
    )
    return t, shifted * s


def estimate_homography(corrs: list[Correspondence], camera_height_m: float) -> Homography:
    """Least-squares homography from labeled correspondences (normalized DLT).

    Both point sets are Hartley-normalized, the 2Nx9 design matrix is solved
    by SVD, and the result is de-normalized and canonicalized. Exact inputs
    reproject to well below 1e-8 m.
    """
    n = len(corrs)
    if n < 4:
        raise InsufficientPoints(f"homography estimation needs at least 4 correspondences, got {n}")
    img = np.array([[c.image.u, c.image.v] for c in corrs], dtype=float)
    pln = np.array([[c.plane.x, c.plane.y] for c in corrs], dtype=float)

    t_img, img_n = _hartley_normalization(img)
    t_pln, pln_n = _hartley_normalization(pln)

    a = np.zeros((2 * n, 9), dtype=float)
    u, v = img_n[:, 0], img_n[:, 1]
    x, y = pln_n[:, 0], pln_n[:, 1]
    a[0::2, 0] = u
    a[0::2, 1] = v
    a[0::2, 2] = 1.0
    a[0::2, 6] = -x * u
    a[0::2, 7] = -x * v
    a[0::2, 8] = -x
    a[1::2, 3] = u
    a[1::2, 4] = v
    a[1::2, 5] = 1.0
    a[1::2, 6] = -y * u
    a[1::2, 7] = -y * v
    a[1::2, 8] = -y

    _, sing, vt = np.linalg.svd(a)
    # A unique (up to scale) solution needs rank 8: the 8th singular value
    # collapsing means collinear or duplicated points.
    if sing[7] < _RANK_GAP_RTOL * sing[0]:
        raise DegenerateConfiguration(
            f"design matrix is rank-deficient (s8/s1={sing[7] / sing[0]:.3e}); "
            "points are collinear or duplicated"
        )
    h_norm = vt[-1].reshape(3, 3)
    h = np.linalg.inv(t_pln) @ h_norm @ t_img
    return Homography(h, camera_height_m)


def transfer_homography(
    base: Homography,
    pairs: list[tuple[PixelPoint, PixelPoint]],
    camera_height_m: float,
) -> Homography:
    """Homography for a second camera from pixel pairs seen by both cameras.

    Each base pixel is pushed through the base calibration to the plane; the
    paired shifted pixels are then fit against those plane points.
    """
    if len(pairs) < 4:
        raise InsufficientPoints(f"transfer needs at least 4 pixel pairs, got {len(pairs)}")
    corrs = []
    for i, (base_px, shifted_px) in enumerate(pairs):
        try:
            plane = project(base, base_px)
        except PointAtInfinity as exc:
            raise PointAtInfinity(f"pair {i}: {exc.detail}") from None
        corrs.append(Correspondence(image=shifted_px, plane=plane))
    return estimate_homography(corrs, camera_height_m)


def homography_to_dict(h: Homography, camera_id: str) -> dict:
    return {
        "matrix": [[float(h.m[r, c]) for c in range(3)] for r in range(3)],
        "camera_height_m": float(h.camera_height_m),
        "camera_id": camera_id,
        "units": "meters",
    }


def homography_from_dict(payload: dict) -> tuple[Homography, str]:
    try:
        matrix = payload["matrix"]
        height = float(payload["camera_height_m"])
        camera_id = str(payload.get("camera_id", ""))
    except (KeyError, TypeError, ValueError) as exc:
        raise ValueError(f"bad homography payload: {exc}") from None
    return Homography(np.array(matrix, dtype=float), height), camera_id


def write_homography(h: Homography, path: str | Path, camera_id: str = "camera") -> None:
    Path(path).write_text(json.dumps(homography_to_dict(h, camera_id), indent=2) + "\n")


def read_homography(path: str | Path) -> tuple[Homography, str]:
    """Read a homography file; any nonzero matrix scale is accepted and re-normalized."""
    return homography_from_dict(json.loads(Path(path).read_text()))
