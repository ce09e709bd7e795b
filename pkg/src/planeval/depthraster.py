"""Dense predicted-distance rasters and percentile-based object distance extraction.

Rasters are stored as grayscale PFM: text header ``Pf``, ``width height``,
a scale line whose sign encodes endianness (negative = little-endian),
then 32-bit floats in bottom-up row order. Values are distances (range),
not z-depth, in whatever units the model emits; entries that are zero,
negative, or non-finite are sentinel "invalid pixel" markers and are
excluded from extraction.

The extraction percentile uses linear interpolation between closest ranks
(index (n-1) * beta / 100 into the sorted values), fixed here so that any
two implementations of this pipeline agree bit-for-bit.
"""

from __future__ import annotations

import json
import math
import struct
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import EmptyRegion, InvalidInput, MalformedHeader, TruncatedData, UnsupportedChannels
from .detection import Detection


@dataclass(frozen=True)
class DepthRaster:
    """One frame's dense predicted distances, row-major from the top-left.

    Values are held in double precision; the PFM interchange format stores
    32-bit floats, so file round trips quantize to float32.
    """

    width: int
    height: int
    values: np.ndarray  # float64, shape (height, width)
    frame_id: str = ""

    def __post_init__(self):
        if self.width <= 0 or self.height <= 0:
            raise ValueError(f"raster dimensions must be positive, got {self.width}x{self.height}")
        arr = np.ascontiguousarray(np.asarray(self.values, dtype=np.float64))
        if arr.size != self.width * self.height:
            raise ValueError(
                f"raster has {arr.size} values, expected {self.width * self.height}"
            )
        arr = arr.reshape(self.height, self.width)
        arr.setflags(write=False)
        object.__setattr__(self, "values", arr)

    def valid_mask(self) -> np.ndarray:
        return np.isfinite(self.values) & (self.values > 0.0)


@dataclass(frozen=True)
class ExtractionParams:
    """Box resize fraction alpha in (0, 1] and percentile beta in [0, 100]."""

    alpha: float
    beta: float

    def __post_init__(self):
        if not (0.0 < self.alpha <= 1.0):
            raise ValueError(f"alpha must lie in (0, 1], got {self.alpha}")
        if not (0.0 <= self.beta <= 100.0):
            raise ValueError(f"beta must lie in [0, 100], got {self.beta}")


def shrink_box(d: Detection, alpha: float) -> tuple[float, float, float, float]:
    """Scale a box about its center, preserving center and aspect ratio."""
    if not (0.0 < alpha <= 1.0):
        raise ValueError(f"alpha must lie in (0, 1], got {alpha}")
    cx = (d.x1 + d.x2) / 2.0
    cy = (d.y1 + d.y2) / 2.0
    half_w = alpha * (d.x2 - d.x1) / 2.0
    half_h = alpha * (d.y2 - d.y1) / 2.0
    return cx - half_w, cy - half_h, cx + half_w, cy + half_h


def _pixel_range(lo: float, hi: float, size: int) -> tuple[int, int]:
    # integers n with lo <= n < hi, clamped to [0, size)
    start = max(0, math.ceil(lo))
    stop = min(size, math.ceil(hi))
    return start, stop


def region_values(r: DepthRaster, d: Detection, alpha: float) -> np.ndarray:
    """Valid raster values at integer pixels inside the shrunk, clamped box."""
    x1, y1, x2, y2 = shrink_box(d, alpha)
    u0, u1 = _pixel_range(x1, x2, r.width)
    v0, v1 = _pixel_range(y1, y2, r.height)
    if u0 >= u1 or v0 >= v1:
        raise EmptyRegion(
            f"shrunk box ({x1:g},{y1:g},{x2:g},{y2:g}) covers no raster pixel"
        )
    patch = r.values[v0:v1, u0:u1]
    valid = patch[np.isfinite(patch) & (patch > 0.0)]
    if valid.size == 0:
        raise EmptyRegion("shrunk box contains no valid pixel")
    return valid


def percentile(values: np.ndarray, beta: float) -> float:
    """Linear-interpolation percentile: index (n-1) * beta / 100 of the sorted values."""
    return float(np.percentile(np.asarray(values, dtype=np.float64), beta, method="linear"))


def extract_distance(r: DepthRaster, d: Detection, p: ExtractionParams) -> float:
    """Predicted distance of a detection: the beta-th percentile of in-box values."""
    return percentile(region_values(r, d, p.alpha), p.beta)


def write_pfm(r: DepthRaster, path: str | Path) -> None:
    """Write a grayscale little-endian PFM (bottom-up row order)."""
    with open(path, "wb") as fh:
        fh.write(b"Pf\n")
        fh.write(f"{r.width} {r.height}\n".encode("ascii"))
        fh.write(b"-1.0\n")
        flipped = np.ascontiguousarray(r.values[::-1, :], dtype="<f4")
        fh.write(flipped.tobytes())


def _read_header_token(fh) -> bytes:
    # whitespace-delimited token, tolerating any blank separators
    token = b""
    while True:
        ch = fh.read(1)
        if ch == b"":
            raise MalformedHeader("unexpected end of file in PFM header")
        if ch.isspace():
            if token:
                return token
            continue
        token += ch


def read_pfm(path: str | Path, frame_id: str = "") -> DepthRaster:
    """Read a grayscale PFM file; color ('PF') files are rejected."""
    with open(path, "rb") as fh:
        magic = _read_header_token(fh)
        if magic == b"PF":
            raise UnsupportedChannels("color PFM (3-channel) is not supported")
        if magic != b"Pf":
            raise MalformedHeader(f"bad PFM magic {magic!r}, expected b'Pf'")
        try:
            width = int(_read_header_token(fh))
            height = int(_read_header_token(fh))
            scale = float(_read_header_token(fh))
        except ValueError as exc:
            raise MalformedHeader(f"bad PFM header field: {exc}") from None
        if width <= 0 or height <= 0:
            raise MalformedHeader(f"bad PFM dimensions {width}x{height}")
        if scale == 0.0:
            raise MalformedHeader("PFM scale must be nonzero")
        count = width * height
        payload = fh.read(4 * count)
        if len(payload) < 4 * count:
            raise TruncatedData(
                f"PFM payload has {len(payload)} bytes, expected {4 * count}"
            )
        endian = "<f4" if scale < 0.0 else ">f4"
        data = np.frombuffer(payload, dtype=endian).astype(np.float32)
        if abs(scale) != 1.0:
            data = data * np.float32(abs(scale))
        rows = data.reshape(height, width)[::-1, :]  # stored bottom-up
    return DepthRaster(width=width, height=height, values=rows, frame_id=frame_id)


def write_manifest(entries: list[tuple[str, str]], path: str | Path) -> None:
    """Write frame_id -> raster path bindings as JSON Lines."""
    with open(path, "w") as fh:
        for frame_id, raster in entries:
            fh.write(json.dumps({"frame_id": frame_id, "raster": raster}) + "\n")


def read_manifest(path: str | Path) -> list[tuple[str, str]]:
    out = []
    with open(path) as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            payload = json.loads(line)
            try:
                out.append((str(payload["frame_id"]), str(payload["raster"])))
            except KeyError as exc:
                raise InvalidInput(f"manifest record missing {exc}") from None
    return out


def unpack_float(raw: bytes, little_endian: bool = True) -> float:
    """Decode one float32, for tests poking at the wire format."""
    return struct.unpack("<f" if little_endian else ">f", raw)[0]
