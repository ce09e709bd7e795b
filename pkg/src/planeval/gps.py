"""Road-slope statistics from GPS traces.

Traces are resampled to 1 Hz (nearest fix per whole second), consecutive
fixes form segments, and segments whose horizontal displacement is at or
below ``min_horizontal_m`` are dropped before computing slope angles
arctan(dalt / horizontal). Horizontal distance uses a local equirectangular
approximation, (dlat, dlon * cos(lat)) scaled by the Earth radius; at
segment lengths of a few meters the error against great-circle distance is
negligible.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import InsufficientData, InvalidInput, InvalidTrace

EARTH_RADIUS_M = 6371008.8


@dataclass(frozen=True)
class GpsPoint:
    t: float
    lat: float
    lon: float
    alt: float
    speed: float | None = None

    def __post_init__(self):
        if not (-90.0 <= self.lat <= 90.0):
            raise ValueError(f"latitude out of range: {self.lat}")
        if not (-180.0 <= self.lon <= 180.0):
            raise ValueError(f"longitude out of range: {self.lon}")


@dataclass(frozen=True)
class SlopeStats:
    mean_abs_deg: float
    median_abs_deg: float
    p99_abs_deg: float
    altitude_change_fraction: float
    n_segments: int


def horizontal_distance_m(a: GpsPoint, b: GpsPoint) -> float:
    dlat = math.radians(b.lat - a.lat)
    dlon = math.radians(b.lon - a.lon)
    mean_lat = math.radians((a.lat + b.lat) / 2.0)
    return EARTH_RADIUS_M * math.hypot(dlat, dlon * math.cos(mean_lat))


def resample_1hz(trace: list[GpsPoint]) -> list[GpsPoint]:
    """Nearest trace point for each whole second covered by the trace."""
    times = np.array([p.t for p in trace])
    seconds = np.arange(math.ceil(times[0]), math.floor(times[-1]) + 1)
    picked = []
    for s in seconds:
        i = int(np.searchsorted(times, s))
        if i == 0:
            picked.append(0)
        elif i >= len(times):
            picked.append(len(times) - 1)
        else:
            picked.append(i if times[i] - s < s - times[i - 1] else i - 1)
    return [trace[i] for i in picked]


def slope_stats(
    trace: list[GpsPoint],
    min_horizontal_m: float = 1.0,
    altitude_step_m: float = 1.0,
    fraction_over_raw_points: bool = False,
) -> SlopeStats:
    """Statistics of absolute road slope along a trace.

    altitude_change_fraction counts segments with |dalt| > altitude_step_m
    among displacement-filtered segments by default; with
    fraction_over_raw_points it counts all consecutive 1 Hz pairs instead.
    """
    if len(trace) < 2:
        raise InsufficientData(f"need at least 2 GPS points, got {len(trace)}")
    times = [p.t for p in trace]
    if any(b <= a for a, b in zip(times, times[1:])):
        raise InvalidTrace("timestamps must be strictly increasing")

    sampled = resample_1hz(trace)
    if len(sampled) < 2:
        raise InsufficientData("trace spans fewer than two whole seconds")

    slopes = []
    big_alt_kept = 0
    big_alt_raw = 0
    n_raw = 0
    for a, b in zip(sampled, sampled[1:]):
        dalt = b.alt - a.alt
        n_raw += 1
        if abs(dalt) > altitude_step_m:
            big_alt_raw += 1
        horizontal = horizontal_distance_m(a, b)
        if horizontal <= min_horizontal_m:
            continue
        slopes.append(math.degrees(math.atan(dalt / horizontal)))
        if abs(dalt) > altitude_step_m:
            big_alt_kept += 1

    if not slopes:
        raise InsufficientData("no segment exceeds the horizontal displacement threshold")

    abs_slopes = np.abs(np.array(slopes))
    if fraction_over_raw_points:
        fraction = big_alt_raw / n_raw
    else:
        fraction = big_alt_kept / len(slopes)
    return SlopeStats(
        mean_abs_deg=float(np.mean(abs_slopes)),
        median_abs_deg=float(np.median(abs_slopes)),
        p99_abs_deg=float(np.percentile(abs_slopes, 99.0, method="linear")),
        altitude_change_fraction=fraction,
        n_segments=len(slopes),
    )


def write_gps_csv(trace: list[GpsPoint], path: str | Path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["t", "lat", "lon", "alt", "speed"])
        for p in trace:
            writer.writerow(
                [
                    repr(float(p.t)),
                    repr(float(p.lat)),
                    repr(float(p.lon)),
                    repr(float(p.alt)),
                    "" if p.speed is None else repr(float(p.speed)),
                ]
            )


def read_gps_csv(path: str | Path) -> list[GpsPoint]:
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or [h.strip() for h in header] != ["t", "lat", "lon", "alt", "speed"]:
            raise InvalidInput(f"bad GPS CSV header: {header}")
        out = []
        for row in reader:
            if not row:
                continue
            try:
                out.append(
                    GpsPoint(
                        t=float(row[0]),
                        lat=float(row[1]),
                        lon=float(row[2]),
                        alt=float(row[3]),
                        speed=float(row[4]) if len(row) > 4 and row[4] != "" else None,
                    )
                )
            except (ValueError, IndexError) as exc:
                raise InvalidInput(f"bad GPS CSV row {row}: {exc}") from None
    return out
