"""Figure rendering for the report-producing commands.

Each report path writes its delimited data first; these helpers render the
companion matplotlib figures next to it. PNG metadata is pinned so repeated
runs produce byte-identical files.
"""

from __future__ import annotations

import csv
import io
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .evaluation import PositionReport

_PNG_METADATA = {"Software": "planeval"}


def _save(fig, path: str | Path) -> None:
    fig.savefig(path, dpi=120, metadata=_PNG_METADATA)
    plt.close(fig)


def render_abs_rel_figure(reports: list[PositionReport], path: str | Path) -> None:
    """Grouped bars of base/shifted abs-rel per viewpoint."""
    labels = [r.viewpoint_id for r in reports]
    base = [np.nan if r.abs_rel_base is None else r.abs_rel_base for r in reports]
    shifted = [np.nan if r.abs_rel_shifted is None else r.abs_rel_shifted for r in reports]
    x = np.arange(len(labels))
    fig, ax = plt.subplots(figsize=(max(6.0, 1.2 * len(labels)), 4.0))
    ax.bar(x - 0.2, base, width=0.4, label="base", color="#4878cf")
    ax.bar(x + 0.2, shifted, width=0.4, label="shifted", color="#d65f5f")
    ax.set_xticks(x)
    ax.set_xticklabels(labels, rotation=30, ha="right")
    ax.set_ylabel("abs-rel [%]")
    ax.set_title("Absolute relative error per viewpoint")
    ax.legend()
    fig.tight_layout()
    _save(fig, path)


def render_scale_figure(reports: list[PositionReport], path: str | Path) -> None:
    """Perceived scale per viewpoint with the shifted-minus-base delta."""
    labels = [r.viewpoint_id for r in reports]
    base = [np.nan if r.scale_base is None else r.scale_base for r in reports]
    shifted = [np.nan if r.scale_shifted is None else r.scale_shifted for r in reports]
    delta = [np.nan if r.scale_delta is None else r.scale_delta for r in reports]
    x = np.arange(len(labels))
    fig, (ax1, ax2) = plt.subplots(2, 1, figsize=(max(6.0, 1.2 * len(labels)), 6.0), sharex=True)
    ax1.bar(x - 0.2, base, width=0.4, label="base", color="#4878cf")
    ax1.bar(x + 0.2, shifted, width=0.4, label="shifted", color="#d65f5f")
    ax1.set_ylabel("perceived scale")
    ax1.set_title("Perceived scale per viewpoint")
    ax1.legend()
    ax2.bar(x, delta, width=0.5, color="#6acc65")
    ax2.axhline(0.0, color="black", linewidth=0.8)
    ax2.set_ylabel("scale S-B")
    ax2.set_xticks(x)
    ax2.set_xticklabels(labels, rotation=30, ha="right")
    fig.tight_layout()
    _save(fig, path)


def render_grid_search_figure(
    table: dict[tuple[float, float], float | None],
    alphas: list[float],
    betas: list[float],
    path: str | Path,
) -> None:
    """Heatmap of abs-rel over the (alpha, beta) grid."""
    grid = np.full((len(alphas), len(betas)), np.nan)
    for i, a in enumerate(alphas):
        for j, b in enumerate(betas):
            v = table.get((a, b))
            if v is not None:
                grid[i, j] = v
    fig, ax = plt.subplots(figsize=(1.2 * len(betas) + 2.5, 1.0 * len(alphas) + 2.0))
    im = ax.imshow(grid, cmap="viridis", aspect="auto")
    ax.set_xticks(range(len(betas)))
    ax.set_xticklabels([f"{b:g}" for b in betas])
    ax.set_yticks(range(len(alphas)))
    ax.set_yticklabels([f"{a:g}" for a in alphas])
    ax.set_xlabel("beta (percentile)")
    ax.set_ylabel("alpha (box fraction)")
    ax.set_title("abs-rel [%] per grid cell")
    for i in range(len(alphas)):
        for j in range(len(betas)):
            if np.isfinite(grid[i, j]):
                ax.text(j, i, f"{grid[i, j]:.3g}", ha="center", va="center", color="white")
    fig.colorbar(im, ax=ax)
    fig.tight_layout()
    _save(fig, path)


def render_tilt_error_figure(rows: list[dict], path: str | Path) -> None:
    """Error-vs-distance curves, one per ground tilt."""
    by_tilt: dict[float, list[tuple[float, float]]] = {}
    for r in rows:
        by_tilt.setdefault(r["tilt_deg"], []).append((r["distance_m"], r["error_m"]))
    fig, ax = plt.subplots(figsize=(6.5, 4.5))
    for tilt in sorted(by_tilt):
        pts = sorted(by_tilt[tilt])
        ax.plot([p[0] for p in pts], [p[1] for p in pts], marker="o", label=f"{tilt:g} deg")
    ax.set_xlabel("distance along road [m]")
    ax.set_ylabel("ground-truth error [m]")
    ax.set_title("Flat-plane assumption error under road tilt")
    ax.legend(title="tilt")
    fig.tight_layout()
    _save(fig, path)


def grid_table_csv(
    table: dict[tuple[float, float], float | None],
    alphas: list[float],
    betas: list[float],
) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["alpha"] + [f"beta_{b:g}" for b in betas])
    for a in alphas:
        row = [f"{a:g}"]
        for b in betas:
            v = table.get((a, b))
            row.append("" if v is None else format(v, ".6g"))
        writer.writerow(row)
    return buf.getvalue()


def tilt_table_csv(rows: list[dict]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["tilt_deg", "distance_m", "true_range_m", "homography_range_m", "error_m"])
    for r in rows:
        writer.writerow(
            [
                format(r["tilt_deg"], "g"),
                format(r["distance_m"], "g"),
                format(r["true_range_m"], ".6g"),
                format(r["homography_range_m"], ".6g"),
                format(r["error_m"], ".6g"),
            ]
        )
    return buf.getvalue()
