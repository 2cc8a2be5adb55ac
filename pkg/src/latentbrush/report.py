"""Run reports: delimited iteration summaries and rendered figures.

The CLI's report path drops three artifacts in a directory: a CSV of
per-iteration outcomes, a release-heatmap figure, and a per-frame
release-mass curve.  The figures are rendered headlessly.
"""

from __future__ import annotations

import csv
from pathlib import Path
from typing import Sequence

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .strokes import IterationReport

__all__ = [
    "release_masses",
    "save_heatmap_figure",
    "save_release_curve",
    "write_iteration_csv",
    "write_report",
]


def write_iteration_csv(reports: Sequence[IterationReport], path: str | Path) -> None:
    """One CSV row per trajectory iteration."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["iteration", "qualified", "channels", "strokes", "residual_gap"])
        for report in reports:
            writer.writerow(
                [
                    report.iteration,
                    int(report.qualified),
                    ";".join(str(c) for c in report.channels_painted),
                    len(report.strokes),
                    f"{report.residual_gap:.17g}",
                ]
            )


def release_masses(frames: np.ndarray) -> np.ndarray:
    """Per-frame released L1 mass: how much each frame changed.

    Frame 0 is measured against the blank (zero) canvas.
    """
    frames = np.asarray(frames, dtype=np.float64)
    if frames.ndim != 4:
        raise ValueError("frames must have shape (F, C, H, W)")
    if frames.shape[0] == 0:
        return np.zeros(0)
    previous = np.concatenate([np.zeros_like(frames[:1]), frames[:-1]])
    return np.abs(frames - previous).sum(axis=(1, 2, 3))


def save_heatmap_figure(heatmap: np.ndarray, path: str | Path) -> None:
    """Render the spatial release-count heatmap to an image file."""
    fig, ax = plt.subplots(figsize=(5, 4.2))
    image = ax.imshow(np.asarray(heatmap), cmap="magma", interpolation="nearest")
    ax.set_title("Release heatmap")
    ax.set_xlabel("x")
    ax.set_ylabel("y")
    fig.colorbar(image, ax=ax, label="releases")
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def save_release_curve(frames: np.ndarray, path: str | Path) -> None:
    """Render per-frame released mass as a line plot."""
    masses = release_masses(frames)
    fig, ax = plt.subplots(figsize=(6, 3.6))
    ax.plot(np.arange(len(masses)), masses, marker="o", markersize=3, linewidth=1.2)
    ax.set_title("Released L1 mass per frame")
    ax.set_xlabel("frame")
    ax.set_ylabel("released L1")
    ax.grid(True, alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def write_report(
    reports: Sequence[IterationReport],
    heatmap: np.ndarray,
    frames: np.ndarray,
    directory: str | Path,
) -> list[Path]:
    """Write the full report bundle; returns the created paths."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    csv_path = directory / "iterations.csv"
    heatmap_path = directory / "heatmap.png"
    curve_path = directory / "release_curve.png"
    write_iteration_csv(reports, csv_path)
    save_heatmap_figure(heatmap, heatmap_path)
    save_release_curve(frames, curve_path)
    return [csv_path, heatmap_path, curve_path]
