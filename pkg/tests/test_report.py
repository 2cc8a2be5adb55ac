"""Run reports: iteration CSV, release-mass curve, rendered figures."""

from __future__ import annotations

import csv

import numpy as np
import pytest

from latentbrush import PainterConfig, paint_trajectory
from latentbrush.report import (
    release_masses,
    write_iteration_csv,
    write_report,
)


def test_release_masses_known_values():
    frames = np.zeros((3, 1, 2, 2), dtype=np.float32)
    frames[0] = 1.0  # from blank: 4 cells x 1.0
    frames[1] = 1.0  # unchanged
    frames[2] = 1.0
    frames[2, 0, 0, 0] = 3.0  # one cell moves by 2
    masses = release_masses(frames)
    assert masses.tolist() == [4.0, 0.0, 2.0]


def test_release_masses_edge_cases():
    assert release_masses(np.zeros((0, 1, 2, 2))).shape == (0,)
    with pytest.raises(ValueError):
        release_masses(np.zeros((2, 2)))


def test_release_masses_total_is_path_length():
    rng = np.random.default_rng(41)
    frames = rng.normal(size=(5, 2, 4, 4)).astype(np.float32)
    masses = release_masses(frames)
    total = float(np.abs(np.diff(frames.astype(np.float64), axis=0)).sum())
    total += float(np.abs(frames[0].astype(np.float64)).sum())
    assert float(masses.sum()) == pytest.approx(total)


def test_iteration_csv_contents(tmp_path, bundled_trajectory):
    run = paint_trajectory(bundled_trajectory, PainterConfig())
    path = tmp_path / "iterations.csv"
    write_iteration_csv(run.reports, path)
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    assert rows[0] == ["iteration", "qualified", "channels", "strokes", "residual_gap"]
    assert len(rows) == 1 + len(run.reports)
    for row, report in zip(rows[1:], run.reports):
        assert int(row[0]) == report.iteration
        assert int(row[1]) == int(report.qualified)
        assert row[2] == ";".join(str(c) for c in report.channels_painted)
        assert int(row[3]) == len(report.strokes)
        assert float(row[4]) == pytest.approx(report.residual_gap)


def test_write_report_bundle(tmp_path, bundled_trajectory):
    run = paint_trajectory(bundled_trajectory, PainterConfig(), collect_frames=True)
    paths = write_report(run.reports, run.canvas.heatmap, run.frames, tmp_path / "report")
    assert [p.name for p in paths] == ["iterations.csv", "heatmap.png", "release_curve.png"]
    for p in paths:
        assert p.stat().st_size > 0
    # PNG magic on the figures
    for p in paths[1:]:
        assert p.read_bytes()[:8] == b"\x89PNG\r\n\x1a\n"
