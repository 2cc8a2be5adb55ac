"""Top-level animation runner: one trajectory in, frames and a log out.

Dispatches between the greedy stroke engine and the whole-canvas
release effects, applying the shared frame bookkeeping either way:
frames never span trajectory iterations, a terminal flush (when
enabled) lands the canvas exactly on the last snapshot, and every run
ends with at least one frame.
"""

from __future__ import annotations

import logging

import numpy as np

from .core import (
    Canvas,
    FrameClock,
    LatentTrajectory,
    PainterConfig,
    ReleasePlan,
    StrokeEvent,
    StrokeLog,
    canvas_new,
    l1_gap,
    release_coords,
)
from .effects import (
    dissolve_plan,
    fade_frame_count,
    fade_plan,
    flip_frame_count,
    flip_plan,
    glow_plan,
    passthrough_plan,
)
from .strokes import IterationReport, PaintRun, flush_to_target, paint_trajectory

__all__ = ["render_animation"]

logger = logging.getLogger(__name__)


def render_animation(trajectory: LatentTrajectory, config: PainterConfig) -> PaintRun:
    """Animate a trajectory with the configured style, collecting frames.

    Returns a :class:`PaintRun` whose ``frames`` stack is always
    populated.  Stroke runs place localized brush strokes; effect runs
    release each snapshot in the effect's sweep order.  Glow, dissolve,
    flip, and passthrough record their releases as radius-0 events, so
    their logs replay exactly; fade frames are blended values with no
    source coordinates to record, so fade logs carry no events.
    """
    if not isinstance(trajectory, LatentTrajectory):
        trajectory = LatentTrajectory(np.asarray(trajectory))
    if config.effect == "strokes":
        return paint_trajectory(trajectory, config, collect_frames=True)
    return _run_effect(trajectory, config)


def _apply_plan(
    canvas: Canvas,
    snapshot: np.ndarray,
    plan: ReleasePlan,
    clock: FrameClock,
    events: list[StrokeEvent],
    record: bool = True,
) -> bool:
    """Release a plan's frame groups in order; returns True if any."""
    released = False
    for group in plan.frames:
        if group.shape[0] == 0:
            continue
        frame_index = clock.frame_index
        release_coords(canvas, snapshot, group)
        if record:
            events.extend(
                StrokeEvent(frame_index, plan.target_iteration, c, x, y, 0)
                for c, x, y in group.tolist()
            )
        clock.emit()
        released = True
    return released


def _run_effect(trajectory: LatentTrajectory, config: PainterConfig) -> PaintRun:
    c, h, w = trajectory.frame_shape
    params = config.effect_params
    canvas = canvas_new(c, h, w)
    clock = FrameClock(canvas, 1, collect=True)
    events: list[StrokeEvent] = []
    reports: list[IterationReport] = []

    for pos, snapshot in enumerate(trajectory):
        frames_before = clock.emitted
        if config.effect == "passthrough":
            # Baseline: exactly one frame per iteration, no gating.
            _apply_plan(canvas, snapshot, passthrough_plan(snapshot, pos), clock, events)
        elif config.effect == "glow":
            plan = glow_plan(canvas, snapshot, config.theta, params, pos)
            _apply_plan(canvas, snapshot, plan, clock, events)
        elif config.effect == "dissolve":
            plan = dissolve_plan(canvas, snapshot, config.theta, params, pos)
            _apply_plan(canvas, snapshot, plan, clock, events)
        elif config.effect == "flip":
            if l1_gap(canvas, snapshot) > 0.0:
                k = flip_frame_count((c, h, w), params)
                _apply_plan(canvas, snapshot, flip_plan(canvas, snapshot, k, pos), clock, events)
        elif config.effect == "fade":
            if l1_gap(canvas, snapshot) > 0.0:
                k = fade_frame_count((c, h, w), params)
                blends = fade_plan(canvas, snapshot, k)
                for blend in blends[:-1]:
                    canvas.z[:] = blend
                    clock.emit()
                # The last fade frame is a true full release of the
                # snapshot, so the heatmap records it.
                _apply_plan(canvas, snapshot, passthrough_plan(snapshot, pos), clock, events, record=False)
        else:  # pragma: no cover - PainterConfig already validates
            raise ValueError(f"unknown effect {config.effect!r}")
        emitted = clock.emitted - frames_before
        channels = list(range(c)) if emitted else []
        residual = l1_gap(canvas, snapshot)
        reports.append(IterationReport(pos, emitted > 0, channels, [], residual))
        logger.info(
            "iteration %d: effect=%s frames=%d residual=%.6g",
            pos,
            config.effect,
            emitted,
            residual,
        )

    flush_frame = None
    if config.final_flush:
        flush_frame = flush_to_target(canvas, trajectory.snapshots[-1], clock)

    log = StrokeLog(
        shape=(c, h, w), config=config, events=events, flush_frame=flush_frame
    )
    return PaintRun(
        reports=reports,
        log=log,
        canvas=canvas,
        frames=clock.stacked_frames((c, h, w)),
    )
