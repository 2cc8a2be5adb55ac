"""Greedy brush-stroke placement over a latent canvas.

Painting one trajectory proceeds iteration by iteration.  An
iteration *qualifies* when the canvas-to-snapshot gap still exceeds a
fixed fraction ``rho`` of the largest gap seen so far; within a
qualified iteration, channels are painted in descending-gap order
under the same ratio test.  Each stroke is chosen greedily: maximise
windowed info-gain times move-cost over the not-yet-covered region,
hard-copy the snapshot under the square footprint, subtract the
footprint from the region, and recentre the move cost on the stroke
just placed.

Numeric discipline: payloads are float32; gap totals use
order-independent correctly-rounded sums; windowed sums accumulate in
float64 in a fixed row-major shift order.  Runs are therefore
bit-reproducible regardless of platform thread settings (the engine is
single-threaded NumPy slicing end to end).
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from .core import (
    Canvas,
    FrameClock,
    LatentTrajectory,
    PainterConfig,
    StrokeEvent,
    StrokeLog,
    canvas_new,
    footprint_slices,
    l1_gap,
)

__all__ = [
    "IterationReport",
    "PaintRun",
    "PolicyState",
    "apply_stroke",
    "box_sum",
    "flush_to_target",
    "info_gain",
    "motivation_field",
    "move_cost_field",
    "paint_channel",
    "paint_trajectory",
    "pick_stroke_point",
    "qualify_iteration",
    "select_channels",
    "stroke_region",
]

logger = logging.getLogger(__name__)


# ---------------------------------------------------------------------------
# Policy state


@dataclass
class PolicyState:
    """Running gap maxima that gate iterations and channels.

    ``max_total_gap`` is the largest whole-canvas gap observed in any
    previous qualified iteration; ``per_channel_max_gap`` tracks the
    same per channel.  Both start at zero so the first non-trivial
    iteration always qualifies.
    """

    max_total_gap: float = 0.0
    per_channel_max_gap: np.ndarray = field(
        default_factory=lambda: np.zeros(0, dtype=np.float64)
    )

    @classmethod
    def fresh(cls, channels: int) -> "PolicyState":
        return cls(0.0, np.zeros(channels, dtype=np.float64))


@dataclass
class IterationReport:
    """What one trajectory iteration contributed to the animation."""

    iteration: int
    qualified: bool
    channels_painted: list[int]
    strokes: list[StrokeEvent]
    residual_gap: float


@dataclass
class PaintRun:
    """Outcome of painting a whole trajectory."""

    reports: list[IterationReport]
    log: StrokeLog
    canvas: Canvas
    frames: np.ndarray | None = None


# ---------------------------------------------------------------------------
# Gating


def qualify_iteration(
    canvas: Canvas, snapshot: np.ndarray, policy: PolicyState, rho: float
) -> bool:
    """True when the remaining gap justifies painting this snapshot.

    The test is ``gap > rho * max_total_gap`` with the *previous*
    maximum; the caller updates the policy afterwards.  With a fresh
    policy the right side is zero, so any positive gap qualifies.
    """
    gap = l1_gap(canvas, snapshot)
    return gap > rho * policy.max_total_gap


def select_channels(
    canvas: Canvas,
    snapshot: np.ndarray,
    policy: PolicyState,
    rho: float,
    theta: float,
) -> list[int]:
    """Channels worth painting, most-behind first.

    A channel is selected when its gap exceeds ``rho`` times its own
    running maximum *and* at least one of its cells differs by more
    than ``theta`` (otherwise there is nothing a stroke could release).
    The returned order is descending by gap, ties broken by ascending
    channel index.  Running per-channel maxima are refreshed for every
    channel, selected or not.
    """
    channels = canvas.channels
    if policy.per_channel_max_gap.shape != (channels,):
        raise ValueError("policy was initialised for a different channel count")
    gaps = [l1_gap(canvas, snapshot, ch) for ch in range(channels)]
    selected = [
        ch
        for ch in range(channels)
        if gaps[ch] > rho * float(policy.per_channel_max_gap[ch])
        and bool(stroke_region(canvas, snapshot, ch, theta).any())
    ]
    selected.sort(key=lambda ch: (-gaps[ch], ch))
    np.maximum(policy.per_channel_max_gap, gaps, out=policy.per_channel_max_gap)
    return selected


# ---------------------------------------------------------------------------
# Stroke fields


def stroke_region(
    canvas: Canvas, snapshot: np.ndarray, channel: int, theta: float
) -> np.ndarray:
    """Boolean ``(H, W)`` mask of cells still owing more than ``theta``.

    The comparison is strict and happens at float32 precision (the
    threshold is rounded to float32 first), matching the precision of
    the stored values.
    """
    if not 0 <= channel < canvas.channels:
        raise ValueError(f"channel {channel} out of range")
    if snapshot.shape != canvas.z.shape:
        raise ValueError("snapshot shape does not match canvas")
    return np.abs(canvas.z[channel] - snapshot[channel]) > np.float32(theta)


def info_gain(canvas: Canvas, snapshot: np.ndarray, channel: int) -> np.ndarray:
    """Per-cell float32 gain ``|Z_c - D_c|`` for one channel."""
    if not 0 <= channel < canvas.channels:
        raise ValueError(f"channel {channel} out of range")
    if snapshot.shape != canvas.z.shape:
        raise ValueError("snapshot shape does not match canvas")
    return np.abs(canvas.z[channel] - snapshot[channel])


def move_cost_field(
    center: tuple[int, int] | None,
    height: int,
    width: int,
    sigma: float,
    epsilon: float,
    mode: str = "near",
) -> np.ndarray:
    """Float32 move-cost field centred on the previous stroke.

    ``near`` favours staying close: ``epsilon + (1 - epsilon) *
    exp(-d^2 / (2 sigma^2))``, ranging from 1 at the centre down to the
    ``epsilon`` floor far away.  ``far`` is the literal inverse
    reading, ``1 - (1 - epsilon) * exp(...)``, which favours jumping
    away.  With no centre yet, or ``mode="off"``, every cell costs 1.

    The field is built in float64 (the squared distances are exact
    integers) and rounded to float32 once at the end.
    """
    if not sigma > 0:
        raise ValueError("sigma must be positive")
    if not 0.0 < epsilon <= 1.0:
        raise ValueError("epsilon must lie in (0, 1]")
    if mode not in ("near", "far", "off"):
        raise ValueError(f"unknown cost mode {mode!r}")
    if center is None or mode == "off":
        return np.ones((height, width), dtype=np.float32)
    cx, cy = center
    xs = np.arange(width, dtype=np.float64) - float(cx)
    ys = np.arange(height, dtype=np.float64) - float(cy)
    d2 = ys[:, None] ** 2 + xs[None, :] ** 2
    bump = np.exp(-d2 / (2.0 * sigma * sigma))
    if mode == "near":
        out = epsilon + (1.0 - epsilon) * bump
    else:
        out = 1.0 - (1.0 - epsilon) * bump
    return out.astype(np.float32)


def motivation_field(gain: np.ndarray, cost: np.ndarray) -> np.ndarray:
    """Element-wise float32 product of gain and move cost."""
    if gain.shape != cost.shape:
        raise ValueError(f"shape mismatch: gain {gain.shape} vs cost {cost.shape}")
    return (gain * cost).astype(np.float32, copy=False)


def box_sum(field: np.ndarray, radius: int) -> np.ndarray:
    """Square-window sums of ``field`` at every cell, zero-padded.

    Accumulates float64 shifted copies of the field in fixed row-major
    window order, so every cell's total is summed in exactly the same
    sequence a per-cell loop would use.  That fixed order is what makes
    the argmax reproducible bit for bit.
    """
    if radius < 0:
        raise ValueError("radius must be non-negative")
    h, w = field.shape
    if radius == 0:
        return field.astype(np.float64)
    size = 2 * radius + 1
    padded = np.zeros((h + 2 * radius, w + 2 * radius), dtype=np.float64)
    padded[radius : radius + h, radius : radius + w] = field
    acc = np.zeros((h, w), dtype=np.float64)
    for dy in range(size):
        for dx in range(size):
            acc += padded[dy : dy + h, dx : dx + w]
    return acc


def pick_stroke_point(
    v: np.ndarray, region: np.ndarray, radius: int
) -> tuple[int, int]:
    """Region cell whose windowed motivation is maximal.

    Ties break toward the smallest y, then the smallest x (row-major
    scan order).  Raises ``ValueError`` if the region is empty.
    """
    if v.shape != region.shape:
        raise ValueError("motivation and region shapes differ")
    if not region.any():
        raise ValueError("cannot pick a stroke from an empty region")
    totals = box_sum(v, radius)
    masked = np.where(region, totals, -np.inf)
    flat = int(np.argmax(masked))
    y, x = divmod(flat, v.shape[1])
    return x, y


# ---------------------------------------------------------------------------
# Stroke application


def apply_stroke(
    canvas: Canvas,
    snapshot: np.ndarray,
    channel: int,
    center: tuple[int, int],
    radius: int,
    iteration: int = 0,
    clock: FrameClock | None = None,
) -> StrokeEvent:
    """Hard-copy the snapshot into the canvas under a square footprint.

    The footprint is the ``(2 * radius + 1)``-sided square around
    ``center`` clipped to the canvas; covered heatmap cells increment
    by one.  Frame accounting goes through ``clock`` when given
    (honouring strokes-per-frame grouping); otherwise every stroke is
    its own frame.
    """
    x, y = center
    if not (0 <= channel < canvas.channels):
        raise ValueError(f"channel {channel} out of range")
    if not (0 <= x < canvas.width and 0 <= y < canvas.height):
        raise ValueError(f"stroke centre ({x}, {y}) out of canvas bounds")
    if radius < 0:
        raise ValueError("radius must be non-negative")
    if snapshot.shape != canvas.z.shape:
        raise ValueError("snapshot shape does not match canvas")
    rows, cols = footprint_slices(center, radius, canvas.height, canvas.width)
    canvas.z[channel, rows, cols] = snapshot[channel, rows, cols]
    canvas.heatmap[rows, cols] += 1
    frame_index = clock.frame_index if clock is not None else canvas.frame_counter
    event = StrokeEvent(frame_index, iteration, channel, x, y, radius)
    if clock is not None:
        clock.tick()
    else:
        canvas.frame_counter += 1
    return event


def paint_channel(
    canvas: Canvas,
    snapshot: np.ndarray,
    channel: int,
    config: PainterConfig,
    iteration: int = 0,
    clock: FrameClock | None = None,
) -> list[StrokeEvent]:
    """Stroke one channel until its region is exhausted (or capped).

    The region is computed once up front and only ever shrinks by
    stroke footprints; gain is refreshed after every stroke, and the
    move cost is recentred on the stroke just placed (the first stroke
    sees a uniform cost of ones).
    """
    if clock is None:
        clock = FrameClock(canvas, config.strokes_per_frame, collect=False)
    region = stroke_region(canvas, snapshot, channel, config.theta)
    cost = np.ones((canvas.height, canvas.width), dtype=np.float32)
    events: list[StrokeEvent] = []
    while region.any():
        if config.stroke_cap is not None and len(events) >= config.stroke_cap:
            logger.debug(
                "channel %d capped at %d strokes with region remaining",
                channel,
                config.stroke_cap,
            )
            break
        gain = info_gain(canvas, snapshot, channel)
        v = motivation_field(gain, cost)
        center = pick_stroke_point(v, region, config.radius)
        events.append(
            apply_stroke(
                canvas, snapshot, channel, center, config.radius, iteration, clock
            )
        )
        rows, cols = footprint_slices(
            center, config.radius, canvas.height, canvas.width
        )
        region[rows, cols] = False
        cost = move_cost_field(
            center,
            canvas.height,
            canvas.width,
            config.sigma,
            config.epsilon,
            config.cost_mode,
        )
    return events


def flush_to_target(
    canvas: Canvas, target: np.ndarray, clock: FrameClock
) -> int | None:
    """Zero-threshold full release making the canvas equal ``target``.

    Releases exactly the coordinates that still differ, then emits one
    closing frame.  Returns the emitted frame's index, or ``None``
    when nothing differed and at least one frame already exists (an
    animation must end with at least one frame, so an empty run still
    gets its closing frame).
    """
    if target.shape != canvas.z.shape:
        raise ValueError("target shape does not match canvas")
    diff = canvas.z != target
    if not diff.any() and clock.emitted > 0:
        return None
    frame_index = clock.frame_index
    if diff.any():
        cs, ys, xs = np.nonzero(diff)
        canvas.z[cs, ys, xs] = target[cs, ys, xs]
        np.add.at(canvas.heatmap, (ys, xs), 1)
    clock.emit()
    return frame_index


def paint_trajectory(
    trajectory: LatentTrajectory,
    config: PainterConfig,
    collect_frames: bool = False,
) -> PaintRun:
    """Paint a whole trajectory with the greedy stroke engine.

    Returns per-iteration reports, a replayable stroke log, and the
    final canvas; with ``collect_frames`` the emitted ``(F, C, H, W)``
    frame stack is included.  With ``final_flush`` enabled the last
    frame equals the last snapshot exactly.
    """
    if not isinstance(trajectory, LatentTrajectory):
        trajectory = LatentTrajectory(np.asarray(trajectory))
    c, h, w = trajectory.frame_shape
    canvas = canvas_new(c, h, w)
    clock = FrameClock(canvas, config.strokes_per_frame, collect=collect_frames)
    policy = PolicyState.fresh(c)
    reports: list[IterationReport] = []
    all_events: list[StrokeEvent] = []

    for pos, snapshot in enumerate(trajectory):
        gap = l1_gap(canvas, snapshot)
        qualified = qualify_iteration(canvas, snapshot, policy, config.rho)
        events: list[StrokeEvent] = []
        channels: list[int] = []
        if qualified:
            policy.max_total_gap = max(policy.max_total_gap, gap)
            channels = select_channels(
                canvas, snapshot, policy, config.rho, config.theta
            )
            for ch in channels:
                events.extend(
                    paint_channel(canvas, snapshot, ch, config, pos, clock)
                )
        clock.close_group()
        residual = l1_gap(canvas, snapshot)
        reports.append(IterationReport(pos, qualified, channels, events, residual))
        all_events.extend(events)
        logger.info(
            "iteration %d: qualified=%s channels=%s strokes=%d residual=%.6g",
            pos,
            qualified,
            channels,
            len(events),
            residual,
        )

    flush_frame = None
    if config.final_flush:
        flush_frame = flush_to_target(canvas, trajectory.snapshots[-1], clock)

    log = StrokeLog(
        shape=(c, h, w), config=config, events=all_events, flush_frame=flush_frame
    )
    frames = clock.stacked_frames((c, h, w)) if collect_frames else None
    return PaintRun(reports=reports, log=log, canvas=canvas, frames=frames)
