"""Shared domain types and elementary canvas accounting.

The animation engine treats a latent tensor of shape ``(C, H, W)`` as a
painting canvas.  A recorded denoising trajectory supplies per-step
target snapshots; painting means copying snapshot values into the
canvas at selected coordinates, one frame group at a time.  Everything
downstream (stroke placement, release effects, file replay) is built
from the canvas mutations defined here.

All payload arithmetic is float32, matching the trajectory file format.
Totals that feed threshold decisions are accumulated with
correctly-rounded summation (:func:`exact_sum`), which is
order-independent, so replays and independent reference
implementations agree bitwise.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterator, Sequence

import numpy as np

__all__ = [
    "COST_MODES",
    "DISSOLVE_MODES",
    "EFFECTS",
    "Canvas",
    "EffectParams",
    "FrameClock",
    "LatentTrajectory",
    "PainterConfig",
    "ReleasePlan",
    "StrokeEvent",
    "StrokeLog",
    "as_coord_array",
    "canvas_new",
    "exact_sum",
    "footprint_slices",
    "l1_gap",
    "release_coords",
]

#: Supported move-cost shapes for stroke placement.
COST_MODES = ("near", "far", "off")

#: Supported animation styles.  "strokes" is the localized brush
#: engine; the rest are whole-canvas release effects.
EFFECTS = ("strokes", "glow", "dissolve", "fade", "flip", "passthrough")

#: Orderings available to the dissolve effect.
DISSOLVE_MODES = ("random", "content", "vertical")


def exact_sum(values: np.ndarray | Sequence[float]) -> float:
    """Return the correctly rounded float64 sum of ``values``.

    Uses :func:`math.fsum`, so the result does not depend on
    accumulation order.  This is what makes gap totals reproducible
    across the engine, file replay, and loop-based reference code.
    """
    if isinstance(values, np.ndarray):
        values = values.ravel().tolist()
    return math.fsum(values)


# ---------------------------------------------------------------------------
# Trajectories


@dataclass
class LatentTrajectory:
    """An ordered stack of recorded latent snapshots.

    Attributes
    ----------
    snapshots:
        Array of shape ``(T, C, H, W)``, float32, all values finite.
    iteration_indices:
        Strictly increasing int64 array of length ``T`` giving the
        denoiser step each snapshot was captured at.  Files carry no
        explicit indices, so readers assign ``0..T-1``.
    """

    snapshots: np.ndarray
    iteration_indices: np.ndarray | None = None

    def __post_init__(self) -> None:
        snaps = np.asarray(self.snapshots)
        if snaps.ndim != 4:
            raise ValueError(
                f"trajectory must have shape (T, C, H, W), got {snaps.shape}"
            )
        if snaps.shape[0] < 1:
            raise ValueError("trajectory must contain at least one snapshot")
        if snaps.dtype != np.float32:
            snaps = snaps.astype(np.float32)
        if not np.isfinite(snaps).all():
            raise ValueError("trajectory contains NaN or infinite values")
        self.snapshots = np.ascontiguousarray(snaps)
        if self.iteration_indices is None:
            self.iteration_indices = np.arange(len(snaps), dtype=np.int64)
        else:
            idx = np.asarray(self.iteration_indices, dtype=np.int64)
            if idx.shape != (snaps.shape[0],):
                raise ValueError("iteration_indices length must equal T")
            if len(idx) > 1 and not (np.diff(idx) > 0).all():
                raise ValueError("iteration_indices must be strictly increasing")
            self.iteration_indices = idx

    @classmethod
    def from_snapshots(
        cls,
        snapshots: Sequence[np.ndarray],
        iteration_indices: Sequence[int] | None = None,
    ) -> "LatentTrajectory":
        """Stack a list of ``(C, H, W)`` arrays into a trajectory.

        Raises ``ValueError`` if the snapshots disagree on shape.
        """
        arrays = [np.asarray(s, dtype=np.float32) for s in snapshots]
        if not arrays:
            raise ValueError("trajectory must contain at least one snapshot")
        shapes = {a.shape for a in arrays}
        if len(shapes) != 1:
            raise ValueError(f"snapshots disagree on shape: {sorted(shapes)}")
        idx = None if iteration_indices is None else np.asarray(iteration_indices)
        return cls(np.stack(arrays), idx)

    @property
    def steps(self) -> int:
        return int(self.snapshots.shape[0])

    @property
    def channels(self) -> int:
        return int(self.snapshots.shape[1])

    @property
    def height(self) -> int:
        return int(self.snapshots.shape[2])

    @property
    def width(self) -> int:
        return int(self.snapshots.shape[3])

    @property
    def frame_shape(self) -> tuple[int, int, int]:
        return (self.channels, self.height, self.width)

    def __len__(self) -> int:
        return self.steps

    def __iter__(self) -> Iterator[np.ndarray]:
        return iter(self.snapshots)


# ---------------------------------------------------------------------------
# Configuration


@dataclass
class EffectParams:
    """Tuning knobs shared by the whole-canvas release effects.

    ``frames_per_iteration`` splits each iteration's release into that
    many frame groups.  When it is ``None``, glow and dissolve instead
    emit ``chunk_size`` pixels per frame.  ``seed`` feeds the
    per-iteration RNG used by the randomized dissolve orders.
    """

    frames_per_iteration: int | None = 24
    dissolve_mode: str = "random"
    chunk_size: int = 64
    seed: int = 0

    def __post_init__(self) -> None:
        if self.frames_per_iteration is not None and self.frames_per_iteration < 1:
            raise ValueError("frames_per_iteration must be a positive integer")
        if self.dissolve_mode not in DISSOLVE_MODES:
            raise ValueError(
                f"dissolve_mode must be one of {DISSOLVE_MODES}, got {self.dissolve_mode!r}"
            )
        if self.chunk_size < 1:
            raise ValueError("chunk_size must be a positive integer")


@dataclass
class PainterConfig:
    """Full parameter set for one animation run.

    The defaults reproduce the reference brush behaviour: a strict
    info-gain threshold of 0.05, policy ratio 0.1, square strokes of
    radius 2, and a near-preferring Gaussian move cost with sigma 8 and
    floor epsilon 0.25.
    """

    theta: float = 0.05
    rho: float = 0.1
    radius: int = 2
    sigma: float = 8.0
    epsilon: float = 0.25
    cost_mode: str = "near"
    stroke_cap: int | None = None
    strokes_per_frame: int = 1
    final_flush: bool = True
    effect: str = "strokes"
    effect_params: EffectParams = field(default_factory=EffectParams)

    def __post_init__(self) -> None:
        if not self.theta > 0:
            raise ValueError("theta must be positive")
        if not 0.0 <= self.rho <= 1.0:
            raise ValueError("rho must lie in [0, 1]")
        if self.radius < 0:
            raise ValueError("radius must be non-negative")
        if not self.sigma > 0:
            raise ValueError("sigma must be positive")
        if not 0.0 < self.epsilon <= 1.0:
            raise ValueError("epsilon must lie in (0, 1]")
        if self.cost_mode not in COST_MODES:
            raise ValueError(
                f"cost_mode must be one of {COST_MODES}, got {self.cost_mode!r}"
            )
        if self.stroke_cap is not None and self.stroke_cap < 1:
            raise ValueError("stroke_cap must be None or >= 1")
        if self.strokes_per_frame < 1:
            raise ValueError("strokes_per_frame must be >= 1")
        if self.effect not in EFFECTS:
            raise ValueError(f"effect must be one of {EFFECTS}, got {self.effect!r}")
        if not isinstance(self.effect_params, EffectParams):
            raise ValueError("effect_params must be an EffectParams instance")


# ---------------------------------------------------------------------------
# Canvas


@dataclass
class Canvas:
    """Mutable painting state.

    ``z`` is the float32 latent being painted, ``heatmap`` counts how
    many times each spatial cell has been released (summed over
    channels), and ``frame_counter`` is the number of animation frames
    emitted so far.
    """

    z: np.ndarray
    heatmap: np.ndarray
    frame_counter: int = 0

    @property
    def channels(self) -> int:
        return int(self.z.shape[0])

    @property
    def height(self) -> int:
        return int(self.z.shape[1])

    @property
    def width(self) -> int:
        return int(self.z.shape[2])


def canvas_new(channels: int, height: int, width: int) -> Canvas:
    """Create a zero canvas with a zero heatmap and frame counter."""
    if channels < 1 or height < 1 or width < 1:
        raise ValueError("canvas dimensions must be positive")
    return Canvas(
        z=np.zeros((channels, height, width), dtype=np.float32),
        heatmap=np.zeros((height, width), dtype=np.int64),
        frame_counter=0,
    )


def as_coord_array(coords: np.ndarray | Sequence[tuple[int, int, int]]) -> np.ndarray:
    """Normalize a coordinate collection to an ``(N, 3)`` int64 array.

    Rows are ``(channel, x, y)``.  An empty input yields shape (0, 3).
    """
    arr = np.asarray(coords, dtype=np.int64)
    if arr.size == 0:
        return arr.reshape(0, 3)
    if arr.ndim != 2 or arr.shape[1] != 3:
        raise ValueError(f"coordinates must be (N, 3) (channel, x, y), got {arr.shape}")
    return arr


def release_coords(
    canvas: Canvas,
    target: np.ndarray,
    coords: np.ndarray | Sequence[tuple[int, int, int]],
) -> None:
    """Copy ``target`` into the canvas at each ``(channel, x, y)`` coordinate.

    Every released coordinate also increments the spatial heatmap cell
    by one, so the heatmap records per-channel release counts summed
    over channels.  Raises ``ValueError`` on a shape mismatch or an
    out-of-bounds coordinate.
    """
    target = np.asarray(target)
    if target.shape != canvas.z.shape:
        raise ValueError(
            f"target shape {target.shape} does not match canvas {canvas.z.shape}"
        )
    arr = as_coord_array(coords)
    if arr.shape[0] == 0:
        return
    cs, xs, ys = arr[:, 0], arr[:, 1], arr[:, 2]
    if (
        cs.min() < 0
        or cs.max() >= canvas.channels
        or xs.min() < 0
        or xs.max() >= canvas.width
        or ys.min() < 0
        or ys.max() >= canvas.height
    ):
        raise ValueError("release coordinate out of canvas bounds")
    canvas.z[cs, ys, xs] = target[cs, ys, xs]
    # add.at handles repeated cells correctly (one increment per row).
    np.add.at(canvas.heatmap, (ys, xs), 1)


def l1_gap(canvas: Canvas, target: np.ndarray, channel: int | None = None) -> float:
    """Total absolute difference between the canvas and ``target``.

    With ``channel`` set, only that channel plane is summed.  The
    per-cell differences are float32; the total is the correctly
    rounded float64 sum of those values, so it does not depend on
    traversal order.
    """
    target = np.asarray(target)
    if target.shape != canvas.z.shape:
        raise ValueError(
            f"target shape {target.shape} does not match canvas {canvas.z.shape}"
        )
    if channel is None:
        diff = np.abs(canvas.z - target)
    else:
        if not 0 <= channel < canvas.channels:
            raise ValueError(f"channel {channel} out of range")
        diff = np.abs(canvas.z[channel] - target[channel])
    return exact_sum(diff)


def footprint_slices(
    center: tuple[int, int], radius: int, height: int, width: int
) -> tuple[slice, slice]:
    """Clipped ``(row, column)`` slices of a square stroke footprint.

    ``center`` is ``(x, y)``; the nominal footprint is the
    ``(2 * radius + 1)``-sided square around it, intersected with the
    canvas bounds.
    """
    x, y = center
    y0, y1 = max(0, y - radius), min(height, y + radius + 1)
    x0, x1 = max(0, x - radius), min(width, x + radius + 1)
    return slice(y0, y1), slice(x0, x1)


# ---------------------------------------------------------------------------
# Stroke records


@dataclass(frozen=True)
class StrokeEvent:
    """One applied release, sufficient to replay it.

    ``radius`` 0 with effect runs denotes a single-cell release;
    brush strokes carry the configured radius.  ``iteration`` is the
    position of the source snapshot within the trajectory.
    """

    frame_index: int
    iteration: int
    channel: int
    center_x: int
    center_y: int
    radius: int


@dataclass
class StrokeLog:
    """Complete, replayable record of one animation run."""

    shape: tuple[int, int, int]
    config: PainterConfig
    events: list[StrokeEvent] = field(default_factory=list)
    flush_frame: int | None = None
    version: int = 1


@dataclass
class ReleasePlan:
    """Frame-grouped release order for one iteration of an effect.

    ``frames[i]`` is the ``(N, 3)`` coordinate array released in the
    ``i``-th frame of the iteration.  Groups are disjoint; their union
    is exactly the planned release set.
    """

    target_iteration: int
    frames: list[np.ndarray] = field(default_factory=list)

    def total_coords(self) -> int:
        return sum(int(f.shape[0]) for f in self.frames)


# ---------------------------------------------------------------------------
# Frame grouping


class FrameClock:
    """Groups strokes into frames and snapshots canvas states.

    One frame is emitted for every ``strokes_per_frame`` strokes;
    :meth:`close_group` flushes a partial group at an iteration
    boundary so frames never span iterations.  When ``collect`` is
    true, each emitted frame snapshots ``canvas.z``.
    """

    def __init__(
        self, canvas: Canvas, strokes_per_frame: int = 1, collect: bool = True
    ) -> None:
        if strokes_per_frame < 1:
            raise ValueError("strokes_per_frame must be >= 1")
        self.canvas = canvas
        self.strokes_per_frame = strokes_per_frame
        self.frames: list[np.ndarray] | None = [] if collect else None
        self._pending = 0

    @property
    def frame_index(self) -> int:
        """Index that the next emitted frame will receive."""
        return self.canvas.frame_counter

    @property
    def emitted(self) -> int:
        return self.canvas.frame_counter

    def emit(self) -> None:
        """Snapshot the canvas as one animation frame."""
        if self.frames is not None:
            self.frames.append(self.canvas.z.copy())
        self.canvas.frame_counter += 1
        self._pending = 0

    def tick(self) -> None:
        """Register one applied stroke; emits when the group is full."""
        self._pending += 1
        if self._pending >= self.strokes_per_frame:
            self.emit()

    def close_group(self) -> None:
        """Emit any partial stroke group (iteration boundary)."""
        if self._pending:
            self.emit()

    def stacked_frames(self, frame_shape: tuple[int, int, int]) -> np.ndarray:
        """Collected frames as one ``(F, C, H, W)`` float32 array."""
        if self.frames is None:
            raise ValueError("clock was created with collect=False")
        if not self.frames:
            return np.empty((0, *frame_shape), dtype=np.float32)
        return np.stack(self.frames)
