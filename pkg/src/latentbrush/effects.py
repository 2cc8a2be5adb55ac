"""Whole-canvas release effects: alternatives to brush strokes.

Where the stroke engine reveals a snapshot through localized square
strokes, these effects release it wholesale in an ordered sweep:
radially from the change's centre of mass (glow), in randomized or
content-ranked pixel order (dissolve), by vertical column bands
(flip), as an alpha blend (fade), or all at once (passthrough).

Glow and dissolve operate at pixel granularity — all channels of a
pixel release together — and only touch pixels whose gap exceeds the
stroke threshold.  Flip and fade are content-independent sweeps of the
whole canvas.  Ordering is deterministic throughout: randomized
orders derive their generator from ``(seed, iteration)``, and every
sort breaks ties by row then column.
"""

from __future__ import annotations

import math

import numpy as np

from .core import Canvas, EffectParams, ReleasePlan, exact_sum

__all__ = [
    "ZeroGapError",
    "derive_rng",
    "dissolve_plan",
    "fade_plan",
    "flip_plan",
    "glow_plan",
    "mass_center",
    "partition_counts",
    "passthrough_plan",
    "qualifying_pixels",
]


class ZeroGapError(ValueError):
    """Raised when an operation needs a non-zero canvas-target gap."""


def derive_rng(seed: int, iteration: int) -> np.random.Generator:
    """Independent generator for one iteration of a seeded effect."""
    return np.random.default_rng(np.random.SeedSequence([seed, iteration]))


def partition_counts(n: int, k: int) -> list[int]:
    """Split ``n`` items into at most ``k`` near-equal group sizes.

    Earlier groups take the remainder: 10 items in 3 groups gives
    ``[4, 3, 3]``.  No group is empty, so fewer than ``k`` groups come
    back when ``n < k``.
    """
    if n < 0 or k < 1:
        raise ValueError("need n >= 0 and k >= 1")
    k = min(k, n)
    if k == 0:
        return []
    base, extra = divmod(n, k)
    return [base + 1] * extra + [base] * (k - extra)


def _partition(rows: np.ndarray, params: EffectParams) -> list[np.ndarray]:
    """Group ordered pixel rows into frame-sized chunks."""
    n = len(rows)
    if n == 0:
        return []
    if params.frames_per_iteration is None:
        size = params.chunk_size
        return [rows[i : i + size] for i in range(0, n, size)]
    counts = partition_counts(n, params.frames_per_iteration)
    groups = []
    start = 0
    for count in counts:
        groups.append(rows[start : start + count])
        start += count
    return groups


def qualifying_pixels(canvas: Canvas, snapshot: np.ndarray, theta: float) -> np.ndarray:
    """Pixels with any channel gap above ``theta``, as ``(N, 2)`` rows.

    Rows are ``(y, x)`` in row-major scan order.  The threshold
    comparison is strict, at float32 precision.
    """
    if snapshot.shape != canvas.z.shape:
        raise ValueError("snapshot shape does not match canvas")
    mask = (np.abs(canvas.z - snapshot) > np.float32(theta)).any(axis=0)
    return np.argwhere(mask)


def _expand_channels(pixels: np.ndarray, channels: int) -> np.ndarray:
    """Turn ``(N, 2)`` pixel rows into ``(N * C, 3)`` coordinate rows.

    Pixel-major: all channels of one pixel are adjacent, in ascending
    channel order.  Coordinate rows are ``(channel, x, y)``.
    """
    n = len(pixels)
    cs = np.tile(np.arange(channels, dtype=np.int64), n)
    ys = np.repeat(pixels[:, 0], channels)
    xs = np.repeat(pixels[:, 1], channels)
    return np.stack([cs, xs, ys], axis=1)


def mass_center(canvas: Canvas, snapshot: np.ndarray) -> tuple[float, float]:
    """Gap-weighted spatial centroid ``(x, y)`` of the pending change.

    Weights are per-pixel channel-summed absolute gaps.  Totals use
    correctly rounded sums, so the value is traversal-order
    independent.  Raises :class:`ZeroGapError` when the canvas already
    equals the snapshot (the centroid is undefined).
    """
    if snapshot.shape != canvas.z.shape:
        raise ValueError("snapshot shape does not match canvas")
    weights = np.abs(canvas.z - snapshot).astype(np.float64).sum(axis=0)
    total = exact_sum(weights)
    if total == 0.0:
        raise ZeroGapError("mass centre undefined: canvas already equals snapshot")
    h, w = weights.shape
    xs = np.arange(w, dtype=np.float64)
    ys = np.arange(h, dtype=np.float64)
    wx = exact_sum(weights * xs[None, :])
    wy = exact_sum(weights * ys[:, None])
    return wx / total, wy / total


def glow_plan(
    canvas: Canvas,
    snapshot: np.ndarray,
    theta: float,
    params: EffectParams,
    iteration: int = 0,
) -> ReleasePlan:
    """Release qualifying pixels radially outward from the mass centre.

    Pixels order by ascending squared distance to the gap-weighted
    centroid, ties by row then column.  With no qualifying pixels the
    plan is empty.
    """
    pixels = qualifying_pixels(canvas, snapshot, theta)
    if len(pixels) == 0:
        return ReleasePlan(iteration, [])
    cx, cy = mass_center(canvas, snapshot)
    py = pixels[:, 0].astype(np.float64)
    px = pixels[:, 1].astype(np.float64)
    d2 = (px - cx) ** 2 + (py - cy) ** 2
    order = np.lexsort((pixels[:, 1], pixels[:, 0], d2))
    ordered = pixels[order]
    groups = _partition(ordered, params)
    frames = [_expand_channels(g, canvas.channels) for g in groups]
    return ReleasePlan(iteration, frames)


def dissolve_plan(
    canvas: Canvas,
    snapshot: np.ndarray,
    theta: float,
    params: EffectParams,
    iteration: int = 0,
) -> ReleasePlan:
    """Release qualifying pixels in a dissolving sweep.

    ``random`` shuffles the pixel order with the per-iteration
    generator; ``content`` ranks by descending channel-summed gap
    (ties by row then column); ``vertical`` walks rows top to bottom,
    shuffling within each row.
    """
    pixels = qualifying_pixels(canvas, snapshot, theta)
    if len(pixels) == 0:
        return ReleasePlan(iteration, [])
    mode = params.dissolve_mode
    if mode == "random":
        rng = derive_rng(params.seed, iteration)
        ordered = pixels[rng.permutation(len(pixels))]
    elif mode == "content":
        gains = (
            np.abs(canvas.z - snapshot)
            .astype(np.float64)
            .sum(axis=0)[pixels[:, 0], pixels[:, 1]]
        )
        order = np.lexsort((pixels[:, 1], pixels[:, 0], -gains))
        ordered = pixels[order]
    elif mode == "vertical":
        rng = derive_rng(params.seed, iteration)
        chunks = []
        for row in np.unique(pixels[:, 0]):
            row_pixels = pixels[pixels[:, 0] == row]
            chunks.append(row_pixels[rng.permutation(len(row_pixels))])
        ordered = np.concatenate(chunks)
    else:  # pragma: no cover - EffectParams already validates
        raise ValueError(f"unknown dissolve mode {mode!r}")
    groups = _partition(ordered, params)
    frames = [_expand_channels(g, canvas.channels) for g in groups]
    return ReleasePlan(iteration, frames)


def flip_plan(canvas: Canvas, snapshot: np.ndarray, k: int, iteration: int = 0) -> ReleasePlan:
    """Release whole column bands left to right over ``k`` frames.

    Content independent: every channel of every banded column releases
    regardless of how much it differs.  Bands are near-equal column
    ranges, wider bands first.
    """
    if snapshot.shape != canvas.z.shape:
        raise ValueError("snapshot shape does not match canvas")
    if k < 1:
        raise ValueError("k must be >= 1")
    h, w, c = canvas.height, canvas.width, canvas.channels
    counts = partition_counts(w, k)
    frames = []
    start = 0
    ys = np.arange(h, dtype=np.int64)
    cs = np.arange(c, dtype=np.int64)
    for count in counts:
        cols = np.arange(start, start + count, dtype=np.int64)
        xg, yg, cg = np.meshgrid(cols, ys, cs, indexing="ij")
        frames.append(np.stack([cg.ravel(), xg.ravel(), yg.ravel()], axis=1))
        start += count
    return ReleasePlan(iteration, frames)


def fade_plan(canvas: Canvas, snapshot: np.ndarray, k: int) -> list[np.ndarray]:
    """Alpha-blend the canvas toward the snapshot over ``k`` frames.

    Frame ``i`` (1-based) is ``z0 + (i / k) * (snapshot - z0)``; the
    final frame is a bitwise copy of the snapshot.  Blending happens in
    float64 and rounds to float32 once per frame.  Unlike the other
    effects this returns frame tensors, not coordinate groups — blended
    values are not copies of any source, so there is nothing to
    release.
    """
    if snapshot.shape != canvas.z.shape:
        raise ValueError("snapshot shape does not match canvas")
    if k < 1:
        raise ValueError("k must be >= 1")
    z0 = canvas.z.astype(np.float64)
    target = snapshot.astype(np.float64)
    frames = []
    for i in range(1, k):
        t = i / k
        frames.append((z0 + t * (target - z0)).astype(np.float32))
    frames.append(np.array(snapshot, dtype=np.float32, copy=True))
    return frames


def passthrough_plan(snapshot: np.ndarray, iteration: int = 0) -> ReleasePlan:
    """Release the entire snapshot in a single frame.

    The baseline animation: one frame per trajectory iteration,
    unconditionally.
    """
    snapshot = np.asarray(snapshot)
    if snapshot.ndim != 3:
        raise ValueError("snapshot must have shape (C, H, W)")
    c, h, w = snapshot.shape
    rows = np.argwhere(np.ones((c, h, w), dtype=bool))
    coords = rows[:, [0, 2, 1]]
    return ReleasePlan(iteration, [coords])


def fade_frame_count(shape: tuple[int, int, int], params: EffectParams) -> int:
    """Frames per fade iteration under the given parameters.

    Uses ``frames_per_iteration`` when set; otherwise sizes the fade so
    each frame accounts for roughly ``chunk_size`` coordinates.
    """
    if params.frames_per_iteration is not None:
        return params.frames_per_iteration
    c, h, w = shape
    return max(1, math.ceil((c * h * w) / params.chunk_size))


def flip_frame_count(shape: tuple[int, int, int], params: EffectParams) -> int:
    """Frames per flip iteration under the given parameters.

    Uses ``frames_per_iteration`` when set; otherwise bands the width
    so each band holds roughly ``chunk_size`` pixels.
    """
    if params.frames_per_iteration is not None:
        return params.frames_per_iteration
    c, h, w = shape
    cols_per_band = max(1, round(params.chunk_size / h))
    return max(1, math.ceil(w / cols_per_band))
