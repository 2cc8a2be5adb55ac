"""Image-to-image transitions between two recorded trajectories.

A transition plays the source trajectory's schedule backwards — the
painting un-forms — then plays the destination trajectory forward.
When only endpoint latents are available, an interpolated trajectory
(linear or spherical) stands in for the recorded schedules.
"""

from __future__ import annotations

import numpy as np

from .core import LatentTrajectory, PainterConfig
from .render import render_animation
from .strokes import PaintRun

__all__ = [
    "INTERP_MODES",
    "build_transition_trajectory",
    "interpolate_latents",
    "transition_paint",
]

INTERP_MODES = ("linear", "slerp")

#: Below this angle (radians) between latents, spherical interpolation
#: degenerates and linear interpolation is used instead.
_SLERP_MIN_ANGLE = 1e-6


def build_transition_trajectory(
    source: LatentTrajectory, destination: LatentTrajectory
) -> LatentTrajectory:
    """Concatenate a reversed source with a forward destination.

    The result holds the source snapshots in reverse order followed by
    the destination snapshots in order, renumbered ``0..T_s + T_d - 1``.
    Raises ``ValueError`` when the two disagree on ``(C, H, W)``.
    """
    if source.frame_shape != destination.frame_shape:
        raise ValueError(
            f"trajectory shapes differ: {source.frame_shape} vs {destination.frame_shape}"
        )
    snaps = np.concatenate([source.snapshots[::-1], destination.snapshots])
    return LatentTrajectory(np.ascontiguousarray(snaps))


def interpolate_latents(
    z_src: np.ndarray,
    z_dst: np.ndarray,
    n: int = 30,
    mode: str = "linear",
) -> LatentTrajectory:
    """Trajectory of ``n`` snapshots gliding from one latent to another.

    Both endpoints are bitwise copies of the inputs.  ``linear``
    interpolates element-wise; ``slerp`` interpolates along the great
    circle through the two flattened latents, weighting by
    ``sin((1 - t) * omega)`` and ``sin(t * omega)`` over ``sin(omega)``.
    Nearly parallel or zero-norm latents fall back to linear, where
    spherical interpolation is numerically meaningless.  Interior
    arithmetic is float64, rounded to float32 once per snapshot.
    """
    z_src = np.asarray(z_src, dtype=np.float32)
    z_dst = np.asarray(z_dst, dtype=np.float32)
    if z_src.shape != z_dst.shape:
        raise ValueError(f"latent shapes differ: {z_src.shape} vs {z_dst.shape}")
    if z_src.ndim != 3:
        raise ValueError("latents must have shape (C, H, W)")
    if n < 2:
        raise ValueError("n must be at least 2")
    if mode not in INTERP_MODES:
        raise ValueError(f"mode must be one of {INTERP_MODES}, got {mode!r}")

    src = z_src.astype(np.float64)
    dst = z_dst.astype(np.float64)
    use_slerp = False
    omega = 0.0
    if mode == "slerp":
        u = src.ravel()
        v = dst.ravel()
        nu = float(np.linalg.norm(u))
        nv = float(np.linalg.norm(v))
        if nu > 0.0 and nv > 0.0:
            cos_omega = float(np.clip(np.dot(u, v) / (nu * nv), -1.0, 1.0))
            omega = float(np.arccos(cos_omega))
            use_slerp = omega >= _SLERP_MIN_ANGLE

    snaps = [np.array(z_src, copy=True)]
    sin_omega = np.sin(omega) if use_slerp else 1.0
    for i in range(1, n - 1):
        t = i / (n - 1)
        if use_slerp:
            a = np.sin((1.0 - t) * omega) / sin_omega
            b = np.sin(t * omega) / sin_omega
            blend = a * src + b * dst
        else:
            blend = src + t * (dst - src)
        snaps.append(blend.astype(np.float32))
    snaps.append(np.array(z_dst, copy=True))
    return LatentTrajectory(np.stack(snaps))


def transition_paint(trajectory: LatentTrajectory, config: PainterConfig) -> PaintRun:
    """Animate a prepared transition trajectory.

    Thin wrapper over the standard runner: the returned run carries the
    frame stack and the replayable log.
    """
    return render_animation(trajectory, config)
