"""Deterministic synthetic trajectories for demos and tests.

Real inputs come from a recorder attached to a denoising sampler; the
synthetic stand-in reproduces their defining property — the early
steps carry nearly all of the change, later steps only refine — by
perturbing a fixed saturated "final" field with per-step smooth
perturbations whose amplitude decays geometrically.
"""

from __future__ import annotations

import numpy as np

from .core import LatentTrajectory

__all__ = ["synthetic_trajectory"]

# How strongly fields saturate toward +-1; high saturation keeps the
# per-cell change amplitude near-uniform inside changed areas.
_SATURATION = 12.0
# Coarse grid divisor controlling the spatial scale of the blobs.
_COARSE_DIV = 4


def _bilinear_upsample(coarse: np.ndarray, height: int, width: int) -> np.ndarray:
    """Bilinearly resample ``(C, h, w)`` onto ``(C, height, width)``."""
    _, src_h, src_w = coarse.shape
    ys = np.linspace(0.0, src_h - 1.0, height)
    xs = np.linspace(0.0, src_w - 1.0, width)
    y0 = np.floor(ys).astype(int)
    x0 = np.floor(xs).astype(int)
    y1 = np.minimum(y0 + 1, src_h - 1)
    x1 = np.minimum(x0 + 1, src_w - 1)
    fy = (ys - y0)[None, :, None]
    fx = (xs - x0)[None, None, :]
    rows0 = coarse[:, y0, :]
    rows1 = coarse[:, y1, :]
    top = rows0[:, :, x0] * (1.0 - fx) + rows0[:, :, x1] * fx
    bottom = rows1[:, :, x0] * (1.0 - fx) + rows1[:, :, x1] * fx
    return top * (1.0 - fy) + bottom * fy


def synthetic_trajectory(
    steps: int = 12,
    channels: int = 4,
    height: int = 16,
    width: int = 16,
    seed: int = 2024,
    convergence: float = 0.45,
    amplitude: float = 0.24,
) -> LatentTrajectory:
    """A converging trajectory with strongly front-loaded change.

    Snapshot ``t`` is ``final + amplitude * convergence**(t+1) * p_t``
    where ``final`` and each perturbation ``p_t`` are smooth random
    fields saturated toward plus/minus one.  The first snapshot is
    already a full-amplitude rendition; subsequent snapshots decay
    geometrically toward ``final``, so almost all of the information
    arrives in the first couple of steps — the regime in which
    releasing per denoiser step bunches the change into the earliest
    frames.  Fully determined by ``seed``.
    """
    if steps < 1:
        raise ValueError("steps must be >= 1")
    if not 0.0 < convergence < 1.0:
        raise ValueError("convergence must lie in (0, 1)")
    if not amplitude > 0.0:
        raise ValueError("amplitude must be positive")
    rng = np.random.default_rng(np.random.SeedSequence([seed]))

    def smooth_field() -> np.ndarray:
        coarse = rng.normal(
            size=(
                channels,
                max(2, height // _COARSE_DIV),
                max(2, width // _COARSE_DIV),
            )
        )
        field = _bilinear_upsample(coarse, height, width)
        return np.tanh(
            _SATURATION * field / max(1e-12, float(np.abs(field).max()))
        )

    final = smooth_field()
    snaps = np.empty((steps, channels, height, width), dtype=np.float32)
    for t in range(steps):
        perturbation = smooth_field()
        shrink = amplitude * convergence ** (t + 1)
        snaps[t] = (final + shrink * perturbation).astype(np.float32)
    return LatentTrajectory(snaps)
