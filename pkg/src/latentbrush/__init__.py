"""latentbrush: paint recorded latent denoising trajectories.

A denoising sampler's per-step "predicted original" latents form a
trajectory that converges on the final image.  This package replays
such trajectories as animations: localized brush strokes placed by a
greedy gain-times-cost rule, or whole-canvas release effects (glow,
dissolve, fade, flip, passthrough), plus image-to-image transitions.
Runs are deterministic and fully replayable from their stroke logs.
"""

from .core import (
    COST_MODES,
    DISSOLVE_MODES,
    EFFECTS,
    Canvas,
    EffectParams,
    FrameClock,
    LatentTrajectory,
    PainterConfig,
    ReleasePlan,
    StrokeEvent,
    StrokeLog,
    canvas_new,
    exact_sum,
    l1_gap,
    release_coords,
)
from .effects import (
    ZeroGapError,
    derive_rng,
    dissolve_plan,
    fade_plan,
    flip_plan,
    glow_plan,
    mass_center,
    partition_counts,
    passthrough_plan,
    qualifying_pixels,
)
from .fixtures import synthetic_trajectory
from .formats import (
    FormatError,
    ValidationError,
    read_stroke_log,
    read_trajectory,
    replay,
    write_frames,
    write_stroke_log,
    write_trajectory,
)
from .render import render_animation
from .strokes import (
    IterationReport,
    PaintRun,
    PolicyState,
    apply_stroke,
    box_sum,
    info_gain,
    motivation_field,
    move_cost_field,
    paint_channel,
    paint_trajectory,
    pick_stroke_point,
    qualify_iteration,
    select_channels,
    stroke_region,
)
from .transition import (
    build_transition_trajectory,
    interpolate_latents,
    transition_paint,
)

__version__ = "0.1.0"

__all__ = [
    "COST_MODES",
    "DISSOLVE_MODES",
    "EFFECTS",
    "Canvas",
    "EffectParams",
    "FormatError",
    "FrameClock",
    "IterationReport",
    "LatentTrajectory",
    "PaintRun",
    "PainterConfig",
    "PolicyState",
    "ReleasePlan",
    "StrokeEvent",
    "StrokeLog",
    "ValidationError",
    "ZeroGapError",
    "apply_stroke",
    "box_sum",
    "build_transition_trajectory",
    "canvas_new",
    "derive_rng",
    "dissolve_plan",
    "exact_sum",
    "fade_plan",
    "flip_plan",
    "glow_plan",
    "info_gain",
    "interpolate_latents",
    "l1_gap",
    "mass_center",
    "motivation_field",
    "move_cost_field",
    "paint_channel",
    "paint_trajectory",
    "partition_counts",
    "passthrough_plan",
    "pick_stroke_point",
    "qualify_iteration",
    "qualifying_pixels",
    "read_stroke_log",
    "read_trajectory",
    "release_coords",
    "render_animation",
    "replay",
    "select_channels",
    "stroke_region",
    "synthetic_trajectory",
    "transition_paint",
    "write_frames",
    "write_stroke_log",
    "write_trajectory",
    "__version__",
]
