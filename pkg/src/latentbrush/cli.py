"""Command-line entry point: ``lp``.

Subcommands
-----------
``paint``       animate one trajectory (strokes or an effect)
``transition``  animate source-to-destination morphs
``replay``      rebuild frames from a stroke log
``inspect``     summarize a trajectory file

Exit codes: 0 on success, 2 for usage and validation problems, 1 for
I/O failures.  ``LP_LOG_LEVEL`` (error, warn, info, debug) controls
diagnostic logging on stderr.
"""

from __future__ import annotations

import argparse
import logging
import os
import sys
from pathlib import Path

import numpy as np

from .core import (
    COST_MODES,
    DISSOLVE_MODES,
    EFFECTS,
    EffectParams,
    PainterConfig,
    exact_sum,
)
from .formats import (
    FormatError,
    ValidationError,
    read_stroke_log,
    read_trajectory,
    replay,
    write_frames,
    write_npy,
    write_pgm,
    write_stroke_log,
)
from .render import render_animation
from .report import write_report
from .transition import (
    INTERP_MODES,
    build_transition_trajectory,
    interpolate_latents,
    transition_paint,
)

__all__ = ["main"]

logger = logging.getLogger(__name__)

_LOG_LEVELS = {
    "error": logging.ERROR,
    "warn": logging.WARNING,
    "warning": logging.WARNING,
    "info": logging.INFO,
    "debug": logging.DEBUG,
}

#: Painter settings addressable from flags and config files.  Values
#: are (type, description); booleans use true/false in config files.
_CONFIG_FIELDS = {
    "theta": (float, "stroke info-gain threshold"),
    "rho": (float, "policy ratio for iteration/channel gating"),
    "radius": (int, "stroke half-width (footprint is 2r+1 square)"),
    "sigma": (float, "move-cost Gaussian width"),
    "epsilon": (float, "move-cost floor in (0, 1]"),
    "cost_mode": (str, f"one of {', '.join(COST_MODES)}"),
    "stroke_cap": (int, "max strokes per channel per iteration"),
    "strokes_per_frame": (int, "strokes grouped into one frame"),
    "final_flush": (bool, "end on an exact copy of the last snapshot"),
    "effect": (str, f"one of {', '.join(EFFECTS)}"),
    "frames_per_iteration": (int, "frame groups per effect iteration"),
    "dissolve_mode": (str, f"one of {', '.join(DISSOLVE_MODES)}"),
    "chunk_size": (int, "pixels per frame when frames_per_iteration unset"),
    "seed": (int, "effect ordering seed"),
}

_EFFECT_PARAM_KEYS = ("frames_per_iteration", "dissolve_mode", "chunk_size", "seed")


def _setup_logging() -> None:
    raw = os.environ.get("LP_LOG_LEVEL", "warn").strip().lower()
    level = _LOG_LEVELS.get(raw)
    package_logger = logging.getLogger("latentbrush")
    if not package_logger.handlers:
        handler = logging.StreamHandler(sys.stderr)
        handler.setFormatter(
            logging.Formatter("%(levelname)s %(name)s: %(message)s")
        )
        package_logger.addHandler(handler)
    package_logger.setLevel(level if level is not None else logging.WARNING)
    if level is None and raw not in ("", "warn"):
        package_logger.warning("unknown LP_LOG_LEVEL %r, using warn", raw)


def _parse_config_value(key: str, raw: str) -> object:
    kind, _ = _CONFIG_FIELDS[key]
    raw = raw.strip()
    if raw.lower() in ("none", "null"):
        return None
    if kind is bool:
        if raw.lower() in ("true", "1", "yes", "on"):
            return True
        if raw.lower() in ("false", "0", "no", "off"):
            return False
        raise ValueError(f"config key {key!r}: expected a boolean, got {raw!r}")
    try:
        return kind(raw)
    except ValueError as exc:
        raise ValueError(f"config key {key!r}: {exc}") from exc


def _read_config_file(path: str) -> dict[str, object]:
    """Parse a flat ``key = value`` settings file."""
    values: dict[str, object] = {}
    text = Path(path).read_text(encoding="utf-8")
    for line_no, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        if "=" not in stripped:
            raise ValueError(f"{path}: line {line_no}: expected key = value")
        key, _, raw = stripped.partition("=")
        key = key.strip()
        if key not in _CONFIG_FIELDS:
            raise ValueError(f"{path}: line {line_no}: unknown setting {key!r}")
        values[key] = _parse_config_value(key, raw)
    return values


def _add_painter_flags(parser: argparse.ArgumentParser) -> None:
    group = parser.add_argument_group("painter settings")
    group.add_argument("--config", metavar="FILE", help="key = value settings file")
    group.add_argument("--theta", type=float, help=_CONFIG_FIELDS["theta"][1])
    group.add_argument("--rho", type=float, help=_CONFIG_FIELDS["rho"][1])
    group.add_argument("--radius", type=int, help=_CONFIG_FIELDS["radius"][1])
    group.add_argument("--sigma", type=float, help=_CONFIG_FIELDS["sigma"][1])
    group.add_argument("--epsilon", type=float, help=_CONFIG_FIELDS["epsilon"][1])
    group.add_argument(
        "--cost-mode", choices=COST_MODES, help=_CONFIG_FIELDS["cost_mode"][1]
    )
    group.add_argument("--stroke-cap", type=int, help=_CONFIG_FIELDS["stroke_cap"][1])
    group.add_argument(
        "--strokes-per-frame",
        type=int,
        help=_CONFIG_FIELDS["strokes_per_frame"][1],
    )
    group.add_argument(
        "--final-flush",
        action=argparse.BooleanOptionalAction,
        default=None,
        help=_CONFIG_FIELDS["final_flush"][1],
    )
    group.add_argument("--effect", choices=EFFECTS, help=_CONFIG_FIELDS["effect"][1])
    group.add_argument(
        "--frames-per-iteration",
        type=int,
        help=_CONFIG_FIELDS["frames_per_iteration"][1],
    )
    group.add_argument(
        "--dissolve-mode",
        choices=DISSOLVE_MODES,
        help=_CONFIG_FIELDS["dissolve_mode"][1],
    )
    group.add_argument("--chunk-size", type=int, help=_CONFIG_FIELDS["chunk_size"][1])
    group.add_argument("--seed", type=int, help=_CONFIG_FIELDS["seed"][1])


def _add_output_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument(
        "--out-frames", required=True, metavar="NPY", help="frame stack output path"
    )
    parser.add_argument("--out-log", metavar="JSONL", help="stroke log output path")
    parser.add_argument(
        "--out-heatmap",
        metavar="PATH",
        help="release heatmap output (.npy counts or .pgm preview)",
    )
    parser.add_argument("--pgm-dir", metavar="DIR", help="write per-frame PGM previews")
    parser.add_argument(
        "--report-dir", metavar="DIR", help="write iteration CSV and figures"
    )


def _resolve_config(args: argparse.Namespace) -> PainterConfig:
    """Merge built-in defaults, config file, and explicit flags."""
    values: dict[str, object] = {}
    if getattr(args, "config", None):
        values.update(_read_config_file(args.config))
    for key in _CONFIG_FIELDS:
        flag_value = getattr(args, key, None)
        if flag_value is not None:
            values[key] = flag_value
    params_kwargs = {}
    for key in _EFFECT_PARAM_KEYS:
        if key in values:
            params_kwargs[key] = values.pop(key)
    defaults = EffectParams()
    if "frames_per_iteration" not in params_kwargs:
        params_kwargs["frames_per_iteration"] = defaults.frames_per_iteration
    return PainterConfig(effect_params=EffectParams(**params_kwargs), **values)


def _write_heatmap(heatmap: np.ndarray, path: str) -> None:
    suffix = Path(path).suffix.lower()
    if suffix == ".npy":
        write_npy(path, heatmap.astype(np.int64), "<i8")
    elif suffix == ".pgm":
        lo = int(heatmap.min())
        hi = int(heatmap.max())
        if hi == lo:
            grey = np.full(heatmap.shape, 128, dtype=np.uint8)
        else:
            grey = np.clip(
                np.round((heatmap - lo) / (hi - lo) * 255.0), 0, 255
            ).astype(np.uint8)
        write_pgm(grey, path)
    else:
        raise ValueError(f"heatmap output must end in .npy or .pgm, got {path!r}")


def _emit_outputs(run, args: argparse.Namespace) -> None:
    write_frames(run.frames, args.out_frames, args.pgm_dir)
    if args.out_log:
        write_stroke_log(run.log, args.out_log)
    if args.out_heatmap:
        _write_heatmap(run.canvas.heatmap, args.out_heatmap)
    if args.report_dir:
        write_report(run.reports, run.canvas.heatmap, run.frames, args.report_dir)
    print(f"frames {run.frames.shape[0]}")
    print(f"strokes {len(run.log.events)}")
    print(f"flush {'yes' if run.log.flush_frame is not None else 'no'}")


def _cmd_paint(args: argparse.Namespace) -> int:
    trajectory = read_trajectory(args.trajectory, args.layout)
    config = _resolve_config(args)
    logger.info(
        "painting %s (%d snapshots, %s) with effect=%s",
        args.trajectory,
        trajectory.steps,
        trajectory.frame_shape,
        config.effect,
    )
    run = render_animation(trajectory, config)
    _emit_outputs(run, args)
    return 0


def _cmd_transition(args: argparse.Namespace) -> int:
    source = read_trajectory(args.source, args.layout)
    destination = read_trajectory(args.dest, args.layout)
    config = _resolve_config(args)
    if args.mode == "schedules":
        trajectory = build_transition_trajectory(source, destination)
    else:
        trajectory = interpolate_latents(
            source.snapshots[-1],
            destination.snapshots[-1],
            n=args.steps,
            mode=args.interp,
        )
    run = transition_paint(trajectory, config)
    _emit_outputs(run, args)
    return 0


def _cmd_replay(args: argparse.Namespace) -> int:
    log = read_stroke_log(args.log)
    trajectory = read_trajectory(args.traj, args.layout)
    frames = replay(log, trajectory)
    if frames.shape[0] == 0:
        raise ValidationError("log replays to zero frames; nothing to write")
    write_frames(frames, args.out_frames, args.pgm_dir)
    print(f"frames {frames.shape[0]}")
    return 0


def _cmd_inspect(args: argparse.Namespace) -> int:
    trajectory = read_trajectory(args.trajectory, args.layout)
    snaps = trajectory.snapshots
    print(f"snapshots {trajectory.steps}")
    print(f"channels {trajectory.channels}")
    print(f"height {trajectory.height}")
    print(f"width {trajectory.width}")
    print("iteration  min  max  change_from_previous")
    previous = np.zeros_like(snaps[0])
    for pos in range(trajectory.steps):
        snap = snaps[pos]
        change = exact_sum(np.abs(snap - previous))
        print(
            f"{pos}  {float(snap.min()):.6g}  {float(snap.max()):.6g}  {change:.6g}"
        )
        previous = snap
    return 0


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="lp",
        description="Animate recorded latent denoising trajectories as paintings.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    paint = sub.add_parser("paint", help="animate one trajectory")
    paint.add_argument("trajectory", help="input trajectory (.npy, T x C x H x W)")
    paint.add_argument(
        "--layout", choices=("tchw", "thwc"), default="tchw", help="input axis order"
    )
    _add_output_flags(paint)
    _add_painter_flags(paint)
    paint.set_defaults(func=_cmd_paint)

    transition = sub.add_parser("transition", help="animate an image-to-image morph")
    transition.add_argument("--source", required=True, help="source trajectory (.npy)")
    transition.add_argument("--dest", required=True, help="destination trajectory (.npy)")
    transition.add_argument(
        "--mode",
        choices=("schedules", "interp"),
        default="schedules",
        help="reversed-source-then-destination schedules, or endpoint interpolation",
    )
    transition.add_argument(
        "--steps", type=int, default=30, help="snapshot count for interp mode"
    )
    transition.add_argument(
        "--interp", choices=INTERP_MODES, default="linear", help="interpolation curve"
    )
    transition.add_argument(
        "--layout", choices=("tchw", "thwc"), default="tchw", help="input axis order"
    )
    _add_output_flags(transition)
    _add_painter_flags(transition)
    transition.set_defaults(func=_cmd_transition)

    rep = sub.add_parser("replay", help="rebuild frames from a stroke log")
    rep.add_argument("--log", required=True, help="stroke log (.jsonl)")
    rep.add_argument("--traj", required=True, help="original trajectory (.npy)")
    rep.add_argument(
        "--layout", choices=("tchw", "thwc"), default="tchw", help="input axis order"
    )
    rep.add_argument("--out-frames", required=True, help="frame stack output path")
    rep.add_argument("--pgm-dir", metavar="DIR", help="write per-frame PGM previews")
    rep.set_defaults(func=_cmd_replay)

    inspect = sub.add_parser("inspect", help="summarize a trajectory file")
    inspect.add_argument("trajectory", help="trajectory file (.npy)")
    inspect.add_argument(
        "--layout", choices=("tchw", "thwc"), default="tchw", help="input axis order"
    )
    inspect.set_defaults(func=_cmd_inspect)

    return parser


def main(argv: list[str] | None = None) -> int:
    _setup_logging()
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code else 0
    try:
        return args.func(args)
    except (ValidationError, FormatError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":  # pragma: no cover
    raise SystemExit(main())
