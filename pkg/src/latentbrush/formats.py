"""On-disk formats: trajectory/frame tensors, stroke logs, previews.

Tensors use NPY version 1.0, little-endian float32, C order — written
byte-for-byte the way ``np.save`` writes them, and read back by a
strict parser that rejects anything else.  Stroke logs are JSON Lines:
a header object, one object per release event, and an optional
terminal flush record.  Grey previews are binary PGM (P5), normalized
per channel over the whole animation with the constants recorded in a
sidecar.

:func:`replay` reconstructs an animation's frames from its log and the
original trajectory alone; for stroke and coordinate-release runs the
result is bitwise identical to the live render.
"""

from __future__ import annotations

import ast
import dataclasses
import json
import logging
import struct
from pathlib import Path

import numpy as np

from .core import (
    EffectParams,
    LatentTrajectory,
    PainterConfig,
    StrokeEvent,
    StrokeLog,
    canvas_new,
    footprint_slices,
)

__all__ = [
    "FormatError",
    "ValidationError",
    "config_from_dict",
    "config_to_dict",
    "read_npy",
    "read_stroke_log",
    "read_trajectory",
    "replay",
    "write_frames",
    "write_npy",
    "write_pgm",
    "write_stroke_log",
    "write_trajectory",
]

logger = logging.getLogger(__name__)

_MAGIC = b"\x93NUMPY"
_LAYOUTS = ("tchw", "thwc")
_LOG_VERSION = 1


class FormatError(ValueError):
    """A file is not in the expected on-disk format."""


class ValidationError(ValueError):
    """A well-formed file carries values that violate the contract."""


# ---------------------------------------------------------------------------
# NPY tensors


def _header_dict(shape: tuple[int, ...], descr: str) -> bytes:
    if len(shape) == 1:
        shape_repr = f"({shape[0]},)"
    else:
        shape_repr = "(" + ", ".join(str(s) for s in shape) + ")"
    header = (
        "{'descr': '" + descr + "', 'fortran_order': False, "
        "'shape': " + shape_repr + ", }"
    )
    # Pad with spaces so magic + version + length + header is a
    # multiple of 64 bytes, terminated by a newline.
    base = len(_MAGIC) + 2 + 2 + len(header) + 1
    pad = (64 - base % 64) % 64
    return (header + " " * pad + "\n").encode("latin1")


def write_npy(path: str | Path, array: np.ndarray, descr: str = "<f4") -> None:
    """Write ``array`` as an NPY 1.0 file with the given type code.

    Supported type codes: ``<f4`` and ``<i8``.  The payload is written
    in C order.
    """
    if descr == "<f4":
        data = np.ascontiguousarray(array, dtype="<f4")
    elif descr == "<i8":
        data = np.ascontiguousarray(array, dtype="<i8")
    else:
        raise ValueError(f"unsupported descr {descr!r}")
    header = _header_dict(data.shape, descr)
    with open(path, "wb") as fh:
        fh.write(_MAGIC)
        fh.write(b"\x01\x00")
        fh.write(struct.pack("<H", len(header)))
        fh.write(header)
        fh.write(data.tobytes(order="C"))


def read_npy(path: str | Path, descr: str = "<f4") -> np.ndarray:
    """Strictly parse an NPY 1.0 file of the given type code.

    Raises :class:`FormatError` on a bad magic, version, dtype, order
    flag, header syntax, or payload length.
    """
    with open(path, "rb") as fh:
        blob = fh.read()
    if len(blob) < 10 or blob[:6] != _MAGIC:
        raise FormatError(f"{path}: not an NPY file (bad magic)")
    major, minor = blob[6], blob[7]
    if (major, minor) != (1, 0):
        raise FormatError(f"{path}: unsupported NPY version {major}.{minor}")
    (header_len,) = struct.unpack("<H", blob[8:10])
    header_end = 10 + header_len
    if len(blob) < header_end:
        raise FormatError(f"{path}: truncated header")
    header_src = blob[10:header_end].decode("latin1")
    try:
        header = ast.literal_eval(header_src)
    except (ValueError, SyntaxError) as exc:
        raise FormatError(f"{path}: malformed header: {exc}") from exc
    if not isinstance(header, dict):
        raise FormatError(f"{path}: header is not a dict")
    if header.get("descr") != descr:
        raise FormatError(
            f"{path}: expected dtype {descr!r}, found {header.get('descr')!r}"
        )
    if header.get("fortran_order") is not False:
        raise FormatError(f"{path}: expected C-order payload")
    shape = header.get("shape")
    if not (
        isinstance(shape, tuple)
        and all(isinstance(s, int) and s >= 0 for s in shape)
    ):
        raise FormatError(f"{path}: bad shape {shape!r}")
    itemsize = 4 if descr == "<f4" else 8
    expected = int(np.prod(shape, dtype=np.int64)) * itemsize if shape else itemsize
    payload = blob[header_end:]
    if len(payload) != expected:
        raise FormatError(
            f"{path}: payload is {len(payload)} bytes, expected {expected}"
        )
    array = np.frombuffer(payload, dtype=descr).reshape(shape)
    return array.copy()  # writable, owns its memory


def read_trajectory(path: str | Path, layout: str = "tchw") -> LatentTrajectory:
    """Load a ``(T, C, H, W)`` float32 trajectory from an NPY file.

    ``layout="thwc"`` accepts channel-last files and transposes them.
    Non-4D shapes and non-finite values raise
    :class:`ValidationError`; format problems raise
    :class:`FormatError`.
    """
    if layout not in _LAYOUTS:
        raise ValueError(f"layout must be one of {_LAYOUTS}, got {layout!r}")
    array = read_npy(path, "<f4")
    if array.ndim != 4:
        raise ValidationError(
            f"{path}: trajectory must be 4-dimensional, got shape {array.shape}"
        )
    if layout == "thwc":
        array = np.ascontiguousarray(array.transpose(0, 3, 1, 2))
    if array.shape[0] < 1:
        raise ValidationError(f"{path}: trajectory holds no snapshots")
    if not np.isfinite(array).all():
        raise ValidationError(f"{path}: trajectory contains NaN or infinite values")
    return LatentTrajectory(array)


def write_trajectory(trajectory: LatentTrajectory, path: str | Path) -> None:
    """Write a trajectory as a ``(T, C, H, W)`` float32 NPY file."""
    write_npy(path, trajectory.snapshots, "<f4")


# ---------------------------------------------------------------------------
# Frames and previews


def write_frames(
    frames: np.ndarray, path: str | Path, pgm_dir: str | Path | None = None
) -> None:
    """Write an ``(F, C, H, W)`` float32 frame stack, optionally with PGMs.

    With ``pgm_dir`` set, every frame/channel plane is also written as
    a binary PGM, normalized per channel by that channel's min and max
    over the whole animation; the constants land in
    ``normalization.txt`` alongside.  A channel with zero range maps to
    mid-grey.
    """
    frames = np.asarray(frames)
    if frames.ndim != 4:
        raise ValueError(f"frames must have shape (F, C, H, W), got {frames.shape}")
    if frames.shape[0] < 1:
        raise ValueError("refusing to write an empty animation")
    write_npy(path, frames, "<f4")
    if pgm_dir is None:
        return
    pgm_dir = Path(pgm_dir)
    pgm_dir.mkdir(parents=True, exist_ok=True)
    f_count, c_count = frames.shape[:2]
    lines = []
    for c in range(c_count):
        lo = float(frames[:, c].min())
        hi = float(frames[:, c].max())
        lines.append(f"channel {c} min {lo!r} max {hi!r}")
        for f in range(f_count):
            plane = frames[f, c]
            if hi == lo:
                grey = np.full(plane.shape, 128, dtype=np.uint8)
            else:
                scaled = np.round((plane - lo) / (hi - lo) * 255.0)
                grey = np.clip(scaled, 0, 255).astype(np.uint8)
            write_pgm(grey, pgm_dir / f"frame_{f:05d}_c{c}.pgm")
    (pgm_dir / "normalization.txt").write_text("\n".join(lines) + "\n")


def write_pgm(grey: np.ndarray, path: str | Path) -> None:
    """Write a 2-D uint8 array as a binary (P5) PGM file."""
    grey = np.asarray(grey)
    if grey.ndim != 2 or grey.dtype != np.uint8:
        raise ValueError("PGM export needs a 2-D uint8 array")
    h, w = grey.shape
    with open(path, "wb") as fh:
        fh.write(f"P5\n{w} {h}\n255\n".encode("ascii"))
        fh.write(grey.tobytes(order="C"))


# ---------------------------------------------------------------------------
# Stroke logs


def config_to_dict(config: PainterConfig) -> dict:
    """JSON-ready snapshot of a painter configuration."""
    out = dataclasses.asdict(config)
    return out


def config_from_dict(data: dict) -> PainterConfig:
    """Rebuild a painter configuration from its JSON snapshot."""
    if not isinstance(data, dict):
        raise ValidationError("config snapshot must be an object")
    params_data = data.get("effect_params", {})
    if not isinstance(params_data, dict):
        raise ValidationError("effect_params snapshot must be an object")
    known_params = {f.name for f in dataclasses.fields(EffectParams)}
    known_config = {f.name for f in dataclasses.fields(PainterConfig)} - {
        "effect_params"
    }
    try:
        params = EffectParams(
            **{k: v for k, v in params_data.items() if k in known_params}
        )
        config = PainterConfig(
            effect_params=params,
            **{k: v for k, v in data.items() if k in known_config},
        )
    except (TypeError, ValueError) as exc:
        raise ValidationError(f"bad config snapshot: {exc}") from exc
    return config


def write_stroke_log(log: StrokeLog, path: str | Path) -> None:
    """Write a stroke log as JSON Lines.

    Line 1 is the header (format version, canvas shape, configuration
    snapshot); each event follows as one object; a final flush record
    appears when the run emitted a terminal flush frame.  Keys are
    sorted, lines end with ``\\n``.
    """
    header = {
        "version": log.version,
        "shape": list(log.shape),
        "config": config_to_dict(log.config),
    }
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(json.dumps(header, sort_keys=True) + "\n")
        for ev in log.events:
            fh.write(
                json.dumps(
                    {
                        "frame": ev.frame_index,
                        "iter": ev.iteration,
                        "channel": ev.channel,
                        "x": ev.center_x,
                        "y": ev.center_y,
                        "radius": ev.radius,
                    },
                    sort_keys=True,
                )
                + "\n"
            )
        if log.flush_frame is not None:
            fh.write(json.dumps({"flush": True, "frame": log.flush_frame}) + "\n")


def _require_int(obj: dict, key: str, line_no: int, minimum: int = 0) -> int:
    value = obj.get(key)
    if not isinstance(value, int) or isinstance(value, bool) or value < minimum:
        raise ValidationError(f"line {line_no}: field {key!r} must be an int >= {minimum}")
    return value


def read_stroke_log(path: str | Path) -> StrokeLog:
    """Parse and validate a JSON Lines stroke log.

    Checks the header shape and config, event coordinate bounds,
    non-decreasing frame indices, and flush placement.  Malformed JSON
    raises :class:`FormatError`; well-formed but contract-violating
    content raises :class:`ValidationError`.
    """
    with open(path, "r", encoding="utf-8") as fh:
        lines = fh.read().splitlines()
    if not lines:
        raise FormatError(f"{path}: empty log file")

    def parse(line: str, line_no: int) -> dict:
        try:
            obj = json.loads(line)
        except json.JSONDecodeError as exc:
            raise FormatError(f"{path}: line {line_no}: invalid JSON: {exc}") from exc
        if not isinstance(obj, dict):
            raise FormatError(f"{path}: line {line_no}: expected an object")
        return obj

    header = parse(lines[0], 1)
    if header.get("version") != _LOG_VERSION:
        raise ValidationError(f"{path}: unsupported log version {header.get('version')!r}")
    shape = header.get("shape")
    if not (
        isinstance(shape, list)
        and len(shape) == 3
        and all(isinstance(s, int) and s > 0 for s in shape)
    ):
        raise ValidationError(f"{path}: bad shape in header: {shape!r}")
    c_count, h_count, w_count = shape
    config = config_from_dict(header.get("config", {}))

    events: list[StrokeEvent] = []
    flush_frame: int | None = None
    last_frame = -1
    last_iter = -1
    for line_no, line in enumerate(lines[1:], start=2):
        if not line.strip():
            continue
        obj = parse(line, line_no)
        if obj.get("flush") is True:
            if flush_frame is not None:
                raise ValidationError(f"{path}: line {line_no}: duplicate flush record")
            flush_frame = _require_int(obj, "frame", line_no)
            if events and flush_frame <= events[-1].frame_index:
                raise ValidationError(
                    f"{path}: line {line_no}: flush frame must follow all events"
                )
            continue
        if flush_frame is not None:
            raise ValidationError(
                f"{path}: line {line_no}: events after the flush record"
            )
        frame = _require_int(obj, "frame", line_no)
        iteration = _require_int(obj, "iter", line_no)
        channel = _require_int(obj, "channel", line_no)
        x = _require_int(obj, "x", line_no)
        y = _require_int(obj, "y", line_no)
        radius = _require_int(obj, "radius", line_no)
        if channel >= c_count:
            raise ValidationError(f"{path}: line {line_no}: channel {channel} out of range")
        if x >= w_count or y >= h_count:
            raise ValidationError(
                f"{path}: line {line_no}: centre ({x}, {y}) outside {w_count}x{h_count}"
            )
        if frame < last_frame:
            raise ValidationError(
                f"{path}: line {line_no}: frame indices must be non-decreasing"
            )
        if iteration < last_iter:
            raise ValidationError(
                f"{path}: line {line_no}: iteration indices must be non-decreasing"
            )
        last_frame = frame
        last_iter = iteration
        events.append(StrokeEvent(frame, iteration, channel, x, y, radius))

    return StrokeLog(
        shape=(c_count, h_count, w_count),
        config=config,
        events=events,
        flush_frame=flush_frame,
        version=_LOG_VERSION,
    )


# ---------------------------------------------------------------------------
# Replay


def replay(log: StrokeLog, trajectory: LatentTrajectory) -> np.ndarray:
    """Rebuild an animation's frames from its log and trajectory.

    Events sharing a frame index are applied together before that
    frame is emitted; a flush record releases whatever still differs
    from the final snapshot and emits the closing frame.  For runs
    whose frames are coordinate copies (strokes, glow, dissolve, flip,
    passthrough) the result is bitwise identical to the live frames.
    """
    if tuple(log.shape) != trajectory.frame_shape:
        raise ValidationError(
            f"log shape {tuple(log.shape)} does not match trajectory "
            f"{trajectory.frame_shape}"
        )
    for ev in log.events:
        if ev.iteration >= trajectory.steps:
            raise ValidationError(
                f"event references iteration {ev.iteration} of a "
                f"{trajectory.steps}-snapshot trajectory"
            )
    c, h, w = trajectory.frame_shape
    canvas = canvas_new(c, h, w)
    frames: list[np.ndarray] = []
    i = 0
    events = log.events
    while i < len(events):
        frame_index = events[i].frame_index
        j = i
        while j < len(events) and events[j].frame_index == frame_index:
            ev = events[j]
            snap = trajectory.snapshots[ev.iteration]
            rows, cols = footprint_slices((ev.center_x, ev.center_y), ev.radius, h, w)
            canvas.z[ev.channel, rows, cols] = snap[ev.channel, rows, cols]
            canvas.heatmap[rows, cols] += 1
            j += 1
        frames.append(canvas.z.copy())
        i = j
    if log.flush_frame is not None:
        final = trajectory.snapshots[-1]
        diff = canvas.z != final
        if diff.any():
            cs, ys, xs = np.nonzero(diff)
            canvas.z[cs, ys, xs] = final[cs, ys, xs]
            np.add.at(canvas.heatmap, (ys, xs), 1)
        frames.append(canvas.z.copy())
    if not frames:
        return np.empty((0, c, h, w), dtype=np.float32)
    return np.stack(frames)
