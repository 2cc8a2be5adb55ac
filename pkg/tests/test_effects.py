"""Whole-canvas release effects: plans, orderings, and full runs."""

from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra import numpy as hnp

from latentbrush import (
    EffectParams,
    LatentTrajectory,
    PainterConfig,
    ZeroGapError,
    canvas_new,
    derive_rng,
    dissolve_plan,
    fade_plan,
    flip_plan,
    glow_plan,
    mass_center,
    partition_counts,
    passthrough_plan,
    qualifying_pixels,
    render_animation,
    replay,
)
from latentbrush.effects import fade_frame_count, flip_frame_count

from oracle import ref_mass_center


def make_canvas(z: np.ndarray):
    from latentbrush import Canvas

    return Canvas(z=z.astype(np.float32).copy(), heatmap=np.zeros(z.shape[1:], dtype=np.int64))


def plan_pixels(plan) -> list[tuple[int, int]]:
    """Distinct (x, y) pixels of a plan, in release order."""
    seen: list[tuple[int, int]] = []
    for group in plan.frames:
        for c, x, y in group.tolist():
            if c == 0:
                seen.append((x, y))
    return seen


# ---------------------------------------------------------------------------
# Partitioning


def test_partition_counts_frozen_example():
    assert partition_counts(10, 3) == [4, 3, 3]


@settings(max_examples=100)
@given(st.integers(0, 500), st.integers(1, 40))
def test_partition_counts_properties(n, k):
    counts = partition_counts(n, k)
    assert sum(counts) == n
    assert len(counts) == min(k, n)
    assert all(c >= 1 for c in counts) or n == 0
    if counts:
        assert max(counts) - min(counts) <= 1
        # remainder goes to the earlier groups
        assert counts == sorted(counts, reverse=True)


def test_partition_counts_validation():
    with pytest.raises(ValueError):
        partition_counts(-1, 3)
    with pytest.raises(ValueError):
        partition_counts(5, 0)
    assert partition_counts(0, 4) == []


# ---------------------------------------------------------------------------
# Qualifying pixels


def test_qualifying_pixels_strict_threshold():
    theta = 0.05
    exact = float(np.float32(theta))
    canvas = canvas_new(1, 1, 3)
    snap = np.array([[[exact, exact * 1.001, 0.0]]], dtype=np.float32)
    rows = qualifying_pixels(canvas, snap, theta)
    assert rows.tolist() == [[0, 1]]


def test_qualifying_pixels_any_channel():
    canvas = canvas_new(3, 2, 2)
    snap = np.zeros((3, 2, 2), dtype=np.float32)
    snap[2, 1, 0] = 1.0  # only channel 2 differs at pixel (x=0, y=1)
    rows = qualifying_pixels(canvas, snap, 0.05)
    assert rows.tolist() == [[1, 0]]


def test_qualifying_pixels_shape_check():
    canvas = canvas_new(1, 2, 2)
    with pytest.raises(ValueError):
        qualifying_pixels(canvas, np.zeros((1, 3, 3), dtype=np.float32), 0.05)


# ---------------------------------------------------------------------------
# Mass centre


@settings(max_examples=60)
@given(
    hnp.arrays(
        dtype=np.float32,
        shape=st.tuples(st.integers(1, 4), st.integers(1, 7), st.integers(1, 7)),
        elements=st.floats(-4, 4, width=32),
    ),
    st.data(),
)
def test_mass_center_matches_reference(snap, data):
    canvas = canvas_new(*snap.shape)
    if np.array_equal(canvas.z, snap):
        snap = snap.copy()
        snap[0, 0, 0] = 1.0
    got = mass_center(canvas, snap)
    want = ref_mass_center(canvas.z, snap)
    assert got == want  # identical rounding, so exact equality holds


def test_mass_center_single_pixel():
    canvas = canvas_new(2, 5, 7)
    snap = np.zeros((2, 5, 7), dtype=np.float32)
    snap[1, 3, 6] = 2.5
    assert mass_center(canvas, snap) == (6.0, 3.0)


def test_mass_center_uniform_is_grid_centre():
    canvas = canvas_new(1, 3, 5)
    snap = np.ones((1, 3, 5), dtype=np.float32)
    cx, cy = mass_center(canvas, snap)
    assert cx == pytest.approx(2.0)
    assert cy == pytest.approx(1.0)


def test_mass_center_zero_gap_raises():
    canvas = canvas_new(1, 2, 2)
    with pytest.raises(ZeroGapError):
        mass_center(canvas, np.zeros((1, 2, 2), dtype=np.float32))
    assert issubclass(ZeroGapError, ValueError)


# ---------------------------------------------------------------------------
# Glow


def test_glow_orders_by_distance_from_mass_centre():
    rng = np.random.default_rng(11)
    snap = (rng.uniform(-1, 1, size=(2, 9, 9)) * (rng.random((2, 9, 9)) > 0.4)).astype(
        np.float32
    )
    canvas = canvas_new(2, 9, 9)
    plan = glow_plan(canvas, snap, 0.05, EffectParams(), 0)
    cx, cy = mass_center(canvas, snap)
    d2s = [(x - cx) ** 2 + (y - cy) ** 2 for x, y in plan_pixels(plan)]
    assert d2s == sorted(d2s)


def test_glow_tie_break_row_then_column():
    canvas = canvas_new(1, 3, 3)
    snap = np.zeros((1, 3, 3), dtype=np.float32)
    # four pixels symmetric about the centre cell: all tie on distance
    for y, x in [(0, 1), (1, 0), (1, 2), (2, 1)]:
        snap[0, y, x] = 1.0
    plan = glow_plan(canvas, snap, 0.05, EffectParams(frames_per_iteration=1), 0)
    assert plan_pixels(plan) == [(1, 0), (0, 1), (2, 1), (1, 2)]


def test_glow_covers_exactly_the_qualifying_pixels():
    rng = np.random.default_rng(12)
    snap = (rng.normal(size=(3, 8, 8)) * (rng.random((3, 8, 8)) > 0.5)).astype(np.float32)
    canvas = canvas_new(3, 8, 8)
    plan = glow_plan(canvas, snap, 0.1, EffectParams(), 0)
    want = {(int(x), int(y)) for y, x in qualifying_pixels(canvas, snap, 0.1).tolist()}
    got = plan_pixels(plan)
    assert len(got) == len(set(got))  # no pixel released twice
    assert set(got) == want


def test_glow_groups_are_pixel_major_channel_ascending():
    canvas = canvas_new(3, 4, 4)
    snap = np.ones((3, 4, 4), dtype=np.float32)
    plan = glow_plan(canvas, snap, 0.05, EffectParams(frames_per_iteration=2), 0)
    for group in plan.frames:
        assert group.shape[0] % 3 == 0
        for i in range(0, group.shape[0], 3):
            trio = group[i : i + 3]
            assert trio[:, 0].tolist() == [0, 1, 2]  # channels together, ascending
            assert len(set(map(tuple, trio[:, 1:].tolist()))) == 1  # same pixel


def test_glow_empty_when_nothing_qualifies():
    canvas = canvas_new(1, 4, 4)
    snap = np.full((1, 4, 4), 0.01, dtype=np.float32)
    plan = glow_plan(canvas, snap, 0.05, EffectParams(), 3)
    assert plan.frames == []
    assert plan.target_iteration == 3


def test_glow_respects_frames_per_iteration():
    canvas = canvas_new(1, 6, 6)
    snap = np.ones((1, 6, 6), dtype=np.float32)
    plan = glow_plan(canvas, snap, 0.05, EffectParams(frames_per_iteration=5), 0)
    assert len(plan.frames) == 5
    sizes = [g.shape[0] for g in plan.frames]
    assert sum(sizes) == 36
    assert max(sizes) - min(sizes) <= 1


def test_chunked_partition_when_frame_budget_unset():
    canvas = canvas_new(1, 6, 6)
    snap = np.ones((1, 6, 6), dtype=np.float32)
    params = EffectParams(frames_per_iteration=None, chunk_size=10)
    plan = glow_plan(canvas, snap, 0.05, params, 0)
    sizes = [g.shape[0] for g in plan.frames]
    assert sizes == [10, 10, 10, 6]


# ---------------------------------------------------------------------------
# Dissolve


def test_dissolve_random_is_seed_deterministic():
    rng = np.random.default_rng(13)
    snap = rng.normal(size=(2, 8, 8)).astype(np.float32)
    p1 = dissolve_plan(canvas_new(2, 8, 8), snap, 0.05, EffectParams(seed=7), 2)
    p2 = dissolve_plan(canvas_new(2, 8, 8), snap, 0.05, EffectParams(seed=7), 2)
    assert len(p1.frames) == len(p2.frames)
    for a, b in zip(p1.frames, p2.frames):
        assert np.array_equal(a, b)


def test_dissolve_random_varies_with_iteration_and_seed():
    snap = np.random.default_rng(14).normal(size=(1, 10, 10)).astype(np.float32)
    base = plan_pixels(dissolve_plan(canvas_new(1, 10, 10), snap, 0.05, EffectParams(seed=7), 0))
    other_iter = plan_pixels(
        dissolve_plan(canvas_new(1, 10, 10), snap, 0.05, EffectParams(seed=7), 1)
    )
    other_seed = plan_pixels(
        dissolve_plan(canvas_new(1, 10, 10), snap, 0.05, EffectParams(seed=8), 0)
    )
    assert set(base) == set(other_iter) == set(other_seed)  # same pixels...
    assert base != other_iter  # ...different shuffles
    assert base != other_seed


def test_dissolve_content_ranks_by_descending_gap():
    rng = np.random.default_rng(15)
    snap = rng.uniform(-2, 2, size=(2, 6, 6)).astype(np.float32)
    canvas = canvas_new(2, 6, 6)
    plan = dissolve_plan(canvas, snap, 0.1, EffectParams(dissolve_mode="content"), 0)
    gains = np.abs(canvas.z - snap).astype(np.float64).sum(axis=0)
    got = plan_pixels(plan)
    want = sorted(got, key=lambda p: (-gains[p[1], p[0]], p[1], p[0]))
    assert got == want


def test_dissolve_vertical_rows_ascend():
    rng = np.random.default_rng(16)
    snap = (rng.normal(size=(1, 7, 7)) * (rng.random((1, 7, 7)) > 0.3)).astype(np.float32)
    canvas = canvas_new(1, 7, 7)
    plan = dissolve_plan(canvas, snap, 0.05, EffectParams(dissolve_mode="vertical"), 0)
    ys = [y for _, y in plan_pixels(plan)]
    assert ys == sorted(ys)
    # within a row the set matches, order is shuffled deterministically
    again = dissolve_plan(canvas, snap, 0.05, EffectParams(dissolve_mode="vertical"), 0)
    assert plan_pixels(plan) == plan_pixels(again)


def test_dissolve_empty_when_nothing_qualifies():
    plan = dissolve_plan(
        canvas_new(1, 3, 3), np.zeros((1, 3, 3), dtype=np.float32), 0.05, EffectParams(), 0
    )
    assert plan.frames == []


def test_derive_rng_reproducible():
    a = derive_rng(42, 3).integers(0, 1 << 30, size=8)
    b = derive_rng(42, 3).integers(0, 1 << 30, size=8)
    c = derive_rng(42, 4).integers(0, 1 << 30, size=8)
    assert np.array_equal(a, b)
    assert not np.array_equal(a, c)


# ---------------------------------------------------------------------------
# Fade


def test_fade_final_frame_is_bitwise_snapshot():
    rng = np.random.default_rng(17)
    z = rng.normal(size=(2, 5, 5)).astype(np.float32)
    snap = rng.normal(size=(2, 5, 5)).astype(np.float32)
    frames = fade_plan(make_canvas(z), snap, 6)
    assert len(frames) == 6
    assert np.array_equal(frames[-1], snap)


def test_fade_intermediates_match_closed_form_exactly():
    rng = np.random.default_rng(18)
    z = rng.normal(size=(1, 4, 4)).astype(np.float32)
    snap = rng.normal(size=(1, 4, 4)).astype(np.float32)
    k = 5
    frames = fade_plan(make_canvas(z), snap, k)
    z0 = z.astype(np.float64)
    d = snap.astype(np.float64)
    for i, frame in enumerate(frames[:-1], start=1):
        expected = (z0 + (i / k) * (d - z0)).astype(np.float32)
        assert np.array_equal(frame, expected)


def test_fade_progression_is_monotone_toward_target():
    z = np.zeros((1, 2, 2), dtype=np.float32)
    snap = np.ones((1, 2, 2), dtype=np.float32)
    frames = fade_plan(make_canvas(z), snap, 4)
    values = [float(f[0, 0, 0]) for f in frames]
    assert values == [0.25, 0.5, 0.75, 1.0]


def test_fade_k_one_is_a_single_copy():
    z = np.zeros((1, 3, 3), dtype=np.float32)
    snap = np.full((1, 3, 3), 0.7, dtype=np.float32)
    frames = fade_plan(make_canvas(z), snap, 1)
    assert len(frames) == 1
    assert np.array_equal(frames[0], snap)


def test_fade_validation():
    canvas = canvas_new(1, 2, 2)
    with pytest.raises(ValueError):
        fade_plan(canvas, np.zeros((1, 3, 3), dtype=np.float32), 3)
    with pytest.raises(ValueError):
        fade_plan(canvas, np.zeros((1, 2, 2), dtype=np.float32), 0)


# ---------------------------------------------------------------------------
# Flip


def test_flip_band_sizes_frozen_example():
    canvas = canvas_new(1, 4, 10)
    snap = np.ones((1, 4, 10), dtype=np.float32)
    plan = flip_plan(canvas, snap, 3)
    widths = [len({x for _, x, _ in g.tolist()}) for g in plan.frames]
    assert widths == [4, 3, 3]


def test_flip_walks_left_to_right_and_covers_everything():
    canvas = canvas_new(2, 3, 8)
    snap = np.zeros((2, 3, 8), dtype=np.float32)
    plan = flip_plan(canvas, snap, 4)
    last_col = -1
    seen = set()
    for group in plan.frames:
        cols = sorted({x for _, x, _ in group.tolist()})
        assert cols[0] == last_col + 1  # bands are adjacent, left to right
        last_col = cols[-1]
        seen.update(map(tuple, group.tolist()))
    assert len(seen) == 2 * 3 * 8  # every (channel, x, y) exactly once


def test_flip_is_content_independent():
    rng = np.random.default_rng(19)
    snap = rng.normal(size=(1, 5, 9)).astype(np.float32)
    a = flip_plan(canvas_new(1, 5, 9), snap, 3)
    z = rng.normal(size=(1, 5, 9)).astype(np.float32)
    b = flip_plan(make_canvas(z), snap, 3)
    assert len(a.frames) == len(b.frames)
    for ga, gb in zip(a.frames, b.frames):
        assert np.array_equal(ga, gb)


def test_flip_validation():
    canvas = canvas_new(1, 2, 2)
    with pytest.raises(ValueError):
        flip_plan(canvas, np.zeros((1, 2, 2), dtype=np.float32), 0)
    with pytest.raises(ValueError):
        flip_plan(canvas, np.zeros((1, 3, 3), dtype=np.float32), 2)


# ---------------------------------------------------------------------------
# Passthrough plan


def test_passthrough_is_one_full_frame():
    snap = np.ones((2, 3, 4), dtype=np.float32)
    plan = passthrough_plan(snap, 5)
    assert plan.target_iteration == 5
    assert len(plan.frames) == 1
    group = plan.frames[0]
    assert group.shape == (2 * 3 * 4, 3)
    assert len(set(map(tuple, group.tolist()))) == 24
    assert group[:, 0].max() == 1 and group[:, 1].max() == 3 and group[:, 2].max() == 2


def test_passthrough_rejects_bad_rank():
    with pytest.raises(ValueError):
        passthrough_plan(np.ones((3, 4), dtype=np.float32))


# ---------------------------------------------------------------------------
# Frame-count fallbacks


def test_frame_count_fallbacks():
    params = EffectParams(frames_per_iteration=None, chunk_size=64)
    assert fade_frame_count((4, 16, 16), params) == 16  # 1024 / 64
    assert flip_frame_count((4, 16, 16), params) == 4  # 64/16 -> 4 cols per band
    fixed = EffectParams(frames_per_iteration=9)
    assert fade_frame_count((4, 16, 16), fixed) == 9
    assert flip_frame_count((4, 16, 16), fixed) == 9


# ---------------------------------------------------------------------------
# Full effect runs


def effect_config(effect: str, **param_overrides) -> PainterConfig:
    return PainterConfig(effect=effect, effect_params=EffectParams(**param_overrides))


@pytest.fixture(scope="module")
def small_trajectory():
    rng = np.random.default_rng(2025)
    snaps = np.cumsum(rng.normal(size=(4, 2, 8, 8)) * 0.5, axis=0).astype(np.float32)
    return LatentTrajectory(snaps)


def test_passthrough_run_emits_exactly_one_frame_per_snapshot(small_trajectory):
    run = render_animation(small_trajectory, effect_config("passthrough"))
    assert run.frames.shape[0] == len(small_trajectory)
    assert np.array_equal(run.frames[-1], small_trajectory.snapshots[-1])
    for i, frame in enumerate(run.frames):
        assert np.array_equal(frame, small_trajectory.snapshots[i])


def test_passthrough_run_even_for_constant_trajectory():
    snaps = np.zeros((3, 1, 4, 4), dtype=np.float32)
    run = render_animation(LatentTrajectory(snaps), effect_config("passthrough"))
    assert run.frames.shape[0] == 3


@pytest.mark.parametrize("effect", ["glow", "dissolve", "flip", "fade", "passthrough"])
def test_effect_runs_land_on_final_snapshot(small_trajectory, effect):
    run = render_animation(small_trajectory, effect_config(effect))
    assert np.array_equal(run.canvas.z, small_trajectory.snapshots[-1])
    assert np.array_equal(run.frames[-1], small_trajectory.snapshots[-1])


@pytest.mark.parametrize("effect", ["glow", "dissolve", "flip", "passthrough"])
def test_effect_logs_replay_bitwise(small_trajectory, effect):
    run = render_animation(small_trajectory, effect_config(effect))
    frames = replay(run.log, small_trajectory)
    assert np.array_equal(frames, run.frames)


def test_fade_log_carries_no_events(small_trajectory):
    run = render_animation(small_trajectory, effect_config("fade"))
    assert run.log.events == []


def test_flip_skips_settled_iterations():
    rng = np.random.default_rng(23)
    first = rng.normal(size=(1, 6, 6)).astype(np.float32)
    snaps = np.stack([first, first, first * 2.0])
    run = render_animation(
        LatentTrajectory(snaps), effect_config("flip", frames_per_iteration=3)
    )
    assert [r.qualified for r in run.reports] == [True, False, True]
    assert run.frames.shape[0] == 6  # 3 bands twice, middle iteration silent


def test_fade_skips_settled_iterations():
    first = np.full((1, 4, 4), 0.5, dtype=np.float32)
    snaps = np.stack([first, first])
    run = render_animation(
        LatentTrajectory(snaps), effect_config("fade", frames_per_iteration=4)
    )
    assert [r.qualified for r in run.reports] == [True, False]
    assert run.frames.shape[0] == 4


def test_dissolve_modes_all_complete(small_trajectory):
    for mode in ("random", "content", "vertical"):
        run = render_animation(
            small_trajectory, effect_config("dissolve", dissolve_mode=mode)
        )
        assert np.array_equal(run.canvas.z, small_trajectory.snapshots[-1])


def test_effect_heatmap_counts_every_release(small_trajectory):
    run = render_animation(small_trajectory, effect_config("passthrough"))
    # every snapshot releases every coordinate once; the heatmap counts
    # per (channel, x, y), so each pixel accrues one hit per channel
    c, h, w = small_trajectory.frame_shape
    assert int(run.canvas.heatmap.sum()) == len(small_trajectory) * c * h * w
    assert run.canvas.heatmap.min() == len(small_trajectory) * c
