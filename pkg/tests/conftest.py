"""Shared fixtures for the test suite."""

from __future__ import annotations

import numpy as np
import pytest

from latentbrush import LatentTrajectory, PainterConfig, synthetic_trajectory


@pytest.fixture(scope="session")
def bundled_trajectory() -> LatentTrajectory:
    """The bundled 12-snapshot fixture with front-loaded change."""
    return synthetic_trajectory()


@pytest.fixture()
def default_config() -> PainterConfig:
    return PainterConfig()


@pytest.fixture()
def rng() -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence([987654321]))


def random_trajectory(
    rng: np.random.Generator,
    steps: int,
    channels: int,
    height: int,
    width: int,
) -> LatentTrajectory:
    snaps = rng.normal(size=(steps, channels, height, width)).astype(np.float32)
    return LatentTrajectory(snaps)
