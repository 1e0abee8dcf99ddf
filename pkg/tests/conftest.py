from __future__ import annotations

import math

import numpy as np
import pytest

from shearpks import GridSpec, SpectralField


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(20260818)


@pytest.fixture
def box32() -> GridSpec:
    return GridSpec(nx=32, ny=32, lx=2.0 * math.pi, ly=2.0 * math.pi)


def random_field(grid: GridSpec, rng: np.random.Generator,
                 scale: float = 1.0) -> SpectralField:
    """Random real field built in physical space (hence exactly Hermitian)."""
    return SpectralField.from_physical(
        scale * rng.standard_normal((grid.nx, grid.ny)), grid)
