"""Shared fixtures: a plain sequence space and sparse-state helpers."""

from __future__ import annotations

import numpy as np
import pytest

from ges.space import DualMetricSpace


@pytest.fixture(scope="session")
def seq_space() -> DualMetricSpace:
    """1-D integer-slot space with unit quadrature and base-2 weights."""
    return DualMetricSpace(tag="seq", index_dim=1, truncation_radius=32)


def basis_state(space: DualMetricSpace, n: int, scale: float = 1.0):
    return space.state([n], [scale])


def random_sparse_state(space: DualMetricSpace, rng: np.random.Generator,
                        max_slots: int = 6, radius: int = 12,
                        amp: float = 2.0):
    k = int(rng.integers(0, max_slots + 1))
    idx = rng.choice(np.arange(-radius, radius + 1), size=k, replace=False)
    val = rng.uniform(-amp, amp, size=k) + 1j * rng.uniform(-amp, amp, size=k)
    return space.state(idx, val)
