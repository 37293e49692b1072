"""Shared fixtures: the standard acquisition grid and trigger-mode pairs.

Everything here is a frozen dataclass, so session scope is safe.
"""

from __future__ import annotations

import pytest

from heraldsim.modes import TimeGrid, default_grid, make_trigger_mode

GAMMA = 53e6     # trigger filter bandwidth, Hz
ETA = 0.76       # overall intensity transmission
MID = 250e-9     # midpoint of the default 500 ns window


def herald_times(delta_t: float, center: float = MID) -> tuple[float, float]:
    """Detection times separated by delta_t, centered in the window."""
    return center - 0.5 * delta_t, center + 0.5 * delta_t


@pytest.fixture(scope="session")
def grid() -> TimeGrid:
    return default_grid()


@pytest.fixture(scope="session")
def pair10(grid):
    t1, t2 = herald_times(10e-9)
    return make_trigger_mode(t1, GAMMA, grid), make_trigger_mode(t2, GAMMA, grid)


@pytest.fixture(scope="session")
def pair40(grid):
    t1, t2 = herald_times(40e-9)
    return make_trigger_mode(t1, GAMMA, grid), make_trigger_mode(t2, GAMMA, grid)
