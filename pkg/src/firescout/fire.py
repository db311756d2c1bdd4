"""Wildfire dynamics: ignition, wind-driven fire and smoke spread, clock."""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .grid import Cell, CellState, Grid, NEIGHBOR_OFFSETS, WindModel, angle_between


@dataclass(frozen=True)
class FireClock:
    """Couples the fire to UAV time: the fire spreads every `spread_rate` ticks."""

    t: int = 0
    spread_rate: int = 20

    def __post_init__(self):
        if self.t < 0:
            raise ValueError("t must be nonnegative")
        if self.spread_rate < 1:
            raise ValueError("spread_rate must be >= 1")


def ignite(grid: Grid, cell: Cell) -> Grid:
    """Set a single cell burning. Idempotent for an already-burning cell."""
    if not grid.in_bounds(cell):
        raise ValueError(f"cannot ignite out-of-bounds cell {cell}")
    if grid.is_obstacle(cell):
        raise ValueError(f"cannot ignite obstacle cell {cell}")
    out = grid.copy()
    out.states[cell[1], cell[0]] = CellState.BURNING
    return out


def _shift(mask: np.ndarray, dx: int, dy: int) -> np.ndarray:
    """Translate a boolean mask by (dx, dy) without wraparound."""
    out = np.zeros_like(mask)
    h, w = mask.shape
    if abs(dx) >= w or abs(dy) >= h:
        return out
    ys_dst = slice(max(0, dy), h + min(0, dy))
    xs_dst = slice(max(0, dx), w + min(0, dx))
    ys_src = slice(max(0, -dy), h + min(0, -dy))
    xs_src = slice(max(0, -dx), w + min(0, -dx))
    out[ys_dst, xs_dst] = mask[ys_src, xs_src]
    return out


def spread_offsets(wind: WindModel, radius: float) -> list[Cell]:
    """Integer offsets within `radius` whose direction lies inside the wind cone."""
    out = []
    r = int(math.floor(radius))
    for dy in range(-r, r + 1):
        for dx in range(-r, r + 1):
            if dx == 0 and dy == 0:
                continue
            if math.hypot(dx, dy) <= radius and angle_between((dx, dy), wind.direction) < wind.delta:
                out.append((dx, dy))
    return out


def step_fire_spread(grid: Grid, wind: WindModel) -> Grid:
    """One synchronous fire step: ignite downwind neighbors, retire the old front.

    Every neighbor of a burning cell whose offset lies within delta of the
    wind direction ignites (if it was clear or smoke and is not an obstacle);
    then every previously burning cell becomes burned.
    """
    burning = grid.states == CellState.BURNING
    targets = np.zeros_like(burning)
    for dx, dy in NEIGHBOR_OFFSETS:
        if angle_between((dx, dy), wind.direction) < wind.delta:
            targets |= _shift(burning, dx, dy)
    flammable = (grid.states == CellState.CLEAR) | (grid.states == CellState.SMOKE)
    targets &= flammable & ~grid.obstacles
    out = grid.copy()
    out.states[targets] = CellState.BURNING
    out.states[burning] = CellState.BURNED
    return out


def step_smoke_spread(grid: Grid, wind: WindModel) -> Grid:
    """Fill clear cells within mu of each burning cell, inside the wind cone."""
    burning = grid.states == CellState.BURNING
    if not burning.any():
        return grid
    targets = np.zeros_like(burning)
    for dx, dy in spread_offsets(wind, wind.mu):
        targets |= _shift(burning, dx, dy)
    # Smoke only overwrites clear fuel: state priority burning > burned > smoke.
    targets &= (grid.states == CellState.CLEAR) & ~grid.obstacles
    out = grid.copy()
    out.states[targets] = CellState.SMOKE
    return out


def advance(grid: Grid, wind: WindModel, clock: FireClock) -> tuple[Grid, FireClock]:
    """Tick one UAV timestamp; run a fire+smoke step on spread boundaries."""
    clock = replace(clock, t=clock.t + 1)
    if clock.t % clock.spread_rate == 0:
        grid = step_smoke_spread(step_fire_spread(grid, wind), wind)
    return grid, clock
