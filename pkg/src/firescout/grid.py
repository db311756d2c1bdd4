"""Lattice geometry: cells, states, vectors, angles, the world grid."""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import IntEnum

import numpy as np

# A cell is (x, y): x is the column index, y is the row index.
# +x points east, +y points north.
Cell = tuple[int, int]
Vec2 = tuple[float, float]

# 8-connected neighbor offsets, counterclockwise from east. This order is
# load-bearing: it fixes iteration order everywhere ties could otherwise
# depend on hashing or insertion order.
NEIGHBOR_OFFSETS: tuple[Cell, ...] = (
    (1, 0),    # E
    (1, 1),    # NE
    (0, 1),    # N
    (-1, 1),   # NW
    (-1, 0),   # W
    (-1, -1),  # SW
    (0, -1),   # S
    (1, -1),   # SE
)


class CellState(IntEnum):
    CLEAR = 0
    BURNING = 1
    BURNED = 2
    SMOKE = 3


def angle_between(a: Vec2, b: Vec2) -> float:
    """Angle between two nonzero vectors in degrees, in [0, 180]."""
    ax, ay = a
    bx, by = b
    na = math.hypot(ax, ay)
    nb = math.hypot(bx, by)
    if na == 0.0 or nb == 0.0:
        raise ValueError("angle_between requires nonzero vectors")
    cos = (ax * bx + ay * by) / (na * nb)
    cos = max(-1.0, min(1.0, cos))
    return math.degrees(math.acos(cos))


def euclidean(a: Cell, b: Cell) -> float:
    """Euclidean distance between two cells, in cell units."""
    return math.hypot(a[0] - b[0], a[1] - b[1])


def row_major_key(c: Cell) -> tuple[int, int]:
    """Deterministic tie-break order: by row (y), then column (x)."""
    return (c[1], c[0])


@dataclass
class Grid:
    """M x N world with a per-cell state array and a static obstacle mask.

    Arrays are indexed [y, x]. Obstacle cells stay CLEAR in `states`: they
    are flight/fuel exclusions, not an observation outcome.
    """

    width: int
    height: int
    states: np.ndarray     # uint8, shape (height, width)
    obstacles: np.ndarray  # bool, shape (height, width)

    def __post_init__(self):
        if self.states.shape != (self.height, self.width):
            raise ValueError("states shape does not match grid dimensions")
        if self.obstacles.shape != (self.height, self.width):
            raise ValueError("obstacles shape does not match grid dimensions")
        if (self.states[self.obstacles] != CellState.CLEAR).any():
            raise ValueError("obstacle cells must be CLEAR")

    @classmethod
    def empty(cls, width: int, height: int, obstacles: np.ndarray | None = None) -> Grid:
        if width < 1 or height < 1:
            raise ValueError("grid dimensions must be positive")
        if obstacles is None:
            obstacles = np.zeros((height, width), dtype=bool)
        states = np.zeros((height, width), dtype=np.uint8)
        return cls(width, height, states, obstacles.astype(bool))

    def copy(self) -> Grid:
        # Obstacles are immutable by convention, so the mask is shared.
        return Grid(self.width, self.height, self.states.copy(), self.obstacles)

    def in_bounds(self, c: Cell) -> bool:
        return 0 <= c[0] < self.width and 0 <= c[1] < self.height

    def is_obstacle(self, c: Cell) -> bool:
        return bool(self.obstacles[c[1], c[0]])

    def state_at(self, c: Cell) -> CellState:
        return CellState(self.states[c[1], c[0]])


def neighbors8(c: Cell, grid: Grid) -> list[Cell]:
    """In-bounds cells at Chebyshev distance 1, in the fixed offset order."""
    x, y = c
    out = []
    for dx, dy in NEIGHBOR_OFFSETS:
        n = (x + dx, y + dy)
        if 0 <= n[0] < grid.width and 0 <= n[1] < grid.height:
            out.append(n)
    return out


@dataclass
class WindModel:
    """Static wind: direction vector, spread half-angle, smoke reach.

    delta is the angular offset (degrees) from the wind direction within
    which fire and smoke propagate; mu is the smoke spread distance in cells.
    """

    direction: Vec2
    delta: float
    mu: float

    def __post_init__(self):
        if math.hypot(*self.direction) == 0.0:
            raise ValueError("wind direction must be nonzero")
        if not (0.0 < self.delta <= 180.0):
            raise ValueError("delta must be in (0, 180] degrees")
        if self.mu < 0.0:
            raise ValueError("mu must be nonnegative")

    @property
    def search_direction(self) -> Vec2:
        """Direction to search in: upwind of an alerting sensor."""
        return (-self.direction[0], -self.direction[1])
