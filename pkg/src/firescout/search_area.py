"""Probabilistic search area anchored at alerting sensors, with Bayes updates.

The area is the set of cells upwind of the alerting sensors (within mu_a and
inside the delta cone around the search direction sigma = -wind). Observations
carry binary likelihoods, so each update zeroes a subset of cells and leaves
the rest untouched.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .grid import Cell, CellState, Grid, Vec2, WindModel, angle_between, euclidean


@dataclass(frozen=True)
class Observation:
    position: Cell
    state: CellState


def prior_probability(
    cell: Cell, anchor: Cell, sigma: Vec2, delta: float, alpha: float, beta: float
) -> float:
    """Validation prior for a search cell relative to one alerting sensor.

    Decays with the angular offset from the search direction and with the
    distance to the sensor. The distance is clamped to 1 cell so the sensor
    cell itself is the well-defined maximum.
    """
    if beta <= 0.0:
        raise ValueError("beta must be positive")
    if cell == anchor:
        theta = 0.0
    else:
        theta = angle_between((cell[0] - anchor[0], cell[1] - anchor[1]), sigma)
    dist = max(1.0, euclidean(cell, anchor))
    return 1.0 / ((1.0 + alpha * abs(theta) / delta) * (beta * dist))


class SearchArea:
    """Cell -> probability map, backed by parallel arrays for fast updates.

    Probabilities only decrease after construction; zeroed cells are removed
    by prune_and_peak.
    """

    def __init__(self, cells: list[Cell], probs: list[float], anchors: list[Cell],
                 sigma: Vec2, delta: float, mu_a: float, alpha: float, beta: float):
        self._xs = np.array([c[0] for c in cells], dtype=np.int64)
        self._ys = np.array([c[1] for c in cells], dtype=np.int64)
        self._p = np.array(probs, dtype=np.float64)
        self._index = {c: i for i, c in enumerate(cells)}
        anchor_set = set(anchors)
        # Anchor cells carry the alert itself; only a direct observation may
        # resolve them, never an inference from elsewhere.
        self._protected = np.array([c in anchor_set for c in cells], dtype=bool)
        self.anchors = list(anchors)
        self.sigma = sigma
        self.delta = delta
        self.mu_a = mu_a
        self.alpha = alpha
        self.beta = beta

    def __len__(self) -> int:
        return len(self._index)

    def __contains__(self, cell: Cell) -> bool:
        return cell in self._index

    def probability(self, cell: Cell) -> float:
        """Probability for a keyed cell, 0.0 for anything else."""
        i = self._index.get(cell)
        return float(self._p[i]) if i is not None else 0.0

    def cells(self) -> dict[Cell, float]:
        """Snapshot of the keyed cells and their probabilities."""
        return {c: float(self._p[i]) for c, i in self._index.items()}

    def positive_cells(self) -> list[Cell]:
        return [c for c, i in self._index.items() if self._p[i] > 0.0]

    def max_probability(self) -> float:
        return float(self._p.max()) if len(self._p) else 0.0

    def positive_count(self) -> int:
        return int((self._p > 0.0).sum())

    def zero_cell(self, cell: Cell) -> None:
        i = self._index.get(cell)
        if i is not None:
            self._p[i] = 0.0

    def copy(self) -> SearchArea:
        out = SearchArea.__new__(SearchArea)
        out._xs = self._xs.copy()
        out._ys = self._ys.copy()
        out._p = self._p.copy()
        out._index = dict(self._index)
        out._protected = self._protected.copy()
        out.anchors = list(self.anchors)
        out.sigma = self.sigma
        out.delta = self.delta
        out.mu_a = self.mu_a
        out.alpha = self.alpha
        out.beta = self.beta
        return out


def generate_search_area(
    anchors: list[Cell], wind: WindModel, mu_a: float,
    alpha: float, beta: float, grid: Grid,
) -> SearchArea:
    """Build the search area around alerting sensors.

    A non-obstacle cell joins the area when it lies within mu_a of an anchor
    and inside the delta cone around sigma; the anchor cell itself always
    joins. Cells covered by several anchors take the maximum prior.
    """
    if not anchors:
        raise ValueError("at least one anchor is required")
    sigma = wind.search_direction
    best: dict[Cell, float] = {}
    reach = int(math.floor(mu_a))
    for anchor in sorted(anchors, key=lambda c: (c[1], c[0])):
        ax, ay = anchor
        for dy in range(-reach, reach + 1):
            y = ay + dy
            if not (0 <= y < grid.height):
                continue
            for dx in range(-reach, reach + 1):
                x = ax + dx
                if not (0 <= x < grid.width):
                    continue
                cell = (x, y)
                if grid.is_obstacle(cell):
                    continue
                if cell != anchor:
                    if math.hypot(dx, dy) > mu_a:
                        continue
                    if angle_between((dx, dy), sigma) >= wind.delta:
                        continue
                p = prior_probability(cell, anchor, sigma, wind.delta, alpha, beta)
                if p > best.get(cell, 0.0):
                    best[cell] = p
    cells = sorted(best, key=lambda c: (c[1], c[0]))
    return SearchArea(cells, [best[c] for c in cells], list(anchors),
                      sigma, wind.delta, mu_a, alpha, beta)


def update_on_observation(area: SearchArea, obs: Observation, wind: WindModel) -> SearchArea:
    """Zero out the cells ruled out by one observation; mutates the area.

    A clear reading rules out the delta cone upwind of the observation out to
    the smoke reach mu: a fire there would have smoked the observed cell. A
    burning reading rules out the upwind half-plane (the front already passed
    it); smoke or burned rules out the downwind half-plane (the front has not
    arrived there yet). The observed cell itself is always resolved to zero.
    """
    if obs.state == CellState.CLEAR:
        ref, threshold, reach = area.sigma, wind.delta, wind.mu
    elif obs.state == CellState.BURNING:
        ref, threshold, reach = area.sigma, 90.0, None
    else:  # smoke or burned: validation-only evidence
        ref, threshold, reach = wind.direction, 90.0, None

    if len(area) == 0:
        return area
    ox, oy = obs.position
    dx = area._xs - ox
    dy = area._ys - oy
    rx, ry = ref
    dot = dx * rx + dy * ry
    dist = np.hypot(dx, dy)
    # theta < threshold, tested as cos(theta) > cos(threshold); strict both ways.
    kill = dot > math.cos(math.radians(threshold)) * math.hypot(rx, ry) * dist
    if reach is not None:
        kill &= dist <= reach
    kill &= ~area._protected
    kill |= dist == 0.0
    area._p[kill] = 0.0
    return area


def prune_and_peak(area: SearchArea) -> tuple[bool, Cell | None]:
    """Drop zeroed cells; report emptiness and the max-probability cell.

    Ties on the maximum break in row-major order (smallest y, then x).
    """
    keep = area._p > 0.0
    if not keep.all():
        area._xs = area._xs[keep]
        area._ys = area._ys[keep]
        area._p = area._p[keep]
        area._protected = area._protected[keep]
        area._index = {
            (int(x), int(y)): i for i, (x, y) in enumerate(zip(area._xs, area._ys))
        }
    if len(area._p) == 0:
        return True, None
    m = area._p.max()
    at_max = np.nonzero(area._p == m)[0]
    best = min(at_max, key=lambda i: (area._ys[i], area._xs[i]))
    return False, (int(area._xs[best]), int(area._ys[best]))
