"""Sensor stations: separation-constrained deployment, alerts, false positives."""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .grid import Cell, CellState, Grid, euclidean

# Consecutive rejected draws allowed per sensor before deployment is declared
# infeasible.
REJECTION_BUDGET = 10_000

ALERT_STATES = (CellState.SMOKE, CellState.BURNING, CellState.BURNED)


class DeploymentError(RuntimeError):
    """No valid sensor placement found within the rejection budget."""


@dataclass(frozen=True)
class Sensor:
    id: int
    position: Cell
    alerting: bool = False


@dataclass(frozen=True)
class SensorNetwork:
    sensors: tuple[Sensor, ...]
    min_separation: float

    def alerting_sensors(self) -> list[Sensor]:
        return [s for s in self.sensors if s.alerting]

    def alerting_cells(self) -> list[Cell]:
        return [s.position for s in self.sensors if s.alerting]


def deploy_sensors(grid: Grid, count: int, d: float, rng: np.random.Generator) -> SensorNetwork:
    """Place `count` sensors by rejection sampling, pairwise distance > d.

    Sensors never land on obstacle cells. Raises DeploymentError after
    REJECTION_BUDGET consecutive rejections for a single sensor.
    """
    if count < 1:
        raise ValueError("count must be >= 1")
    placed: list[Cell] = []
    for sensor_id in range(count):
        rejections = 0
        while True:
            x = int(rng.integers(0, grid.width))
            y = int(rng.integers(0, grid.height))
            pos = (x, y)
            ok = not grid.is_obstacle(pos) and all(euclidean(pos, p) > d for p in placed)
            if ok:
                placed.append(pos)
                break
            rejections += 1
            if rejections >= REJECTION_BUDGET:
                raise DeploymentError(
                    f"could not place sensor {sensor_id} after {REJECTION_BUDGET} rejections"
                )
    sensors = tuple(Sensor(i, pos) for i, pos in enumerate(placed))
    return SensorNetwork(sensors, d)


def evaluate_alerts(net: SensorNetwork, grid: Grid) -> SensorNetwork:
    """Latch an alert on every sensor whose cell shows smoke, fire, or burn."""
    sensors = tuple(
        replace(s, alerting=True)
        if s.alerting or grid.state_at(s.position) in ALERT_STATES
        else s
        for s in net.sensors
    )
    return SensorNetwork(sensors, net.min_separation)


def inject_false_positive(net: SensorNetwork, rng: np.random.Generator) -> SensorNetwork:
    """Force one uniformly chosen sensor into the alerting state."""
    if not net.sensors:
        raise ValueError("cannot inject a false positive into an empty network")
    idx = int(rng.integers(0, len(net.sensors)))
    sensors = tuple(
        replace(s, alerting=True) if i == idx else s for i, s in enumerate(net.sensors)
    )
    return SensorNetwork(sensors, net.min_separation)
