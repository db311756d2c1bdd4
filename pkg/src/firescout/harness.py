"""Batch engine: scenario generation, perimeter sweep protocol, metrics, IO."""

from __future__ import annotations

import csv
import json
import hashlib
import logging
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, fields, replace

import numpy as np

from .fire import FireClock, ignite, step_fire_spread, step_smoke_spread
from .grid import Cell, CellState, Grid, WindModel
from .planners import (
    Outcome,
    OutcomeKind,
    PlannerKind,
    RunTrace,
    SimHandle,
    run_planner,
)
from .search_area import SearchArea, generate_search_area
from .sensors import (
    DeploymentError,
    SensorNetwork,
    deploy_sensors,
    evaluate_alerts,
    inject_false_positive,
)

log = logging.getLogger(__name__)

WARMUP_SPREAD_CAP = 200
RESAMPLE_CAP = 50
OBSTACLE_REJECTION_CAP = 1000

_MASK64 = (1 << 64) - 1


class ConfigError(ValueError):
    """Malformed scenario configuration."""


class ScenarioError(RuntimeError):
    """Scenario generation could not satisfy its postconditions."""


def splitmix64(x: int) -> int:
    """One splitmix64 step; the documented sub-seed mix function."""
    x = (x + 0x9E3779B97F4A7C15) & _MASK64
    z = x
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return z ^ (z >> 31)


def derive_seed(base: int, *parts: int) -> int:
    """Independent 64-bit stream seed for (base, part...) tuples."""
    h = splitmix64(base & _MASK64)
    for p in parts:
        h = splitmix64(h ^ splitmix64(p & _MASK64))
    return h


@dataclass(frozen=True)
class WindSpec:
    kind: str  # "random" | "fixed"
    dx: float = 0.0
    dy: float = 0.0


@dataclass(frozen=True)
class ObstacleSpec:
    kind: str  # "none" | "random_rect"
    max_side: int = 0


@dataclass(frozen=True)
class ScenarioConfig:
    grid_w: int = 99
    grid_h: int = 99
    sensor_count: int = 50
    d: float = 5.0
    delta: float = 60.0
    mu: float = 7.0
    mu_a: float = 8.0
    alpha: float = 1.0
    beta: float = 1.0
    spread_rate: int = 20
    wind: WindSpec = WindSpec("random")
    obstacle: ObstacleSpec = ObstacleSpec("none")
    fire: str = "true_fire"
    seed: int = 0

    def __post_init__(self):
        if self.grid_w < 1 or self.grid_h < 1:
            raise ConfigError("grid dimensions must be positive")
        if self.sensor_count < 1:
            raise ConfigError("sensor_count must be >= 1")
        if self.d < 0:
            raise ConfigError("d must be >= 0")
        if not (0.0 < self.delta <= 180.0):
            raise ConfigError("delta must be in (0, 180]")
        if self.mu < 0 or self.mu_a < 0:
            raise ConfigError("mu and mu_a must be >= 0")
        if self.beta <= 0:
            raise ConfigError("beta must be > 0")
        if self.spread_rate < 1:
            raise ConfigError("spread_rate must be >= 1")
        if self.wind.kind not in ("random", "fixed"):
            raise ConfigError(f"unknown wind kind {self.wind.kind!r}")
        if self.wind.kind == "fixed" and math.hypot(self.wind.dx, self.wind.dy) == 0.0:
            raise ConfigError("fixed wind requires a nonzero direction")
        if self.obstacle.kind not in ("none", "random_rect"):
            raise ConfigError(f"unknown obstacle kind {self.obstacle.kind!r}")
        if self.obstacle.kind == "random_rect" and self.obstacle.max_side < 1:
            raise ConfigError("random_rect requires max_side >= 1")
        if self.fire not in ("true_fire", "false_positive"):
            raise ConfigError(f"unknown fire kind {self.fire!r}")
        if self.seed < 0:
            raise ConfigError("seed must be a nonnegative integer")


def _parse_wind(value) -> WindSpec:
    if value == "random":
        return WindSpec("random")
    if isinstance(value, (list, tuple)) and len(value) == 2:
        return WindSpec("fixed", float(value[0]), float(value[1]))
    if isinstance(value, dict):
        kind = value.get("kind")
        if kind == "random" and set(value) <= {"kind"}:
            return WindSpec("random")
        if kind == "fixed" and set(value) <= {"kind", "dx", "dy"}:
            return WindSpec("fixed", float(value.get("dx", 0.0)), float(value.get("dy", 0.0)))
    raise ConfigError(f"cannot parse wind spec {value!r}")


def _parse_obstacle(value) -> ObstacleSpec:
    if value == "none":
        return ObstacleSpec("none")
    if isinstance(value, dict):
        kind = value.get("kind")
        if kind == "none" and set(value) <= {"kind"}:
            return ObstacleSpec("none")
        if kind == "random_rect" and set(value) <= {"kind", "max_side"}:
            return ObstacleSpec("random_rect", int(value.get("max_side", 0)))
    raise ConfigError(f"cannot parse obstacle spec {value!r}")


def config_from_dict(data: dict) -> ScenarioConfig:
    """Strict parse: exactly the ScenarioConfig fields, unknown keys rejected."""
    known = {f.name for f in fields(ScenarioConfig)}
    unknown = set(data) - known
    if unknown:
        raise ConfigError(f"unknown config keys: {sorted(unknown)}")
    kwargs = dict(data)
    if "wind" in kwargs:
        kwargs["wind"] = _parse_wind(kwargs["wind"])
    if "obstacle" in kwargs:
        kwargs["obstacle"] = _parse_obstacle(kwargs["obstacle"])
    try:
        return ScenarioConfig(**kwargs)
    except TypeError as e:
        raise ConfigError(str(e)) from e


def load_config(path) -> ScenarioConfig:
    with open(path) as f:
        data = json.load(f)
    if not isinstance(data, dict):
        raise ConfigError("config file must hold a JSON object")
    return config_from_dict(data)


@dataclass
class World:
    """A generated scenario: warmed-up grid, wind, sensors, run clock."""

    cfg: ScenarioConfig
    grid: Grid
    wind: WindModel
    sensors: SensorNetwork
    ignition: Cell | None
    _area_template: SearchArea | None = field(default=None, repr=False)

    def alerting_cells(self) -> list[Cell]:
        return sorted(self.sensors.alerting_cells(), key=lambda c: (c[1], c[0]))

    def search_area_template(self) -> SearchArea:
        if self._area_template is None:
            self._area_template = generate_search_area(
                self.alerting_cells(), self.wind, self.cfg.mu_a,
                self.cfg.alpha, self.cfg.beta, self.grid,
            )
        return self._area_template

    def fresh_handle(self) -> SimHandle:
        return SimHandle(
            grid=self.grid.copy(),
            wind=self.wind,
            clock=FireClock(0, self.cfg.spread_rate),
            alerting_cells=self.alerting_cells(),
            area_template=self.search_area_template(),
        )

    def fingerprint(self) -> str:
        """Stable digest of everything a planner can be influenced by."""
        h = hashlib.sha256()
        h.update(f"{self.grid.width}x{self.grid.height};".encode())
        h.update(self.grid.states.tobytes())
        h.update(self.grid.obstacles.tobytes())
        for s in self.sensors.sensors:
            h.update(f"s{s.id}:{s.position[0]},{s.position[1]},{int(s.alerting)};".encode())
        h.update(f"w{self.wind.direction[0]!r},{self.wind.direction[1]!r},"
                 f"{self.wind.delta!r},{self.wind.mu!r};".encode())
        h.update(f"r{self.cfg.spread_rate}".encode())
        return h.hexdigest()


def _draw_obstacles(cfg: ScenarioConfig, rng: np.random.Generator,
                    forbidden: set[Cell]) -> np.ndarray:
    w, h = cfg.grid_w, cfg.grid_h
    mask = np.zeros((h, w), dtype=bool)
    if cfg.obstacle.kind == "none":
        return mask
    for _ in range(OBSTACLE_REJECTION_CAP):
        rw = int(rng.integers(1, cfg.obstacle.max_side + 1))
        rh = int(rng.integers(1, cfg.obstacle.max_side + 1))
        # Interior placement only, so perimeter starts are always flyable.
        if rw > w - 2 or rh > h - 2:
            continue
        x0 = int(rng.integers(1, w - rw))
        y0 = int(rng.integers(1, h - rh))
        covered = any(x0 <= x < x0 + rw and y0 <= y < y0 + rh for x, y in forbidden)
        if covered:
            continue
        mask[y0:y0 + rh, x0:x0 + rw] = True
        return mask
    raise ScenarioError("could not place an obstacle clear of sensors and ignition")


def generate_scenario(cfg: ScenarioConfig) -> World:
    """Deploy sensors and produce a world ready for UAV deployment.

    True-fire scenarios ignite a random cell and run fire/smoke spread steps
    until a sensor alerts; stubborn ignitions are resampled. False-positive
    scenarios stay clear and get one injected alert. Fully deterministic in
    cfg.seed.
    """
    rng = np.random.default_rng(cfg.seed)
    if cfg.wind.kind == "random":
        theta = float(rng.uniform(0.0, 2.0 * math.pi))
        direction = (math.cos(theta), math.sin(theta))
    else:
        direction = (cfg.wind.dx, cfg.wind.dy)
    wind = WindModel(direction, cfg.delta, cfg.mu)

    flat = Grid.empty(cfg.grid_w, cfg.grid_h)
    net = deploy_sensors(flat, cfg.sensor_count, cfg.d, rng)
    sensor_cells = {s.position for s in net.sensors}

    if cfg.fire == "false_positive":
        obstacles = _draw_obstacles(cfg, rng, sensor_cells)
        grid = Grid.empty(cfg.grid_w, cfg.grid_h, obstacles)
        net = inject_false_positive(net, rng)
        return World(cfg, grid, wind, net, ignition=None)

    for _ in range(RESAMPLE_CAP):
        ignition = (int(rng.integers(0, cfg.grid_w)), int(rng.integers(0, cfg.grid_h)))
        obstacles = _draw_obstacles(cfg, rng, sensor_cells | {ignition})
        grid = ignite(Grid.empty(cfg.grid_w, cfg.grid_h, obstacles), ignition)
        alerted = evaluate_alerts(net, grid)
        for _ in range(WARMUP_SPREAD_CAP):
            if alerted.alerting_cells():
                break
            grid = step_smoke_spread(step_fire_spread(grid, wind), wind)
            alerted = evaluate_alerts(alerted, grid)
        if alerted.alerting_cells():
            return World(cfg, grid, wind, alerted, ignition=ignition)
    raise ScenarioError(f"no sensor alerted within {WARMUP_SPREAD_CAP} spread steps "
                        f"for {RESAMPLE_CAP} ignition samples (seed {cfg.seed})")


def perimeter_starts(grid: Grid) -> list[Cell]:
    """Border cells except the four corners, cycling clockwise from (1, 0)."""
    return _perimeter_cells(grid.width, grid.height)


def _perimeter_cells(w: int, h: int) -> list[Cell]:
    if w < 3 or h < 3:
        raise ValueError("perimeter starts require a grid of at least 3x3")
    starts: list[Cell] = []
    starts += [(x, 0) for x in range(1, w - 1)]
    starts += [(w - 1, y) for y in range(1, h - 1)]
    starts += [(x, h - 1) for x in range(w - 2, 0, -1)]
    starts += [(0, y) for y in range(h - 2, 0, -1)]
    return starts


def sample_starts(starts: list[Cell], k: int) -> list[Cell]:
    """k starts spread evenly along the perimeter cycle."""
    if not (1 <= k <= len(starts)):
        raise ValueError(f"cannot sample {k} starts from {len(starts)}")
    return [starts[(i * len(starts)) // k] for i in range(k)]


@dataclass
class RunMetrics:
    planner: str
    fire: int
    start: Cell
    outcome: str
    ttv_total: int | None = None
    ttl_total: int | None = None
    ttv_sa: int | None = None
    ttl_sa: int | None = None
    nontrivial_v: bool | None = None
    nontrivial_l: bool | None = None
    compute_ms: float | None = None

    def csv_row(self) -> list[str]:
        def num(v):
            return "" if v is None else str(v)

        def boolean(v):
            return "" if v is None else ("true" if v else "false")

        return [
            self.planner, str(self.fire), str(self.start[0]), str(self.start[1]),
            self.outcome, num(self.ttv_total), num(self.ttl_total),
            num(self.ttv_sa), num(self.ttl_sa),
            boolean(self.nontrivial_v), boolean(self.nontrivial_l),
            "" if self.compute_ms is None else f"{self.compute_ms:.3f}",
        ]


CSV_COLUMNS = ["planner", "fire", "start_x", "start_y", "outcome",
               "ttv_total", "ttl_total", "ttv_sa", "ttl_sa",
               "nontrivial_v", "nontrivial_l", "compute_ms"]


def metrics_from_run(planner: PlannerKind, fire: int, start: Cell,
                     outcome: Outcome, trace: RunTrace) -> RunMetrics:
    """Reduce one run to its benchmark row.

    For a false positive the resolution time counts as the validation time
    (the alert was settled), mirroring how TtV pools true and false alarms.
    """
    if outcome.kind == OutcomeKind.FALSE_POSITIVE:
        ttv = trace.t_end
    else:
        ttv = outcome.t_validate
    ttl = outcome.t_localize
    p1 = trace.phase1_end_t
    ttv_sa = ttv - p1 if (ttv is not None and p1 is not None
                          and not outcome.validated_in_transit) else None
    ttl_sa = ttl - p1 if (ttl is not None and p1 is not None
                          and not outcome.localized_in_transit) else None
    return RunMetrics(
        planner=planner.value, fire=fire, start=start, outcome=outcome.kind.value,
        ttv_total=ttv, ttl_total=ttl, ttv_sa=ttv_sa, ttl_sa=ttl_sa,
        nontrivial_v=not outcome.validated_in_transit,
        nontrivial_l=not outcome.localized_in_transit,
        compute_ms=trace.compute_ms,
    )


def _resolve_starts(cfg: ScenarioConfig, starts_spec) -> list[Cell]:
    perimeter = _perimeter_cells(cfg.grid_w, cfg.grid_h)
    if starts_spec == "all":
        return perimeter
    return sample_starts(perimeter, int(starts_spec))


def _run_fire_block(cfg: ScenarioConfig, fire_idx: int, planners: list[PlannerKind],
                    starts_spec, traces_dir=None) -> list[RunMetrics]:
    starts = _resolve_starts(cfg, starts_spec)
    seed = derive_seed(cfg.seed, fire_idx)
    try:
        world = generate_scenario(replace(cfg, seed=seed))
    except (ScenarioError, DeploymentError) as e:
        log.warning("fire %d: scenario generation failed: %s", fire_idx, e)
        return [RunMetrics(pk.value, fire_idx, start, "failed")
                for start in starts for pk in planners]

    rows = []
    for start in starts:
        for pk in planners:
            try:
                outcome, trace = run_planner(world.fresh_handle(), start, pk)
            except Exception as e:
                log.warning("fire %d start %s %s: run failed: %s",
                            fire_idx, start, pk.value, e)
                rows.append(RunMetrics(pk.value, fire_idx, start, "failed"))
                continue
            rows.append(metrics_from_run(pk, fire_idx, start, outcome, trace))
            if traces_dir is not None:
                name = f"fire{fire_idx:03d}_x{start[0]:03d}_y{start[1]:03d}_{pk.value}.jsonl"
                write_trace(trace, f"{traces_dir}/{name}")
    return rows


def run_batch(cfg_template: ScenarioConfig, fires: int, planners: list[PlannerKind],
              starts="all", traces_dir=None, workers: int = 1) -> list[RunMetrics]:
    """Cartesian sweep fires x starts x planners.

    Every planner sees the bit-identical world for a given fire; each fire
    owns an independent sub-seed, so adding or dropping fires never perturbs
    the others. Rows come back sorted by (fire, start order, planner order).
    """
    if fires < 1:
        raise ValueError("fires must be >= 1")
    if traces_dir is not None:
        os.makedirs(traces_dir, exist_ok=True)
    fire_indices = list(range(fires))
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            blocks = list(pool.map(
                _run_fire_block,
                [cfg_template] * fires, fire_indices,
                [planners] * fires, [starts] * fires, [traces_dir] * fires,
            ))
    else:
        blocks = [_run_fire_block(cfg_template, i, planners, starts, traces_dir)
                  for i in fire_indices]
    return [row for block in blocks for row in block]


def write_metrics_csv(rows: list[RunMetrics], path) -> None:
    with open(path, "w", newline="") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(CSV_COLUMNS)
        for row in rows:
            writer.writerow(row.csv_row())


def write_trace(trace: RunTrace, path) -> None:
    with open(path, "w") as f:
        for r in trace.records:
            f.write(json.dumps({
                "t": r.t, "x": r.x, "y": r.y, "obs": r.obs,
                "area_n": r.area_n, "area_max_p": r.area_max_p, "event": r.event,
            }) + "\n")


STATE_CHARS = {
    CellState.CLEAR: "c",
    CellState.BURNING: "f",
    CellState.BURNED: "b",
    CellState.SMOKE: "s",
}


def write_world_snapshot(path, grid: Grid, sensors: SensorNetwork, wind: WindModel,
                         area_cells: dict[Cell, float], start: Cell,
                         planner: str, outcome: str) -> None:
    """Companion JSON for trace plotting: final grid, sensors, area, metadata."""
    rows = ["".join(STATE_CHARS[CellState(grid.states[y, x])] for x in range(grid.width))
            for y in range(grid.height)]
    obstacle_rows = ["".join("#" if grid.obstacles[y, x] else "."
                             for x in range(grid.width)) for y in range(grid.height)]
    snapshot = {
        "width": grid.width,
        "height": grid.height,
        "legend": {"c": "clear", "f": "burning", "b": "burned", "s": "smoke"},
        "rows": rows,
        "obstacles": obstacle_rows,
        "sensors": [{"id": s.id, "x": s.position[0], "y": s.position[1],
                     "alerting": s.alerting} for s in sensors.sensors],
        "wind": {"dx": wind.direction[0], "dy": wind.direction[1],
                 "delta": wind.delta, "mu": wind.mu},
        "area": [{"x": c[0], "y": c[1], "p": p}
                 for c, p in sorted(area_cells.items(), key=lambda kv: (kv[0][1], kv[0][0]))],
        "start": {"x": start[0], "y": start[1]},
        "planner": planner,
        "outcome": outcome,
    }
    with open(path, "w") as f:
        json.dump(snapshot, f, indent=1)
        f.write("\n")


@dataclass
class PlannerSummary:
    planner: str
    runs: int
    ttl_total: float | None
    ttl_nontrivial: float | None
    ttl_search_area: float | None
    ttv_total: float | None
    ttv_nontrivial: float | None
    ttv_search_area: float | None
    compute_ms: float | None


def _mean(values: list) -> float | None:
    return (sum(values) / len(values)) if values else None


def aggregate(rows: list[RunMetrics]) -> dict[str, PlannerSummary]:
    """Per-planner means over the applicable subsets, as in the result tables.

    Non-trivial means cover runs not resolved during the initial transit;
    search-area means cover only the post-transit portion. Empty subsets
    yield None (rendered as N/A).
    """
    by_planner: dict[str, list[RunMetrics]] = {}
    for row in rows:
        if row.outcome == "failed":
            continue
        by_planner.setdefault(row.planner, []).append(row)

    out = {}
    for planner, rs in by_planner.items():
        out[planner] = PlannerSummary(
            planner=planner,
            runs=len(rs),
            ttl_total=_mean([r.ttl_total for r in rs if r.ttl_total is not None]),
            ttl_nontrivial=_mean([r.ttl_total for r in rs
                                  if r.ttl_total is not None and r.nontrivial_l]),
            ttl_search_area=_mean([r.ttl_sa for r in rs if r.ttl_sa is not None]),
            ttv_total=_mean([r.ttv_total for r in rs if r.ttv_total is not None]),
            ttv_nontrivial=_mean([r.ttv_total for r in rs
                                  if r.ttv_total is not None and r.nontrivial_v]),
            ttv_search_area=_mean([r.ttv_sa for r in rs if r.ttv_sa is not None]),
            compute_ms=_mean([r.compute_ms for r in rs if r.compute_ms is not None]),
        )
    return out
