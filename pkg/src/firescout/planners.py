"""UAV decision logic: A* transit, greedy informative search, TSP baselines.

All planners share the same world contract: each timestamp the world advances
(the fire may spread), the UAV moves one cell, then observes the cell it
landed on. Observations made at the post-spread state drive termination and,
for the informative planner, the Bayes updates.
"""

from __future__ import annotations

import heapq
import itertools
import time
from dataclasses import dataclass
from enum import Enum

from .fire import FireClock, advance
from .grid import (
    Cell,
    CellState,
    Grid,
    NEIGHBOR_OFFSETS,
    WindModel,
    euclidean,
    row_major_key,
)
from .search_area import (
    Observation,
    SearchArea,
    prune_and_peak,
    update_on_observation,
)


class PlannerKind(str, Enum):
    FIRE_GIPP = "fire-gipp"
    TSP_CP = "tsp-cp"
    TSP_SENSOR = "tsp-sensor"


class OutcomeKind(str, Enum):
    LOCALIZED = "localized"
    VALIDATED_ONLY = "validated_only"
    FALSE_POSITIVE = "false_positive"
    EXHAUSTED = "exhausted"


class Phase(Enum):
    INITIAL_TRANSIT = 1
    SEARCHING = 2
    DONE = 3


class Event(Enum):
    LOCALIZED_NOW = "localized"
    VALIDATED_NOW = "validated"
    FALSE_POSITIVE_NOW = "false_positive"
    NOTHING = "nothing"

TERMINAL_EVENTS = (Event.LOCALIZED_NOW, Event.FALSE_POSITIVE_NOW)


class StepCapError(RuntimeError):
    """A run exceeded the hard timestep cap; treated as a failure."""


@dataclass
class UavState:
    position: Cell
    t: int = 0
    phase: Phase = Phase.INITIAL_TRANSIT


@dataclass(frozen=True)
class Outcome:
    kind: OutcomeKind
    t_validate: int | None = None
    t_localize: int | None = None
    validated_in_transit: bool = False
    localized_in_transit: bool = False


@dataclass(frozen=True)
class TraceRecord:
    t: int
    x: int
    y: int
    obs: str
    area_n: int
    area_max_p: float
    event: str


@dataclass
class RunTrace:
    records: list[TraceRecord]
    phase1_end_t: int | None
    compute_ms: float
    final_area: dict[Cell, float] | None = None

    @property
    def t_end(self) -> int:
        return self.records[-1].t if self.records else 0


class SimHandle:
    """One run's private view of the world.

    Owns an evolving grid copy and the fire clock; the alerting set and the
    search-area template are frozen at deployment time.
    """

    def __init__(self, grid: Grid, wind: WindModel, clock: FireClock,
                 alerting_cells: list[Cell], area_template: SearchArea):
        self.grid = grid
        self.wind = wind
        self.clock = clock
        self.alerting_cells = list(alerting_cells)
        self._area_template = area_template

    @property
    def t(self) -> int:
        return self.clock.t

    def make_search_area(self) -> SearchArea:
        return self._area_template.copy()

    def advance(self) -> bool:
        """Tick one timestamp; returns True when the fire spread this tick."""
        self.grid, self.clock = advance(self.grid, self.wind, self.clock)
        return self.clock.t % self.clock.spread_rate == 0

    def observe(self, cell: Cell) -> CellState:
        return self.grid.state_at(cell)


def astar(grid: Grid, start: Cell, goal: Cell) -> list[Cell] | None:
    """Shortest 8-connected path, unit step cost, Chebyshev heuristic.

    Returns the path including both endpoints, or None when the goal is
    unreachable. Ties are broken deterministically: preferring nodes closer
    to the goal, then by insertion order.
    """
    for name, c in (("start", start), ("goal", goal)):
        if not grid.in_bounds(c):
            raise ValueError(f"astar {name} {c} out of bounds")
        if grid.is_obstacle(c):
            raise ValueError(f"astar {name} {c} is an obstacle")
    if start == goal:
        return [start]

    gx, gy = goal
    width, height = grid.width, grid.height
    obstacles = grid.obstacles
    counter = itertools.count()

    h0 = max(abs(start[0] - gx), abs(start[1] - gy))
    open_heap = [(h0, h0, next(counter), start)]
    g_score = {start: 0}
    came: dict[Cell, Cell] = {}
    closed: set[Cell] = set()

    while open_heap:
        _, _, _, cur = heapq.heappop(open_heap)
        if cur == goal:
            path = [cur]
            while cur in came:
                cur = came[cur]
                path.append(cur)
            path.reverse()
            return path
        if cur in closed:
            continue
        closed.add(cur)
        ng = g_score[cur] + 1
        cx, cy = cur
        for dx, dy in NEIGHBOR_OFFSETS:
            nx, ny = cx + dx, cy + dy
            if not (0 <= nx < width and 0 <= ny < height) or obstacles[ny, nx]:
                continue
            n = (nx, ny)
            if ng < g_score.get(n, 1 << 30):
                g_score[n] = ng
                came[n] = cur
                h = max(abs(nx - gx), abs(ny - gy))
                heapq.heappush(open_heap, (ng + h, h, next(counter), n))
    return None


def closest_point(area: SearchArea, from_cell: Cell, grid: Grid | None = None) -> Cell:
    """Keyed area cell nearest to `from_cell`; ties break row-major."""
    if len(area) == 0:
        raise ValueError("closest_point on an empty search area")
    best = None
    best_key = None
    for cell in area.cells():
        key = (euclidean(cell, from_cell), cell[1], cell[0])
        if best_key is None or key < best_key:
            best, best_key = cell, key
    return best


def tour_cost(start: Cell, order: list[Cell]) -> float:
    cost = 0.0
    cur = start
    for c in order:
        cost += euclidean(cur, c)
        cur = c
    return cost


def tsp_tour(nodes: list[Cell], start: Cell) -> list[Cell]:
    """Open tour from `start` over all nodes: nearest-neighbor plus 2-opt.

    Returns the visit order (start excluded). 2-opt sweeps apply improving
    segment reversals until a local optimum, so the result never costs more
    than the nearest-neighbor tour.
    """
    pend = [c for c in sorted(set(nodes), key=row_major_key) if c != start]
    if len(pend) <= 1:
        return pend

    # Nearest-neighbor chain from the start; pend is row-major sorted, so
    # taking the first minimum preserves the tie rule.
    seq = [start]
    remaining = list(pend)
    cur = start
    while remaining:
        best = min(remaining, key=lambda c: euclidean(cur, c))
        remaining.remove(best)
        seq.append(best)
        cur = best

    # First-improvement 2-opt on the open path; seq[0] stays fixed.
    # Reversing seq[i..j] swaps the edge into i and, when j is interior,
    # the edge out of j.
    n = len(pend)
    for _ in range(200):
        improved = False
        for i in range(1, n):
            prev = seq[i - 1]
            for j in range(i, n + 1):
                gain = euclidean(prev, seq[j]) - euclidean(prev, seq[i])
                if j < n:
                    gain += euclidean(seq[i], seq[j + 1]) - euclidean(seq[j], seq[j + 1])
                if gain < -1e-9:
                    seq[i:j + 1] = reversed(seq[i:j + 1])
                    improved = True
        if not improved:
            break
    return seq[1:]


def observe_and_classify(obs: Observation, alerting_cells: set[Cell],
                         observed_clear_sensors: set[Cell]) -> Event:
    """Map one observation to a run event.

    Burning localizes; smoke or burned validates; a clear reading at an
    alerting sensor is recorded into `observed_clear_sensors` (mutated), and
    once every alerting sensor has read clear the alert set is a false
    positive.
    """
    if obs.state == CellState.BURNING:
        return Event.LOCALIZED_NOW
    if obs.state in (CellState.SMOKE, CellState.BURNED):
        return Event.VALIDATED_NOW
    if obs.position in alerting_cells:
        observed_clear_sensors.add(obs.position)
        if observed_clear_sensors >= alerting_cells:
            return Event.FALSE_POSITIVE_NOW
    return Event.NOTHING


class _Run:
    """Mutable bookkeeping shared by the planner executors."""

    def __init__(self, handle: SimHandle, start: Cell):
        if not handle.grid.in_bounds(start) or handle.grid.is_obstacle(start):
            raise ValueError(f"invalid UAV start cell {start}")
        if not handle.alerting_cells:
            raise ValueError("run requires at least one alerting sensor")
        self.handle = handle
        self.uav = UavState(position=start, t=handle.t, phase=Phase.INITIAL_TRANSIT)
        self.alerting = set(handle.alerting_cells)
        self.observed_clear: set[Cell] = set()
        self.records: list[TraceRecord] = []
        self.compute_s = 0.0
        self.t_validate: int | None = None
        self.t_localize: int | None = None
        self.validated_in_transit = False
        self.localized_in_transit = False
        self.phase1_end_t: int | None = None
        self.pending_events: list[str] = []
        self.area_ref: SearchArea | None = None
        self.step_cap = handle.grid.width * handle.grid.height * handle.clock.spread_rate * 4

    def advance_and_move(self, cell: Cell) -> None:
        spread = self.handle.advance()
        if self.handle.t > self.step_cap:
            raise StepCapError(f"run exceeded {self.step_cap} timestamps")
        assert max(abs(cell[0] - self.uav.position[0]), abs(cell[1] - self.uav.position[1])) <= 1
        assert not self.handle.grid.is_obstacle(cell)
        self.uav.position = cell
        self.uav.t = self.handle.t
        if spread:
            self.pending_events.append("spread")

    def observe_here(self, area: SearchArea | None,
                     frozen_area_info: tuple[int, float] | None = None) -> Event:
        """Observe the current cell, classify, update belief, log the record."""
        cell = self.uav.position
        obs = Observation(cell, self.handle.observe(cell))
        event = observe_and_classify(obs, self.alerting, self.observed_clear)

        in_transit = self.uav.phase == Phase.INITIAL_TRANSIT
        t = self.uav.t
        if event == Event.LOCALIZED_NOW:
            self.t_localize = t
            self.localized_in_transit = in_transit
            if self.t_validate is None:
                self.t_validate = t
                self.validated_in_transit = in_transit
            self.pending_events.append("localized")
        elif event == Event.VALIDATED_NOW:
            if self.t_validate is None:
                self.t_validate = t
                self.validated_in_transit = in_transit
            self.pending_events.append("validated")
        elif event == Event.FALSE_POSITIVE_NOW:
            # Resolving the alert as spurious settles the validation question.
            self.validated_in_transit = in_transit
            self.pending_events.append("false_positive")

        if area is not None and event not in TERMINAL_EVENTS:
            t0 = time.perf_counter()
            update_on_observation(area, obs, self.handle.wind)
            self.compute_s += time.perf_counter() - t0

        if area is not None:
            area_n, area_max_p = area.positive_count(), area.max_probability()
        else:
            area_n, area_max_p = frozen_area_info or (0, 0.0)
        self.records.append(TraceRecord(
            t=t, x=cell[0], y=cell[1], obs=obs.state.name.lower(),
            area_n=area_n, area_max_p=area_max_p,
            event="+".join(self.pending_events),
        ))
        self.pending_events = []
        return event

    def finish(self, kind: OutcomeKind) -> tuple[Outcome, RunTrace]:
        self.uav.phase = Phase.DONE
        outcome = Outcome(
            kind=kind,
            t_validate=self.t_validate,
            t_localize=self.t_localize,
            validated_in_transit=self.validated_in_transit,
            localized_in_transit=self.localized_in_transit,
        )
        area_cells = self.area_ref.cells() if self.area_ref is not None else {}
        return outcome, RunTrace(self.records, self.phase1_end_t,
                                 self.compute_s * 1000.0, area_cells)

    def finish_exhausted(self) -> tuple[Outcome, RunTrace]:
        if self.records:
            last = self.records[-1]
            suffix = "exhausted" if not last.event else last.event + "+exhausted"
            self.records[-1] = TraceRecord(last.t, last.x, last.y, last.obs,
                                           last.area_n, last.area_max_p, suffix)
        kind = OutcomeKind.VALIDATED_ONLY if self.t_validate is not None else OutcomeKind.EXHAUSTED
        return self.finish(kind)


def _best_positive_neighbor(area: SearchArea, pos: Cell) -> Cell | None:
    """Highest-probability keyed neighbor of pos; row-major on exact ties."""
    best = None
    best_key = None
    for dx, dy in NEIGHBOR_OFFSETS:
        c = (pos[0] + dx, pos[1] + dy)
        p = area.probability(c)
        if p > 0.0:
            key = (-p, c[1], c[0])
            if best_key is None or key < best_key:
                best, best_key = c, key
    return best


def _walk_transit(run: _Run, path: list[Cell], area: SearchArea | None,
                  frozen_info: tuple[int, float] | None) -> Event:
    """Observe the start cell at t=0, then fly the path one cell per tick."""
    event = run.observe_here(area, frozen_info)
    if event in TERMINAL_EVENTS:
        return event
    for node in path[1:]:
        run.advance_and_move(node)
        event = run.observe_here(area, frozen_info)
        if event in TERMINAL_EVENTS:
            return event
    run.phase1_end_t = run.uav.t
    run.uav.phase = Phase.SEARCHING
    return event


def run_fire_gipp(handle: SimHandle, start: Cell) -> tuple[Outcome, RunTrace]:
    """Greedy informative planner: transit to the area, then follow belief.

    Phase 2 moves to the highest-probability neighbor each tick; when every
    neighbor is dead it falls back to an A* hop toward the nearest surviving
    area cell, resuming greedy motion as soon as one is adjacent. Terminates
    on localization, false positive, or an exhausted search area.
    """
    run = _Run(handle, start)
    area = handle.make_search_area()
    run.area_ref = area

    # Initial transit target, retrying past unreachable cells.
    path = None
    while path is None:
        t0 = time.perf_counter()
        empty, _ = prune_and_peak(area)
        if empty:
            run.compute_s += time.perf_counter() - t0
            run.observe_here(area)
            return run.finish_exhausted()
        target = closest_point(area, start, handle.grid)
        path = astar(handle.grid, start, target)
        run.compute_s += time.perf_counter() - t0
        if path is None:
            area.zero_cell(target)

    event = _walk_transit(run, path, area, None)
    if event in TERMINAL_EVENTS:
        return run.finish(OutcomeKind.LOCALIZED if event == Event.LOCALIZED_NOW
                          else OutcomeKind.FALSE_POSITIVE)

    while True:
        t0 = time.perf_counter()
        exhausted = area.positive_count() == 0
        run.compute_s += time.perf_counter() - t0
        if exhausted:
            return run.finish_exhausted()

        t0 = time.perf_counter()
        nxt = _best_positive_neighbor(area, run.uav.position)
        run.compute_s += time.perf_counter() - t0

        if nxt is None:
            # Stranded: every neighbor is dead but live cells remain.
            t0 = time.perf_counter()
            prune_and_peak(area)
            target = closest_point(area, run.uav.position, handle.grid)
            hop = astar(handle.grid, run.uav.position, target)
            run.compute_s += time.perf_counter() - t0
            if hop is None:
                area.zero_cell(target)
                continue
            for node in hop[1:]:
                run.advance_and_move(node)
                event = run.observe_here(area)
                if event in TERMINAL_EVENTS:
                    return run.finish(OutcomeKind.LOCALIZED if event == Event.LOCALIZED_NOW
                                      else OutcomeKind.FALSE_POSITIVE)
                t0 = time.perf_counter()
                resume = _best_positive_neighbor(area, run.uav.position) is not None
                run.compute_s += time.perf_counter() - t0
                if resume:
                    break
            continue

        run.advance_and_move(nxt)
        event = run.observe_here(area)
        if event in TERMINAL_EVENTS:
            return run.finish(OutcomeKind.LOCALIZED if event == Event.LOCALIZED_NOW
                              else OutcomeKind.FALSE_POSITIVE)


def _run_tsp(handle: SimHandle, start: Cell, to_sensor: bool) -> tuple[Outcome, RunTrace]:
    run = _Run(handle, start)
    area = handle.make_search_area()
    run.area_ref = area
    nodes = list(area.cells().keys())
    frozen_info = (len(area), area.max_probability())

    if to_sensor:
        phase1_target = min(handle.alerting_cells,
                            key=lambda c: (euclidean(c, start), c[1], c[0]))
        t0 = time.perf_counter()
        path = astar(handle.grid, start, phase1_target)
        run.compute_s += time.perf_counter() - t0
    else:
        t0 = time.perf_counter()
        phase1_target = closest_point(area, start, handle.grid)
        path = astar(handle.grid, start, phase1_target)
        run.compute_s += time.perf_counter() - t0
    if path is None:
        raise RuntimeError(f"transit target {phase1_target} unreachable from {start}")

    # Fly everything up to the arrival cell, observing as usual.
    if len(path) > 1:
        event = run.observe_here(None, frozen_info)
        if event in TERMINAL_EVENTS:
            return run.finish(OutcomeKind.LOCALIZED if event == Event.LOCALIZED_NOW
                              else OutcomeKind.FALSE_POSITIVE)
        for node in path[1:-1]:
            run.advance_and_move(node)
            event = run.observe_here(None, frozen_info)
            if event in TERMINAL_EVENTS:
                return run.finish(OutcomeKind.LOCALIZED if event == Event.LOCALIZED_NOW
                                  else OutcomeKind.FALSE_POSITIVE)
        run.advance_and_move(path[-1])

    # Reaching the search area triggers tour construction; the arrival
    # observation is classified afterwards, like any other tour stop.
    t0 = time.perf_counter()
    tour = tsp_tour(nodes, path[-1])
    run.compute_s += time.perf_counter() - t0

    event = run.observe_here(None, frozen_info)
    if event in TERMINAL_EVENTS:
        return run.finish(OutcomeKind.LOCALIZED if event == Event.LOCALIZED_NOW
                          else OutcomeKind.FALSE_POSITIVE)
    run.phase1_end_t = run.uav.t
    run.uav.phase = Phase.SEARCHING

    for node in tour:
        if node == run.uav.position:
            continue
        pos = run.uav.position
        if max(abs(node[0] - pos[0]), abs(node[1] - pos[1])) <= 1:
            seg = [pos, node]
        else:
            t0 = time.perf_counter()
            seg = astar(handle.grid, pos, node)
            run.compute_s += time.perf_counter() - t0
            if seg is None:
                continue
        for cell in seg[1:]:
            run.advance_and_move(cell)
            event = run.observe_here(None, frozen_info)
            if event in TERMINAL_EVENTS:
                return run.finish(OutcomeKind.LOCALIZED if event == Event.LOCALIZED_NOW
                                  else OutcomeKind.FALSE_POSITIVE)
    return run.finish_exhausted()


def run_tsp_cp(handle: SimHandle, start: Cell) -> tuple[Outcome, RunTrace]:
    """Coverage baseline: transit to the closest area cell, then tour it all."""
    return _run_tsp(handle, start, to_sensor=False)


def run_tsp_sensor(handle: SimHandle, start: Cell) -> tuple[Outcome, RunTrace]:
    """Coverage baseline: transit to the closest alerting sensor, then tour."""
    return _run_tsp(handle, start, to_sensor=True)


def run_planner(handle: SimHandle, start: Cell, kind: PlannerKind) -> tuple[Outcome, RunTrace]:
    if kind == PlannerKind.FIRE_GIPP:
        return run_fire_gipp(handle, start)
    if kind == PlannerKind.TSP_CP:
        return run_tsp_cp(handle, start)
    if kind == PlannerKind.TSP_SENSOR:
        return run_tsp_sensor(handle, start)
    raise ValueError(f"unknown planner {kind}")
