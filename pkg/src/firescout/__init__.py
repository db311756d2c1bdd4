"""Grid-world wildfire simulator, UAV search planners, and benchmark harness."""

from .grid import Cell, CellState, Grid, Vec2, WindModel, angle_between, euclidean, neighbors8
from .fire import FireClock, advance, ignite, step_fire_spread, step_smoke_spread
from .sensors import (
    DeploymentError,
    Sensor,
    SensorNetwork,
    deploy_sensors,
    evaluate_alerts,
    inject_false_positive,
)
from .search_area import (
    Observation,
    SearchArea,
    generate_search_area,
    prior_probability,
    prune_and_peak,
    update_on_observation,
)
from .planners import (
    Outcome,
    OutcomeKind,
    PlannerKind,
    RunTrace,
    SimHandle,
    astar,
    closest_point,
    observe_and_classify,
    run_fire_gipp,
    run_planner,
    run_tsp_cp,
    run_tsp_sensor,
    tsp_tour,
)
from .harness import (
    ConfigError,
    RunMetrics,
    ScenarioConfig,
    ScenarioError,
    World,
    aggregate,
    generate_scenario,
    perimeter_starts,
    run_batch,
)

__version__ = "0.1.0"
