"""Exact solver for the share-a-ride problem with ride-hailing and logistic vehicles."""

from sarprl.network import Location, Network, grid_network, load_network
from sarprl.demand import (
    CostParams,
    Request,
    ScenarioSpec,
    ServiceParams,
    generate_scenario,
    load_requests,
)
from sarprl.route_opt import Route, RouteResult, Stop, optimal_route, route_profit
from sarprl.trip_enum import Trip, TripCatalog, enumerate_all, next_level, partition
from sarprl.assignment import (
    AssignmentSolution,
    SelectionProgram,
    max_lv_utility,
    max_rv_profit,
    min_lv_fleet,
    solve_selection,
)
from sarprl.pareto import (
    ParetoPoint,
    benchmark_lv_only,
    benchmark_rv_only,
    benchmark_sarp,
    pareto_frontier,
)

__version__ = "0.1.0"
