"""Epsilon-constraint frontier between LV fleet size and total RV profit.

Starting from the minimum LV fleet, each step fills the LVs with the most
profitable parcel trips, hands the remaining parcels to the RVs as
mandatory work, and maximizes RV profit. The fleet cap then drops by one
until the RVs can no longer absorb the residual parcels. Logistic cost is
represented by LV fleet size alone, and every vehicle serves at most one
trip over the horizon.
"""

from __future__ import annotations

import logging
from dataclasses import asdict, dataclass, field

from sarprl.assignment import (
    AT_MOST,
    PROFIT_MAX,
    AssignmentSolution,
    SelectionProgram,
    max_lv_utility,
    max_rv_profit,
    min_lv_fleet,
    rv_candidates,
    solve_selection,
)
from sarprl.trip_enum import TripCatalog, partition

log = logging.getLogger(__name__)


class BenchmarkInfeasible(ValueError):
    pass


@dataclass
class MetricBlock:
    passenger_acceptance_rate: float
    avg_profit_per_rv: float
    rv_profit_increase_vs_rv_only: float | None = None
    lv_fleet_saving_vs_lv_only: int | None = None
    rv_profit_increase_vs_sarp: float | None = None
    lv_fleet_saving_vs_sarp: int | None = None


@dataclass
class ParetoPoint:
    epsilon: int
    phi_rv: float
    lv_solution: AssignmentSolution
    rv_solution: AssignmentSolution
    metrics: MetricBlock | None = None

    @property
    def lv_served(self) -> list[int]:
        return sorted(self.lv_solution.served)

    def to_dict(self) -> dict:
        return {
            "epsilon": self.epsilon,
            "phi_rv": self.phi_rv,
            "lv_served": self.lv_served,
            "lv_trips": [list(t.ids) for t in self.lv_solution.selected],
            "rv_trips": [list(t.ids) for t in self.rv_solution.selected],
            "metrics": None if self.metrics is None else asdict(self.metrics),
        }


@dataclass
class Benchmarks:
    lv_only_fleet: int
    rv_only_profit: float
    sarp_fleet: int
    sarp_rv_profit: float
    rv_only_solution: AssignmentSolution = field(repr=False, default=None)
    sarp_rv_solution: AssignmentSolution = field(repr=False, default=None)


def _ids(requests) -> list[int]:
    return sorted(r if isinstance(r, int) else r.id for r in requests)


def _min_fleet_or_raise(tf, parcels) -> tuple[int, AssignmentSolution]:
    n_min, sol = min_lv_fleet(tf, parcels)
    if n_min is None:
        raise ValueError(f"parcels {sol.uncovered or _ids(parcels)} cannot be covered "
                         "by parcel-only trips")
    return n_min, sol


def non_dominated(points: list[ParetoPoint]) -> list[ParetoPoint]:
    """Points not beaten by another with fewer-or-equal LVs and at-least-equal profit."""
    keep = []
    for p in points:
        dominated = any(
            q is not p and q.epsilon <= p.epsilon and q.phi_rv >= p.phi_rv
            and (q.epsilon < p.epsilon or q.phi_rv > p.phi_rv)
            for q in points)
        if not dominated:
            keep.append(p)
    return sorted(keep, key=lambda p: p.epsilon)


def epsilon_sweep(catalog: TripCatalog, passengers, parcels, rv_fleet: int) -> list[ParetoPoint]:
    """Every (epsilon, profit) pair collected before the dominance filter."""
    parts = partition(catalog)
    tf = parts[1]
    passengers, parcels = _ids(passengers), _ids(parcels)
    eps, _ = _min_fleet_or_raise(tf, parcels)
    collected = []
    while eps >= 0:
        lv = max_lv_utility(tf, parcels, eps)
        served = lv.served
        rv = max_rv_profit(rv_candidates(parts, served), passengers,
                           [r for r in parcels if r not in served], rv_fleet)
        if not rv.feasible:
            break
        collected.append(ParetoPoint(eps, rv.objective_value, lv, rv))
        eps -= 1
    log.info("epsilon sweep collected %d points", len(collected))
    return collected


def pareto_frontier(catalog: TripCatalog, passengers, parcels, rv_fleet: int) -> list[ParetoPoint]:
    return non_dominated(epsilon_sweep(catalog, passengers, parcels, rv_fleet))


def rv_only_solution(catalog: TripCatalog, passengers, rv_fleet: int) -> AssignmentSolution:
    tp = partition(catalog)[0]
    return solve_selection(SelectionProgram(
        tp, PROFIT_MAX, {r: AT_MOST for r in _ids(passengers)}, rv_fleet))


def benchmark_rv_only(catalog: TripCatalog, passengers, rv_fleet: int) -> float:
    return rv_only_solution(catalog, passengers, rv_fleet).objective_value


def benchmark_lv_only(catalog: TripCatalog, parcels) -> int:
    return _min_fleet_or_raise(partition(catalog)[1], parcels)[0]


def sarp_solutions(catalog: TripCatalog, passengers, parcels, rv_fleet: int):
    """RV profit maximized first with parcels optional, then LVs for the leftovers."""
    parcels = _ids(parcels)
    coverage = {r: AT_MOST for r in _ids(passengers) + parcels}
    stage1 = solve_selection(SelectionProgram(catalog.trips, PROFIT_MAX, coverage, rv_fleet))
    left = [r for r in parcels if r not in stage1.served]
    pool = [t for t in partition(catalog)[1] if set(t.ids) <= set(left)]
    fleet, stage2 = min_lv_fleet(pool, left)
    if fleet is None:
        raise BenchmarkInfeasible(
            f"SARP benchmark: parcels {stage2.uncovered} left by RVs fit no LV trip")
    return stage1, stage2


def benchmark_sarp(catalog: TripCatalog, passengers, parcels, rv_fleet: int) -> tuple[float, int]:
    stage1, stage2 = sarp_solutions(catalog, passengers, parcels, rv_fleet)
    return stage1.objective_value, int(stage2.objective_value)


def benchmarks(catalog: TripCatalog, passengers, parcels, rv_fleet: int) -> Benchmarks:
    rv_only = rv_only_solution(catalog, passengers, rv_fleet)
    s1, s2 = sarp_solutions(catalog, passengers, parcels, rv_fleet)
    return Benchmarks(benchmark_lv_only(catalog, parcels), rv_only.objective_value,
                      int(s2.objective_value), s1.objective_value, rv_only, s1)


def acceptance_rate(solution: AssignmentSolution, passengers) -> float:
    """Share of passengers on a selected trip; 1.0 when there are no passengers."""
    ids = _ids(passengers)
    if not ids:
        return 1.0
    served = solution.served
    return sum(1 for r in ids if r in served) / len(ids)


def _pct(new: float, old: float) -> float:
    return 0.0 if old == 0 else 100.0 * (new - old) / abs(old)


def attach_metrics(points: list[ParetoPoint], bench: Benchmarks, passengers,
                   rv_fleet: int) -> None:
    """Per-point metrics; profit per RV divides by the whole online fleet."""
    for p in points:
        p.metrics = MetricBlock(
            passenger_acceptance_rate=acceptance_rate(p.rv_solution, passengers),
            avg_profit_per_rv=p.phi_rv / rv_fleet if rv_fleet else 0.0,
            rv_profit_increase_vs_rv_only=_pct(p.phi_rv, bench.rv_only_profit),
            lv_fleet_saving_vs_lv_only=bench.lv_only_fleet - p.epsilon,
            rv_profit_increase_vs_sarp=_pct(p.phi_rv, bench.sarp_rv_profit),
            lv_fleet_saving_vs_sarp=bench.sarp_fleet - p.epsilon,
        )
