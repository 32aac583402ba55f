"""End-to-end runs: one scenario, and parameter sweeps over seeds."""

from __future__ import annotations

import logging
import multiprocessing as mp
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace

from sarprl.demand import ScenarioSpec, generate_scenario
from sarprl.pareto import (
    Benchmarks,
    ParetoPoint,
    attach_metrics,
    benchmarks,
    epsilon_sweep,
    non_dominated,
)
from sarprl.trip_enum import TripCatalog, enumerate_all

log = logging.getLogger(__name__)

SWEEP_PARAMS = ("rv_fleet", "gamma2", "ratio")
SWEEP_COLUMNS = ["param", "value", "seed", "epsilon", "phi_rv", "acceptance_rate",
                 "avg_profit_per_rv", "sarp_rv_profit", "sarp_fleet", "lv_only_fleet",
                 "rv_only_profit"]


@dataclass
class InstanceResult:
    name: str
    rv_fleet: int
    catalog: TripCatalog
    collected: list[ParetoPoint]
    frontier: list[ParetoPoint]
    bench: Benchmarks

    def to_dict(self) -> dict:
        b = self.bench
        return {
            "scenario": self.name,
            "rv_fleet": self.rv_fleet,
            "benchmarks": {"lv_only_fleet": b.lv_only_fleet, "rv_only_profit": b.rv_only_profit,
                           "sarp_fleet": b.sarp_fleet, "sarp_rv_profit": b.sarp_rv_profit},
            "collected": [[p.epsilon, p.phi_rv] for p in self.collected],
            "frontier": [p.to_dict() for p in self.frontier],
        }


def solve_instance(requests, net, sp, cp, rv_fleet: int, mode: str = "alg2",
                   threads: int = 1, catalog: TripCatalog | None = None,
                   name: str = "instance") -> InstanceResult:
    if catalog is None:
        catalog = enumerate_all(requests, net, sp, cp, mode, threads)
    passengers = [r.id for r in requests if r.is_passenger]
    parcels = [r.id for r in requests if not r.is_passenger]
    collected = epsilon_sweep(catalog, passengers, parcels, rv_fleet)
    frontier = non_dominated(collected)
    bench = benchmarks(catalog, passengers, parcels, rv_fleet)
    attach_metrics(frontier, bench, passengers, rv_fleet)
    return InstanceResult(name, rv_fleet, catalog, collected, frontier, bench)


def run_scenario(spec: ScenarioSpec, mode: str = "alg2", threads: int = 1,
                 catalog: TripCatalog | None = None) -> InstanceResult:
    requests = generate_scenario(spec)
    return solve_instance(requests, spec.network, spec.service, spec.costs, spec.rv_fleet,
                          mode, threads, catalog, spec.name)


def apply_param(spec: ScenarioSpec, param: str, value: str) -> ScenarioSpec:
    if param == "rv_fleet":
        return spec.replace(rv_fleet=int(value))
    if param == "gamma2":
        return spec.replace(costs=replace(spec.costs, gamma2=float(value)))
    if param == "ratio":
        sep = ":" if ":" in value else "/"
        n_p, n_f = (int(x) for x in value.split(sep))
        return spec.replace(n_passengers=n_p, n_parcels=n_f)
    raise ValueError(f"unknown sweep parameter {param!r}; expected one of {SWEEP_PARAMS}")


def summary_row(param: str, value, seed, result: InstanceResult) -> dict:
    """One CSV row; the frontier point with the fewest LVs represents the run."""
    b = result.bench
    row = dict.fromkeys(SWEEP_COLUMNS, "")
    row.update(param=param, value=value, seed=seed, sarp_rv_profit=b.sarp_rv_profit,
               sarp_fleet=b.sarp_fleet, lv_only_fleet=b.lv_only_fleet,
               rv_only_profit=b.rv_only_profit)
    if result.frontier:
        p = result.frontier[0]
        row.update(epsilon=p.epsilon, phi_rv=p.phi_rv,
                   acceptance_rate=p.metrics.passenger_acceptance_rate,
                   avg_profit_per_rv=p.metrics.avg_profit_per_rv)
    return row


def _sweep_task(args):
    param, value, spec, mode = args
    return summary_row(param, value, spec.seed, run_scenario(spec, mode))


def mean_row(param: str, value, rows: list[dict]) -> dict:
    out = dict.fromkeys(SWEEP_COLUMNS, "")
    out.update(param=param, value=value, seed="mean")
    for col in SWEEP_COLUMNS[3:]:
        vals = [r[col] for r in rows if r[col] != ""]
        if vals:
            out[col] = sum(vals) / len(vals)
    return out


def sweep(param: str, values, base: ScenarioSpec, seeds, workers: int = 1,
          mode: str = "alg2") -> list[dict]:
    """Rows per (value, seed) followed by a per-value mean row."""
    values = [str(v) for v in values]
    tasks = [(param, v, apply_param(base, param, v).replace(seed=s), mode)
             for v in values for s in seeds]
    if workers > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(workers, mp.get_context("fork")) as pool:
            results = list(pool.map(_sweep_task, tasks))
    else:
        results = [_sweep_task(t) for t in tasks]
    rows = []
    for v in values:
        mine = [r for r in results if r["value"] == v]
        rows.extend(mine)
        rows.append(mean_row(param, v, mine))
    return rows
