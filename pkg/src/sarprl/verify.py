"""Oracle-equivalence suites on small randomized instances.

Shared by ``sarprl verify`` and the test-suite.
"""

from __future__ import annotations

import math
import random

from sarprl.assignment import (
    AT_MOST,
    COUNT_MIN,
    EXACT,
    IGNORE,
    PROFIT_MAX,
    SelectionProgram,
    check_solution,
    solve_selection,
)
from sarprl.demand import PARCEL, PASSENGER, CostParams, Request, ScenarioSpec, ServiceParams, generate_scenario
from sarprl.network import grid_network
from sarprl.oracles import brute_force_epsilon_frontier, brute_force_route, brute_force_selection
from sarprl.pareto import pareto_frontier
from sarprl.route_opt import optimal_route
from sarprl.trip_enum import Trip, enumerate_all


def random_requests(rng: random.Random, net, sp: ServiceParams, k: int, horizon=20.0):
    ids = net.ids
    out = []
    for i in range(1, k + 1):
        o, d = rng.sample(ids, 2)
        kind = rng.choice((PASSENGER, PARCEL))
        out.append(Request(i, kind, o, d, round(rng.uniform(0, horizon), 2), sp.load_of(kind)))
    return out


def random_program(rng: random.Random, max_trips=15) -> SelectionProgram:
    n_req = rng.randint(3, 8)
    ids = list(range(1, n_req + 1))
    # subsets of size 1..3 available
    room = sum(math.comb(n_req, k) for k in (1, 2, 3))
    target = rng.randint(3, min(max_trips, room))
    sets = set()
    while len(sets) < target:
        sets.add(tuple(sorted(rng.sample(ids, rng.randint(1, 3)))))
    trips = [Trip(t, "F", round(rng.uniform(-3, 10), 3)) for t in sorted(sets)]
    cov = {r: rng.choice((EXACT, AT_MOST, AT_MOST, IGNORE)) for r in ids}
    return SelectionProgram(trips, rng.choice((COUNT_MIN, PROFIT_MAX)), cov,
                            rng.choice((None, 1, 2, 3, 4)))


def route_suite(seed=0, n=60):
    net = grid_network(5, 5, 0.5)
    sp, cp = ServiceParams(), CostParams()
    rng = random.Random(seed)
    bad = 0
    for _ in range(n):
        reqs = random_requests(rng, net, sp, rng.randint(1, 3))
        res = optimal_route(reqs, net, sp, cp)
        feas, profit = brute_force_route(reqs, net, sp, cp)
        if res.feasible != feas or (feas and abs(res.profit - profit) > 1e-6):
            bad += 1
    return bad == 0, f"{n - bad}/{n} subsets agree"


def enumeration_suite(seed=0):
    spec = ScenarioSpec(n_passengers=6, n_parcels=3, seed=seed, network=grid_network(4, 8, 0.5),
                        horizon=30)
    reqs = generate_scenario(spec)
    cats = {m: enumerate_all(reqs, spec.network, spec.service, spec.costs, m)
            for m in ("direct", "alg1", "alg2")}
    same = len({frozenset(c.id_sets()) for c in cats.values()}) == 1
    counts = [cats[m].candidates_evaluated for m in ("alg2", "alg1", "direct")]
    ok = same and counts == sorted(counts)
    return ok, f"catalogs identical={same}, candidates alg2/alg1/direct={counts}"


def assignment_suite(seed=0, n=50):
    rng = random.Random(seed)
    bad = 0
    for _ in range(n):
        prog = random_program(rng)
        sol = solve_selection(prog)
        feas, value, _ = brute_force_selection(prog)
        if sol.feasible != feas or (feas and sol.objective_value != value):
            bad += 1
        elif feas:
            check_solution(prog, sol)
    return bad == 0, f"{n - bad}/{n} programs agree"


def pareto_suite(seed=0):
    net = grid_network(4, 8, 0.5)
    bad = 0
    for k in (2, 3):
        spec = ScenarioSpec(n_passengers=7, n_parcels=3, seed=seed, network=net, horizon=30,
                            rv_fleet=k)
        reqs = generate_scenario(spec)
        cat = enumerate_all(reqs, net, spec.service, spec.costs)
        P = [r.id for r in reqs if r.is_passenger]
        F = [r.id for r in reqs if not r.is_passenger]
        mine = [(p.epsilon, p.phi_rv) for p in pareto_frontier(cat, P, F, k)]
        _, ref = brute_force_epsilon_frontier(cat, P, F, k)
        if not frontiers_match(mine, ref):
            bad += 1
    return bad == 0, f"{2 - bad}/2 frontiers agree"


def frontiers_match(a, b, tol=1e-9) -> bool:
    return len(a) == len(b) and all(
        e1 == e2 and math.isclose(p1, p2, rel_tol=0, abs_tol=tol) for (e1, p1), (e2, p2) in zip(a, b))


SUITES = {
    "route": route_suite,
    "enumeration": enumeration_suite,
    "assignment": assignment_suite,
    "pareto": pareto_suite,
}


def run_all(seed=0):
    out = []
    for name, fn in SUITES.items():
        try:
            ok, detail = fn(seed)
        except Exception as exc:  # a crash is a failed suite, not a crashed CLI
            ok, detail = False, f"{type(exc).__name__}: {exc}"
        out.append((name, ok, detail))
    return out
