import random

import pytest

from sarprl.assignment import (
    AT_MOST,
    EXACT,
    PROFIT_MAX,
    TRIP_CAP,
    SelectionProgram,
    check_solution,
    max_lv_utility,
    max_rv_profit,
    min_lv_fleet,
    rv_candidates,
    solve_selection,
)
from sarprl.demand import ScenarioSpec, generate_scenario
from sarprl.errors import InstanceTooLarge
from sarprl.network import grid_network
from sarprl.oracles import brute_force_selection
from sarprl.trip_enum import Trip, enumerate_all, partition
from sarprl.verify import random_program


def F(ids, profit):
    return Trip(tuple(ids), "F", profit)


def test_singletons_only():
    trips = [F((i,), 1.0) for i in range(1, 6)]
    n, sol = min_lv_fleet(trips, range(1, 6))
    assert n == 5
    assert min_lv_fleet(trips, [])[0] == 0


def test_uncoverable_parcels():
    n, sol = min_lv_fleet([F((1, 2), 3.0)], [1, 2, 3])
    assert n is None and not sol.feasible
    assert sol.uncovered == [3]


def test_max_lv_utility_edges():
    trips = [F((1,), 2.0), F((2, 3), 5.0), F((4,), 1.0)]
    zero = max_lv_utility(trips, [1, 2, 3, 4], 0)
    assert zero.objective_value == 0 and zero.served == set()
    full = max_lv_utility(trips, [1, 2, 3, 4], len(trips))
    assert {t.ids for t in full.selected} == {t.ids for t in trips}


def test_max_rv_profit_edges():
    pax = [Trip((1,), "P", 4.0), Trip((2,), "P", 3.0)]
    sol = max_rv_profit(pax, [1, 2], [], 5)
    assert sol.objective_value == 7.0
    assert not max_rv_profit(pax + [Trip((3,), "F", 1.0)], [1, 2], [3], 0).feasible


def test_single_trip_covering_all_rows():
    t = F((1, 2, 3), -2.0)
    sol = solve_selection(SelectionProgram([t], PROFIT_MAX, {1: EXACT, 2: EXACT, 3: EXACT}))
    assert sol.selected == [t]


def test_tie_break_prefers_smaller_ids():
    a, b = F((3,), 5.0), F((1,), 5.0)
    sol = solve_selection(SelectionProgram([a, b], PROFIT_MAX, {1: AT_MOST, 3: AT_MOST}, 1))
    assert [t.ids for t in sol.selected] == [(1,)]


def test_generic_solver_against_brute_force():
    rng = random.Random(123)
    for _ in range(150):
        prog = random_program(rng)
        sol = solve_selection(prog)
        feas, value, chosen = brute_force_selection(prog)
        assert sol.feasible == feas
        if feas:
            assert sol.objective_value == value
            check_solution(prog, sol)
            assert sorted(t.ids for t in sol.selected) == sorted(t.ids for t in chosen)


def _catalog(seed, n_p=7, n_f=3):
    spec = ScenarioSpec(n_passengers=n_p, n_parcels=n_f, seed=seed,
                        network=grid_network(4, 8, 0.5), horizon=30)
    reqs = generate_scenario(spec)
    cat = enumerate_all(reqs, spec.network, spec.service, spec.costs)
    return cat, [r.id for r in reqs if r.is_passenger], [r.id for r in reqs if not r.is_passenger]


def test_min_fleet_monotone_in_trips():
    cat, _, parcels = _catalog(4, 2, 7)
    tf = partition(cat)[1]
    rng = random.Random(0)
    singles = [t for t in tf if len(t.ids) == 1]
    others = [t for t in tf if len(t.ids) > 1]
    rng.shuffle(others)
    prev = None
    for k in range(0, len(others) + 1, max(1, len(others) // 6)):
        n, _ = min_lv_fleet(singles + others[:k], parcels)
        assert prev is None or n <= prev
        prev = n


def test_lv_utility_monotone_in_epsilon():
    cat, _, parcels = _catalog(2, 2, 7)
    tf = partition(cat)[1]
    vals = [max_lv_utility(tf, parcels, e).objective_value for e in range(0, 6)]
    assert vals == sorted(vals)


def test_rv_profit_monotone_in_fleet_and_offload():
    cat, pax, parcels = _catalog(1)
    tp, tf, tm = partition(cat)
    vals = []
    for k in range(1, 6):
        sol = max_rv_profit(rv_candidates((tp, tf, tm), set()), pax, parcels, k)
        vals.append(sol.objective_value if sol.feasible else float("-inf"))
    assert vals == sorted(vals)
    # offloading a parcel to LVs keeps the RV program feasible (its income is lost, so
    # the optimum itself may drop)
    k = 3
    base = max_rv_profit(rv_candidates(cat, set()), pax, parcels, k)
    assert base.feasible
    for p in parcels:
        assert max_rv_profit(rv_candidates(cat, {p}), pax, [q for q in parcels if q != p], k).feasible


def test_solutions_pass_independent_checker():
    cat, pax, parcels = _catalog(3)
    sol = max_rv_profit(rv_candidates(cat, set()), pax, parcels, 3)
    prog = SelectionProgram(rv_candidates(cat, set()), PROFIT_MAX,
                            {**{r: AT_MOST for r in pax}, **{r: EXACT for r in parcels}}, 3)
    check_solution(prog, sol)


def test_trip_cap():
    trips = [F((i,), 1.0) for i in range(TRIP_CAP + 1)]
    with pytest.raises(InstanceTooLarge):
        solve_selection(SelectionProgram(trips))


def test_negative_trips_forced_by_exact_rows():
    trips = [F((1,), -1.0), F((1, 2), -5.0), F((2,), -1.0)]
    sol = solve_selection(SelectionProgram(trips, PROFIT_MAX, {1: EXACT, 2: EXACT}))
    assert sol.objective_value == -2.0
    sol = solve_selection(SelectionProgram(trips, PROFIT_MAX, {1: AT_MOST, 2: AT_MOST}))
    assert sol.selected == [] and sol.objective_value == 0
