import itertools
import random

import pytest
from hypothesis import given, settings, strategies as st

from conftest import parcel, passenger
from sarprl.demand import CostParams, ServiceParams
from sarprl.network import grid_network
from sarprl.oracles import brute_force_route
from sarprl.route_opt import (
    Route,
    RouteInvariantError,
    check_route,
    optimal_route,
    route_profit,
    stops_for,
)
from sarprl.verify import random_requests

SP, CP = ServiceParams(), CostParams()
GRID5 = grid_network(5, 5, 0.5)


def test_single_passenger_direct(line, sp, cp):
    r = passenger(1, 0, 10, 3.0)
    res = optimal_route([r], line, sp, cp)
    assert res.feasible
    assert res.profit == pytest.approx(23.0, abs=1e-9)
    assert res.route.tau[0] == 3.0
    assert res.route.tau[1] == pytest.approx(r.earliest_arrival(line))


def test_single_parcel_profit(line, sp, cp):
    res = optimal_route([parcel(1, 2, 7, 0.0)], line, sp, cp)
    assert res.profit == pytest.approx(6.0, abs=1e-9)


def test_delay_penalty(line, sp, cp):
    r = passenger(1, 0, 10, 0.0)
    a, b = stops_for(r)
    late = Route([a, b], [4.0, 24.0], [4.0, 0.0], [1, 2], (r,))
    assert route_profit(late, cp, line, sp) == pytest.approx(23.0 - 2.0, abs=1e-9)


def test_overlapping_passengers_infeasible(line, sp, cp):
    # both rides overlap in time and two passenger loads exceed capacity
    res = optimal_route([passenger(1, 0, 10, 0.0), passenger(2, 1, 9, 0.0)], line, sp, cp)
    assert not res.feasible
    assert res.route is None


def test_passengers_can_be_chained(line, sp, cp):
    # second ride starts after the first ends: served one after the other
    p1, p2 = passenger(1, 0, 5, 0.0), passenger(2, 5, 10, 10.0)
    res = optimal_route([p1, p2], line, sp, cp)
    assert res.feasible
    assert [s.request_id for s in res.route.stops] == [1, 1, 2, 2]
    solo = sum(optimal_route([p], line, sp, cp).profit for p in (p1, p2))
    assert res.profit == pytest.approx(solo)


def test_one_passenger_two_parcels_matches_oracle(sp, cp):
    reqs = [passenger(1, 0, 24, 2.0), parcel(2, 1, 23, 0.0), parcel(3, 5, 19, 4.0)]
    res = optimal_route(reqs, GRID5, sp, cp)
    feas, profit = brute_force_route(reqs, GRID5, sp, cp)
    assert res.feasible == feas
    if feas:
        assert res.profit == pytest.approx(profit, abs=1e-6)


def test_returned_routes_pass_invariants():
    rng = random.Random(11)
    for _ in range(80):
        reqs = random_requests(rng, GRID5, SP, rng.randint(1, 4), horizon=15)
        res = optimal_route(reqs, GRID5, SP, CP)
        if res.feasible:
            check_route(res.route, GRID5, SP)
            assert route_profit(res.route, CP, GRID5, SP) == pytest.approx(res.profit, abs=1e-9)


def test_invariant_checker_catches_violations(line, sp, cp):
    r = passenger(1, 0, 10, 0.0)
    a, b = stops_for(r)
    with pytest.raises(RouteInvariantError):
        check_route(Route([b, a], [0.0, 20.0], [-4.0, 0.0], [1, 2], (r,)), line, sp)
    with pytest.raises(RouteInvariantError, match="window"):
        check_route(Route([a, b], [6.0, 26.0], [4.0, 0.0], [1, 2], (r,)), line, sp)
    with pytest.raises(RouteInvariantError, match="travel time"):
        check_route(Route([a, b], [0.0, 5.0], [4.0, 0.0], [1, 2], (r,)), line, sp)


def test_stop_budget_for_passengers(line, cp):
    # both parcels can only be carried during the passenger ride: four inner stops
    reqs = [passenger(1, 0, 10, 0.0), parcel(2, 3, 6, 4.0), parcel(3, 4, 5, 4.0)]
    for eta, feasible in ((1, False), (3, False), (4, True)):
        sp = ServiceParams(eta=eta)
        res = optimal_route(reqs, line, sp, cp)
        assert res.feasible == feasible
        if feasible:
            check_route(res.route, line, sp)
            assert optimal_route(reqs[:2], line, ServiceParams(eta=2), cp).feasible


def test_singleton_always_feasible_with_zero_delay():
    rng = random.Random(2)
    for r in random_requests(rng, GRID5, SP, 30):
        res = optimal_route([r], GRID5, SP, CP)
        assert res.feasible
        assert res.route.tau[0] == r.submit_time
        assert res.route.tau[1] == pytest.approx(r.earliest_arrival(GRID5))


def test_route_serialization_roundtrip(line, sp, cp):
    reqs = [passenger(1, 0, 6, 0.0), parcel(2, 1, 8, 1.0)]
    route = optimal_route(reqs, line, sp, cp).route
    again = Route.from_dict(route.to_dict(), {r.id: r for r in reqs})
    assert again.to_dict() == route.to_dict()


def test_monotone_infeasibility():
    rng = random.Random(7)
    checked = 0
    for _ in range(60):
        reqs = random_requests(rng, GRID5, SP, 5, horizon=10)
        for k in (1, 2, 3):
            for sub in itertools.combinations(reqs, k):
                if optimal_route(sub, GRID5, SP, CP).feasible:
                    continue
                for r in reqs:
                    if r not in sub:
                        checked += 1
                        assert not optimal_route(list(sub) + [r], GRID5, SP, CP).feasible
    assert checked > 0


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10**6), st.integers(1, 3))
def test_matches_oracle_property(seed, k):
    reqs = random_requests(random.Random(seed), GRID5, SP, k, horizon=12)
    res = optimal_route(reqs, GRID5, SP, CP)
    feas, profit = brute_force_route(reqs, GRID5, SP, CP)
    assert res.feasible == feas
    if feas:
        assert res.profit == pytest.approx(profit, abs=1e-6)


def test_deterministic_tie_break(line, sp, cp):
    # two parcels with identical geometry: sequences tie, the smaller stop order wins
    reqs = [parcel(1, 2, 8, 0.0), parcel(2, 2, 8, 0.0)]
    a = optimal_route(reqs, line, sp, cp).route.to_dict()
    b = optimal_route(list(reversed(reqs)), line, sp, cp).route.to_dict()
    assert a == b
    assert [s["request"] for s in a["stops"]] == [1, 2, 1, 2]
