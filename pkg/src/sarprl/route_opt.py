"""Profit-maximizing route for a fixed set of requests.

The search walks stop sequences depth first in increasing stop-index order
(pickup of the k-th request is stop k+1, its dropoff stop k+1+n for n
requests sorted by id) and schedules every stop as early as allowed. For a
fixed sequence the earliest schedule is componentwise minimal among all
feasible schedules: every constraint on arrival times is an upper bound
apart from pickup lower bounds, which waiting absorbs, and the only
time-dependent objective term is the passenger delay penalty. Searching
sequences with earliest schedules is therefore exact.

Pruning uses time-window/delay reachability, capacity, the stop budget for
onboard passengers, an admissible profit bound, and label dominance on
(visited stops, last stop, onboard stop counters). The vehicle starts and
ends at virtual depots that are zero distance and zero time from every stop.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from sarprl.demand import CostParams, Request, ServiceParams
from sarprl.network import Network

TOL = 1e-6
PROFIT_TOL = 1e-9

PICKUP_PASSENGER = "PickupPassenger"
DROPOFF_PASSENGER = "DropoffPassenger"
PICKUP_PARCEL = "PickupParcel"
DROPOFF_PARCEL = "DropoffParcel"


class RouteInvariantError(ValueError):
    pass


@dataclass(frozen=True)
class Stop:
    request_id: int
    role: str
    location: int
    load_delta: float

    @property
    def is_pickup(self) -> bool:
        return self.role in (PICKUP_PASSENGER, PICKUP_PARCEL)


@dataclass
class Route:
    """Visit sequence with arrival times ``tau``, load after each stop ``w``
    and 1-based visit indices ``P``."""

    stops: list[Stop]
    tau: list[float]
    w: list[float]
    P: list[int]
    requests: tuple[Request, ...] = field(repr=False, default=())
    profit: float = 0.0

    def distance(self, net: Network) -> float:
        return sum(net.travel_distance(a.location, b.location)
                   for a, b in zip(self.stops, self.stops[1:]))

    def to_dict(self) -> dict:
        return {
            "stops": [
                {"request": s.request_id, "role": s.role, "location": s.location,
                 "load_delta": s.load_delta, "tau": t, "w": w, "P": p}
                for s, t, w, p in zip(self.stops, self.tau, self.w, self.P)
            ],
            "profit": self.profit,
        }

    @classmethod
    def from_dict(cls, d: dict, requests: dict[int, Request]) -> "Route":
        stops, tau, w, P = [], [], [], []
        for s in d["stops"]:
            stops.append(Stop(int(s["request"]), s["role"], int(s["location"]),
                              float(s["load_delta"])))
            tau.append(float(s["tau"]))
            w.append(float(s["w"]))
            P.append(int(s["P"]))
        ids = sorted({s.request_id for s in stops})
        return cls(stops, tau, w, P, tuple(requests[i] for i in ids), float(d["profit"]))


@dataclass
class RouteResult:
    feasible: bool
    route: Route | None = None
    profit: float | None = None


def stops_for(req: Request) -> tuple[Stop, Stop]:
    if req.is_passenger:
        roles = (PICKUP_PASSENGER, DROPOFF_PASSENGER)
    else:
        roles = (PICKUP_PARCEL, DROPOFF_PARCEL)
    return (Stop(req.id, roles[0], req.origin, req.load),
            Stop(req.id, roles[1], req.destination, -req.load))


def fixed_income(requests, net: Network, cp: CostParams) -> float:
    total = 0.0
    for r in requests:
        td = net.travel_distance(r.origin, r.destination)
        if r.is_passenger:
            total += cp.alpha + cp.gamma1 * td
        else:
            total += cp.beta + cp.gamma2 * td
    return total


def check_route(route: Route, net: Network, sp: ServiceParams) -> None:
    """Raise ``RouteInvariantError`` unless every routing constraint holds."""
    reqs = {r.id: r for r in route.requests}
    n = len(route.stops)
    if not (len(route.tau) == len(route.w) == len(route.P) == n):
        raise RouteInvariantError("tau, w and P must align with stops")
    if list(route.P) != list(range(1, n + 1)):
        raise RouteInvariantError("visit indices must be 1..n along the sequence")
    seen_pick, seen_drop = {}, {}
    load = 0.0
    for k, s in enumerate(route.stops):
        if s.request_id not in reqs:
            raise RouteInvariantError(f"stop for unknown request {s.request_id}")
        r = reqs[s.request_id]
        if k and route.tau[k] < route.tau[k - 1] + net.travel_time(
                route.stops[k - 1].location, s.location) - TOL:
            raise RouteInvariantError(f"stop {k + 1} reached before travel time allows")
        if s.is_pickup:
            if s.request_id in seen_pick or s.location != r.origin or s.load_delta != r.load:
                raise RouteInvariantError(f"bad pickup stop for request {r.id}")
            seen_pick[r.id] = k
            if not (r.submit_time - TOL <= route.tau[k] <= r.latest_pickup(sp) + TOL):
                raise RouteInvariantError(f"pickup of request {r.id} outside its window")
        else:
            if (r.id not in seen_pick or r.id in seen_drop or s.location != r.destination
                    or s.load_delta != -r.load):
                raise RouteInvariantError(f"bad dropoff stop for request {r.id}")
            seen_drop[r.id] = k
            if route.tau[k] - r.earliest_arrival(net) > r.max_delay(sp) + TOL:
                raise RouteInvariantError(f"request {r.id} exceeds its delay tolerance")
            if r.is_passenger and k - seen_pick[r.id] - 1 > sp.eta:
                raise RouteInvariantError(f"too many stops during passenger {r.id}")
        load += s.load_delta
        if abs(route.w[k] - load) > TOL:
            raise RouteInvariantError(f"load after stop {k + 1} inconsistent")
        lo, hi = max(0.0, s.load_delta), min(sp.Q, sp.Q + s.load_delta)
        if not (lo - TOL <= route.w[k] <= hi + TOL):
            raise RouteInvariantError(f"capacity violated at stop {k + 1}")
    if set(seen_drop) != set(reqs):
        raise RouteInvariantError("every request must be picked up and dropped off")


def route_profit(route: Route, cp: CostParams, net: Network,
                 sp: ServiceParams | None = None) -> float:
    """Recompute the driver profit of ``route``.

    Passing ``sp`` also validates all routing constraints.
    """
    if sp is not None:
        check_route(route, net, sp)
    elif len(route.stops) != 2 * len(route.requests):
        raise RouteInvariantError("route must visit two stops per request")
    penalty = 0.0
    for s, t in zip(route.stops, route.tau):
        if s.role == DROPOFF_PASSENGER:
            r = next(r for r in route.requests if r.id == s.request_id)
            penalty += t - r.earliest_arrival(net)
    return (fixed_income(route.requests, net, cp)
            - cp.gamma3 * route.distance(net) - cp.gamma4 * penalty)


def _stop_table(reqs) -> list[Stop]:
    return [stops_for(r)[0] for r in reqs] + [stops_for(r)[1] for r in reqs]


def optimal_route(requests, net: Network, sp: ServiceParams,
                  cp: CostParams) -> RouteResult:
    reqs = sorted(requests, key=lambda r: r.id)
    found = optimal_order(reqs, net, sp, cp)
    if found is None:
        return RouteResult(False)
    return route_from_order(reqs, *found, net, cp)


def route_from_order(requests, order, arrivals, net: Network, cp: CostParams) -> RouteResult:
    """Rebuild the route for a stop-index ``order`` (see ``optimal_order``)."""
    reqs = sorted(requests, key=lambda r: r.id)
    stops = _stop_table(reqs)
    seq_stops = [stops[s] for s in order]
    w, acc = [], 0.0
    for s in seq_stops:
        acc += s.load_delta
        w.append(acc)
    route = Route(seq_stops, list(arrivals), w, list(range(1, len(order) + 1)), tuple(reqs))
    route.profit = route_profit(route, cp, net)
    return RouteResult(True, route, route.profit)


def optimal_order(requests, net: Network, sp: ServiceParams, cp: CostParams):
    """Best (stop-index order, arrival times), or None when infeasible.

    Stop k < n is the pickup of the k-th request by id, stop n + k its dropoff.
    """
    reqs = sorted(requests, key=lambda r: r.id)
    n = len(reqs)
    if n == 0:
        raise ValueError("optimal_route needs at least one request")
    if len({r.id for r in reqs}) != n:
        raise ValueError("duplicate request ids")
    if any(r.load > sp.Q + TOL for r in reqs):
        return None

    stops = _stop_table(reqs)
    locs = [s.location for s in stops]
    m = 2 * n
    td = net.distance_table(locs)
    tt = [[x / net.speed_kmh * 60.0 for x in row] for row in td]
    lbd = net.distance_table(locs, lower=True)
    lbt = [[x / net.speed_kmh * 60.0 for x in row] for row in lbd]

    ts = [r.submit_time for r in reqs]
    tpl = [r.submit_time + sp.sigma for r in reqs]
    tstar = [r.submit_time + tt[k][k + n] for k, r in enumerate(reqs)]
    tmax = [tstar[k] + r.max_delay(sp) for k, r in enumerate(reqs)]
    load = [r.load for r in reqs]
    is_pax = [r.is_passenger for r in reqs]
    income = fixed_income(reqs, net, cp)
    g3, g4, eta, cap = cp.gamma3, cp.gamma4, sp.eta, sp.Q
    full = (1 << n) - 1

    best = [float("-inf"), None]
    labels: dict = {}
    seq = [0] * m
    times = [0.0] * m
    since = [0] * n

    def bound_and_reach(picked, dropped, last, time, partial):
        # None when some pending request can no longer meet its window
        rem_d = 0.0
        pen = 0.0
        for k in range(n):
            bit = 1 << k
            if dropped & bit:
                continue
            if picked & bit:
                arr = time + lbt[last][k + n]
                if arr > tmax[k] + TOL:
                    return None
                d = lbd[last][k + n]
            else:
                if last < 0:
                    at_o, d = ts[k], 0.0
                else:
                    at_o = time + lbt[last][k]
                    if at_o > tpl[k] + TOL:
                        return None
                    d = lbd[last][k]
                    if at_o < ts[k]:
                        at_o = ts[k]
                arr = at_o + lbt[k][k + n]
                if arr > tmax[k] + TOL:
                    return None
                d += lbd[k][k + n]
            if d > rem_d:
                rem_d = d
            if is_pax[k]:
                pen += arr - tstar[k]
        return income + partial - g3 * rem_d - g4 * pen

    def dfs(depth, picked, dropped, last, time, cur_load, partial):
        if dropped == full:
            total = income + partial
            if total > best[0] + PROFIT_TOL:
                best[0] = total
                best[1] = (list(seq), list(times))
            return
        ub = bound_and_reach(picked, dropped, last, time, partial)
        if ub is None or ub <= best[0] + PROFIT_TOL:
            return
        onboard = picked & ~dropped
        key = (picked, dropped, last,
               tuple(since[k] for k in range(n) if is_pax[k] and onboard >> k & 1))
        bucket = labels.get(key)
        if bucket is None:
            labels[key] = [(time, partial)]
        else:
            for t0, p0 in bucket:
                if t0 <= time + 1e-12 and p0 >= partial - 1e-12:
                    return
            bucket.append((time, partial))

        for s in range(m):
            if s < n:
                k = s
                if picked >> k & 1:
                    continue
                new_load = cur_load + load[k]
                if new_load > cap + TOL:
                    continue
                arr = ts[k] if last < 0 else time + tt[last][s]
                if arr > tpl[k] + TOL:
                    continue
                if arr < ts[k]:
                    arr = ts[k]
                step = 0.0 if last < 0 else td[last][s]
                new_partial = partial - g3 * step
                new_picked, new_dropped = picked | (1 << k), dropped
            else:
                k = s - n
                if not (onboard >> k & 1):
                    continue
                if is_pax[k] and since[k] > eta:
                    continue
                arr = time + tt[last][s]
                if arr - tstar[k] > tmax[k] - tstar[k] + TOL:
                    continue
                new_load = cur_load - load[k]
                new_partial = partial - g3 * td[last][s]
                if is_pax[k]:
                    new_partial -= g4 * (arr - tstar[k])
                new_picked, new_dropped = picked, dropped | (1 << k)
            # stops visited while a passenger is aboard count against its budget
            bumped = [j for j in range(n) if is_pax[j] and onboard >> j & 1 and j != k]
            for j in bumped:
                since[j] += 1
            if s < n and is_pax[k]:
                since[k] = 0
            seq[depth] = s
            times[depth] = arr
            dfs(depth + 1, new_picked, new_dropped, s, arr, new_load, new_partial)
            for j in bumped:
                since[j] -= 1

    dfs(0, 0, 0, -1, 0.0, 0.0, 0.0)
    if best[1] is None:
        return None
    order, arrivals = best[1]
    return tuple(order), tuple(arrivals)
