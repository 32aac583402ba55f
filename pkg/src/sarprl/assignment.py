"""Exact trip selection: minimum LV fleet, LV utility, RV profit.

All three programs are instances of one 0-1 selection problem over
candidate trips with per-request coverage rows (exactly once, at most once,
or unconstrained) and an optional cap on the number of selected trips.
``solve_selection`` solves it by depth-first branch and bound. Candidates
are taken in canonical order (descending trip profit, then ascending id
tuple) and the include branch is explored first; an incumbent is replaced
only on strict improvement, so among optimal selections the one returned
has the lexicographically greatest 0/1 indicator vector in that order.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from sarprl.errors import InstanceTooLarge
from sarprl.trip_enum import Trip

EXACT = "exact"
AT_MOST = "atmost"
IGNORE = "ignore"
COUNT_MIN = "count-min"
PROFIT_MAX = "profit-max"
TRIP_CAP = 5000
TOL = 1e-9


@dataclass
class SelectionProgram:
    candidate_trips: list[Trip]
    objective: str = PROFIT_MAX
    coverage: dict[int, str] = field(default_factory=dict)
    cardinality_cap: int | None = None

    def __post_init__(self):
        if self.objective not in (COUNT_MIN, PROFIT_MAX):
            raise ValueError(f"unknown objective {self.objective!r}")
        bad = {v for v in self.coverage.values()} - {EXACT, AT_MOST, IGNORE}
        if bad:
            raise ValueError(f"unknown coverage kinds {sorted(bad)}")
        if self.cardinality_cap is not None and self.cardinality_cap < 0:
            raise ValueError("cardinality cap must be non-negative")


@dataclass
class AssignmentSolution:
    selected: list[Trip]
    objective_value: float | None
    proven_optimal: bool = True
    feasible: bool = True
    uncovered: list[int] = field(default_factory=list)

    @property
    def served(self) -> set[int]:
        return {rid for t in self.selected for rid in t.ids}

    def to_dict(self) -> dict:
        return {
            "feasible": self.feasible,
            "objective": self.objective_value,
            "proven_optimal": self.proven_optimal,
            "selected": [{"ids": list(t.ids), "kind": t.kind, "profit": t.profit}
                         for t in self.selected],
            "uncovered": self.uncovered,
        }


def canonical(trips) -> list[Trip]:
    return sorted(trips, key=lambda t: (-t.profit, t.ids))


def objective_of(trips, objective: str) -> float:
    if objective == COUNT_MIN:
        return float(len(trips))
    return math.fsum(t.profit for t in trips)


def check_solution(program: SelectionProgram, solution: AssignmentSolution) -> None:
    """Raise ``ValueError`` if ``solution`` breaks a coverage row or the cap."""
    if not solution.feasible:
        return
    counts: dict[int, int] = {}
    for t in solution.selected:
        for rid in t.ids:
            counts[rid] = counts.get(rid, 0) + 1
    for rid, kind in program.coverage.items():
        c = counts.get(rid, 0)
        if kind == EXACT and c != 1:
            raise ValueError(f"request {rid} covered {c} times, expected exactly once")
        if kind == AT_MOST and c > 1:
            raise ValueError(f"request {rid} covered {c} times, expected at most once")
    cap = program.cardinality_cap
    if cap is not None and len(solution.selected) > cap:
        raise ValueError(f"{len(solution.selected)} trips selected, cap is {cap}")


def solve_selection(program: SelectionProgram) -> AssignmentSolution:
    trips = canonical(program.candidate_trips)
    if len(trips) > TRIP_CAP:
        raise InstanceTooLarge(f"assignment is capped at {TRIP_CAP} trips, got {len(trips)}")
    rows = sorted(r for r, k in program.coverage.items() if k != IGNORE)
    bit = {r: 1 << k for k, r in enumerate(rows)}
    exact_mask = 0
    for r in rows:
        if program.coverage[r] == EXACT:
            exact_mask |= bit[r]
    count_min = program.objective == COUNT_MIN

    cands = []
    reachable = 0
    for t in trips:
        mask = 0
        for rid in t.ids:
            mask |= bit.get(rid, 0)
        coef = -1.0 if count_min else t.profit
        # a non-positive trip is only worth taking to satisfy an exact row
        if coef <= 0 and not mask & exact_mask:
            continue
        cands.append((t, mask, coef, bin(mask).count("1")))
        reachable |= mask
    missing = [r for r in rows if exact_mask & bit[r] and not reachable & bit[r]]
    if missing:
        return AssignmentSolution([], None, True, False, missing)

    cap = program.cardinality_cap
    row_bits = [(bit[r], bool(exact_mask & bit[r])) for r in rows]
    best_value = [-math.inf]
    best_pick: list = [None]
    chosen: list[int] = []
    n_exact = bin(exact_mask).count("1")

    def bound(live, covered, value, room):
        need = exact_mask & ~covered
        union, widest = 0, 0
        row_best: dict[int, float] = {}
        free = 0.0
        for i in live:
            _, mask, coef, size = cands[i]
            union |= mask
            if mask & need:
                widest = max(widest, bin(mask & need).count("1"))
            if size == 0:
                free += coef
                continue
            share = coef / size
            m = mask
            while m:
                low = m & -m
                if share > row_best.get(low, -math.inf):
                    row_best[low] = share
                m ^= low
        if need & ~union:
            return None
        if need:
            if room is not None and (room == 0 or
                                     -(-bin(need).count("1") // widest) > room):
                return None
        ub = value + free
        for b, is_exact in row_bits:
            if covered & b:
                continue
            share = row_best.get(b)
            if share is None:
                continue
            ub += share if is_exact else max(0.0, share)
        if room is not None and not count_min:
            top = sorted((cands[i][2] for i in live if cands[i][2] > 0), reverse=True)
            ub = min(ub, value + sum(top[:room]) + sum(
                min(0.0, row_best.get(b, 0.0)) for b, e in row_bits if e and need & b))
        if count_min:
            ub = math.floor(ub + 1e-6)
        return ub

    def dfs(live, covered, value, count):
        room = None if cap is None else cap - count
        if not live or room == 0:
            if covered & exact_mask == exact_mask and value > best_value[0] + TOL:
                best_value[0] = value
                best_pick[0] = list(chosen)
            return
        ub = bound(live, covered, value, room)
        if ub is None or ub <= best_value[0] + TOL:
            return
        i = live[0]
        _, mask, coef, _ = cands[i]
        chosen.append(i)
        dfs([j for j in live[1:] if not cands[j][1] & mask], covered | mask,
            value + coef, count + 1)
        chosen.pop()
        dfs(live[1:], covered, value, count)

    if n_exact and cap == 0:
        return AssignmentSolution([], None, True, False, [])
    dfs(list(range(len(cands))), 0, 0.0, 0)
    if best_pick[0] is None:
        return AssignmentSolution([], None, True, False, [])
    selected = [cands[i][0] for i in best_pick[0]]
    return AssignmentSolution(selected, objective_of(selected, program.objective))


def _ids(requests) -> list[int]:
    return sorted(r if isinstance(r, int) else r.id for r in requests)


def min_lv_fleet(parcel_trips, parcels) -> tuple[int | None, AssignmentSolution]:
    """Fewest parcel-only trips partitioning ``parcels``; ``None`` if impossible."""
    program = SelectionProgram(list(parcel_trips), COUNT_MIN,
                               {r: EXACT for r in _ids(parcels)})
    sol = solve_selection(program)
    return (int(sol.objective_value) if sol.feasible else None), sol


def max_lv_utility(parcel_trips, parcels, epsilon: int) -> AssignmentSolution:
    if epsilon < 0:
        raise ValueError("epsilon must be non-negative")
    return solve_selection(SelectionProgram(
        list(parcel_trips), PROFIT_MAX, {r: AT_MOST for r in _ids(parcels)}, epsilon))


def rv_candidates(catalog_or_parts, lv_served) -> list[Trip]:
    """Passenger trips plus parcel/mixed trips that avoid every LV-served parcel."""
    if isinstance(catalog_or_parts, tuple):
        tp, tf, tm = catalog_or_parts
    else:
        from sarprl.trip_enum import partition
        tp, tf, tm = partition(catalog_or_parts)
    lv_served = set(lv_served)
    return list(tp) + [t for t in list(tf) + list(tm) if lv_served.isdisjoint(t.ids)]


def max_rv_profit(rv_trips, passengers, residual_parcels, rv_fleet: int) -> AssignmentSolution:
    coverage = {r: AT_MOST for r in _ids(passengers)}
    coverage.update({r: EXACT for r in _ids(residual_parcels)})
    return solve_selection(SelectionProgram(list(rv_trips), PROFIT_MAX, coverage, rv_fleet))
