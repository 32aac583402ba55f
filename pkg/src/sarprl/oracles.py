"""Brute-force references used by ``verify`` and the test suite.

None of these share code paths with the solvers they check: routes are
priced over every stop permutation with the schedule chosen by a linear
program, selections by plain enumeration of disjoint trip sets.
"""

from __future__ import annotations

import math
from itertools import permutations

import numpy as np
from scipy.optimize import linprog

from sarprl.assignment import AT_MOST, COUNT_MIN, EXACT, IGNORE, SelectionProgram

TOL = 1e-6


def _schedule(seq, reqs, net, sp, cp):
    """Cheapest feasible arrival times for a fixed visit order, or None."""
    m = len(seq)
    A, b = [], []
    bounds = []
    c = np.zeros(m)
    for k, (ri, pick) in enumerate(seq):
        r = reqs[ri]
        if k:
            prev = reqs[seq[k - 1][0]]
            a = prev.origin if seq[k - 1][1] else prev.destination
            here = r.origin if pick else r.destination
            row = np.zeros(m)
            row[k - 1], row[k] = 1.0, -1.0
            A.append(row)
            b.append(-net.travel_time(a, here))
        if pick:
            bounds.append((r.submit_time, r.submit_time + sp.sigma))
        else:
            t_star = r.submit_time + net.travel_time(r.origin, r.destination)
            bounds.append((0.0, t_star + (sp.delta_P if r.is_passenger else sp.delta_F)))
            if r.is_passenger:
                c[k] = cp.gamma4
    res = linprog(c, A_ub=np.array(A) if A else None, b_ub=np.array(b) if b else None,
                  bounds=bounds, method="highs")
    if res.status != 0:
        return None
    return res.x


def brute_force_route(requests, net, sp, cp):
    """(feasible, profit) over every precedence-respecting stop order."""
    reqs = sorted(requests, key=lambda r: r.id)
    n = len(reqs)
    stops = [(k, True) for k in range(n)] + [(k, False) for k in range(n)]
    best = -math.inf
    for seq in permutations(stops):
        pos = {s: i for i, s in enumerate(seq)}
        if any(pos[(k, True)] > pos[(k, False)] for k in range(n)):
            continue
        load, ok = 0.0, True
        for ri, pick in seq:
            load += reqs[ri].load if pick else -reqs[ri].load
            if load > sp.Q + TOL:
                ok = False
                break
        if not ok:
            continue
        if any(reqs[k].is_passenger and pos[(k, False)] - pos[(k, True)] - 1 > sp.eta
               for k in range(n)):
            continue
        tau = _schedule(seq, reqs, net, sp, cp)
        if tau is None:
            continue
        profit = 0.0
        for k, (ri, pick) in enumerate(seq):
            r = reqs[ri]
            if k:
                p = reqs[seq[k - 1][0]]
                a = p.origin if seq[k - 1][1] else p.destination
                profit -= cp.gamma3 * net.travel_distance(a, r.origin if pick else r.destination)
            if not pick:
                td = net.travel_distance(r.origin, r.destination)
                if r.is_passenger:
                    t_star = r.submit_time + net.travel_time(r.origin, r.destination)
                    profit += cp.alpha + cp.gamma1 * td - cp.gamma4 * (tau[k] - t_star)
                else:
                    profit += cp.beta + cp.gamma2 * td
        best = max(best, profit)
    if best == -math.inf:
        return False, None
    return True, best


def packings(trips, cap=None):
    """Every pairwise-disjoint subset of ``trips`` (as index lists), include-first."""
    return _all_subsets(trips, cap, {r for t in trips for r in t.ids})


def brute_force_selection(program: SelectionProgram):
    """(feasible, objective, selected trips) by exhaustive search.

    Candidates are scanned in canonical order; the first strictly best
    selection wins, matching the solver's tie-break.
    """
    trips = sorted(program.candidate_trips, key=lambda t: (-t.profit, t.ids))
    exact = {r for r, k in program.coverage.items() if k == EXACT}
    atmost = {r for r, k in program.coverage.items() if k == AT_MOST}
    best, pick = -math.inf, None
    for sel in _all_subsets(trips, program.cardinality_cap, atmost | exact):
        covered = [r for i in sel for r in trips[i].ids]
        if any(covered.count(r) != 1 for r in exact):
            continue
        if program.objective == COUNT_MIN:
            value = -float(len(sel))
        else:
            value = math.fsum(trips[i].profit for i in sel)
        if value > best + 1e-9:
            best, pick = value, sel
    if pick is None:
        return False, None, []
    chosen = [trips[i] for i in pick]
    return True, (-best if program.objective == COUNT_MIN else best), chosen


def _all_subsets(trips, cap, rows):
    # disjointness only matters on constrained rows
    sets = [set(t.ids) & rows for t in trips]
    out = []

    def rec(i, used, chosen):
        if i == len(trips):
            out.append(list(chosen))
            return
        if (cap is None or len(chosen) < cap) and used.isdisjoint(sets[i]):
            chosen.append(i)
            rec(i + 1, used | sets[i], chosen)
            chosen.pop()
        rec(i + 1, used, chosen)

    rec(0, set(), [])
    return out


def _lv_rv_parts(catalog):
    trips = sorted(catalog.trips, key=lambda t: (-t.profit, t.ids))
    return trips, [t for t in trips if t.kind == "F"]


def _best_rv(trips, passengers, residual, lv_served, rv_fleet):
    pool = [t for t in trips if lv_served.isdisjoint(t.ids)]
    best = -math.inf
    for sel in packings(pool, rv_fleet):
        covered = [r for i in sel for r in pool[i].ids]
        if any(covered.count(r) != 1 for r in residual):
            continue
        best = max(best, math.fsum(pool[i].profit for i in sel))
    return best


def _filter(pairs):
    return sorted((e, p) for e, p in pairs
                  if not any((e2 <= e and p2 >= p) and (e2 < e or p2 > p) for e2, p2 in pairs))


def brute_force_epsilon_frontier(catalog, passengers, parcels, rv_fleet):
    """Epsilon-constraint frontier with every sub-problem solved by enumeration.

    Returns (collected pairs, non-dominated pairs).
    """
    trips, tf = _lv_rv_parts(catalog)
    parcels = set(parcels)
    lv_options = packings(tf)
    covers = [len(s) for s in lv_options
              if sorted(r for i in s for r in tf[i].ids) == sorted(parcels)]
    if not covers:
        raise ValueError("parcels cannot be partitioned by parcel trips")
    eps = min(covers)
    collected = []
    while eps >= 0:
        best, pick = -math.inf, None
        for sel in lv_options:
            if len(sel) > eps:
                continue
            v = math.fsum(tf[i].profit for i in sel)
            if v > best + 1e-9:
                best, pick = v, sel
        served = {r for i in pick for r in tf[i].ids}
        phi = _best_rv(trips, passengers, parcels - served, served, rv_fleet)
        if phi == -math.inf:
            break
        collected.append((eps, phi))
        eps -= 1
    return collected, _filter(collected)


def brute_force_true_frontier(catalog, passengers, parcels, rv_fleet):
    """Pareto set over every (LV selection, RV selection) covering all parcels."""
    trips, tf = _lv_rv_parts(catalog)
    parcels = set(parcels)
    by_size: dict[int, float] = {}
    cache: dict[frozenset, float] = {}
    for sel in packings(tf):
        served = frozenset(r for i in sel for r in tf[i].ids)
        if served not in cache:
            cache[served] = _best_rv(trips, passengers, parcels - served, set(served), rv_fleet)
        phi = cache[served]
        if phi > -math.inf:
            by_size[len(sel)] = max(by_size.get(len(sel), -math.inf), phi)
    return _filter(list(by_size.items()))
