"""Level-wise enumeration of every feasible trip.

Three modes produce the same catalog:

``direct``  every subset of each size is solved until a size yields nothing;
``alg1``    each trip of size l is extended by every request it lacks;
``alg2``    each trip is extended only by requests ranked above its highest
            member, which still reaches every feasible set exactly once.

In ``alg1`` and ``alg2`` a candidate whose l-subsets are not all feasible is
rejected without solving a route (an infeasible set has no feasible
superset). Candidate counts follow each mode's own generation rule; ``alg1``
counts distinct sets, so counts satisfy alg2 <= alg1 <= direct.

Within a level, route solves are sharded statically across worker
processes; the level barrier is the only synchronization point.
"""

from __future__ import annotations

import json
import logging
import multiprocessing as mp
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from itertools import combinations
from pathlib import Path

from sarprl.demand import CostParams, Request, ServiceParams
from sarprl.errors import InstanceTooLarge
from sarprl.network import Network
from sarprl.route_opt import Route, RouteResult, optimal_order, route_from_order

log = logging.getLogger(__name__)

MODES = ("direct", "alg1", "alg2")
DIRECT_CAP = 12
ENUM_CAP = 60


@dataclass(frozen=True)
class Trip:
    ids: tuple[int, ...]
    kind: str
    profit: float
    route: Route | None = field(default=None, compare=False, repr=False)

    def __contains__(self, rid) -> bool:
        return rid in self.ids

    def to_dict(self) -> dict:
        return {"ids": list(self.ids), "kind": self.kind, "profit": self.profit,
                "route": None if self.route is None else self.route.to_dict()}


@dataclass
class TripCatalog:
    levels: dict[int, list[Trip]]
    mode: str = "alg2"
    candidates_evaluated: int = 0
    feasible_found: int = 0
    route_solves: int = 0
    level_candidates: dict[int, int] = field(default_factory=dict)
    wall_time: float = 0.0

    @property
    def trips(self) -> list[Trip]:
        return [t for l in sorted(self.levels) for t in self.levels[l]]

    @property
    def max_level(self) -> int:
        return max((l for l, ts in self.levels.items() if ts), default=0)

    def id_sets(self) -> set[tuple[int, ...]]:
        return {t.ids for t in self.trips}

    def histogram(self) -> dict[int, int]:
        return {l: len(ts) for l, ts in sorted(self.levels.items()) if ts}

    def membership(self, request_ids) -> list[list[int]]:
        """phi[r][p] = 1 when trip p (in ``trips`` order) contains request r."""
        trips = self.trips
        return [[int(r in t.ids) for t in trips] for r in request_ids]

    def stats(self) -> dict:
        return {
            "mode": self.mode,
            "candidates": self.candidates_evaluated,
            "route_solves": self.route_solves,
            "feasible": self.feasible_found,
            "max_level": self.max_level,
            "levels": {str(l): {"candidates": self.level_candidates.get(l, 0),
                                "feasible": len(self.levels.get(l, []))}
                       for l in sorted(set(self.level_candidates) | set(self.levels))},
            "wall_time_s": round(self.wall_time, 4),
        }


def trip_kind(requests) -> str:
    pax = any(r.is_passenger for r in requests)
    parcel = any(not r.is_passenger for r in requests)
    if pax and parcel:
        return "M"
    return "P" if pax else "F"


def partition(catalog: TripCatalog) -> tuple[list[Trip], list[Trip], list[Trip]]:
    out = {"P": [], "F": [], "M": []}
    for t in catalog.trips:
        out[t.kind].append(t)
    return out["P"], out["F"], out["M"]


# worker-side context, installed once per process
_CTX: dict = {}


def _install(reqs, net, sp, cp):
    _CTX.update(reqs=reqs, net=net, sp=sp, cp=cp)


def _solve_shard(shard):
    # only orders and arrival times cross the process boundary
    reqs, net, sp, cp = _CTX["reqs"], _CTX["net"], _CTX["sp"], _CTX["cp"]
    return [optimal_order([reqs[i] for i in ids], net, sp, cp) for ids in shard]


class _Evaluator:
    def __init__(self, requests, net, sp, cp, threads=1):
        self.reqs = {r.id: r for r in requests}
        self.ctx = (self.reqs, net, sp, cp)
        self.threads = max(1, int(threads))
        self.pool = None
        self.solves = 0
        if self.threads > 1:
            self.pool = ProcessPoolExecutor(self.threads, mp.get_context("fork"),
                                            initializer=_install, initargs=self.ctx)

    def solve(self, id_sets: list[tuple[int, ...]]) -> list[RouteResult]:
        self.solves += len(id_sets)
        if self.pool is None or len(id_sets) < 2 * self.threads:
            _install(*self.ctx)
            found = _solve_shard(id_sets)
        else:
            size = -(-len(id_sets) // self.threads)
            shards = [id_sets[i:i + size] for i in range(0, len(id_sets), size)]
            found = [f for part in self.pool.map(_solve_shard, shards) for f in part]
        reqs, net, _, cp = self.ctx
        return [RouteResult(False) if f is None
                else route_from_order([reqs[i] for i in ids], *f, net, cp)
                for ids, f in zip(id_sets, found)]

    def close(self):
        if self.pool is not None:
            self.pool.shutdown()


def _make_trips(evaluator, id_sets):
    trips = []
    for ids, res in zip(id_sets, evaluator.solve(id_sets)):
        if res.feasible:
            kind = trip_kind(evaluator.reqs[i] for i in ids)
            trips.append(Trip(ids, kind, res.profit, res.route))
    return trips


def _closed(ids, known) -> bool:
    return all(ids[:k] + ids[k + 1:] in known for k in range(len(ids)))


def _alg2_candidates(level, rank, order):
    out = []
    for p in level:
        top = max(rank[i] for i in p.ids)
        for j in range(top + 1, len(order)):
            out.append(p.ids + (order[j],))
    return out


def _alg1_candidates(level, order):
    out = set()
    for p in level:
        members = set(p.ids)
        for rid in order:
            if rid not in members:
                out.add(tuple(sorted(members | {rid})))
    return sorted(out)


def next_level(level: list[Trip], requests, net: Network, sp: ServiceParams,
               cp: CostParams, _evaluator=None) -> list[Trip]:
    """Feasible (l+1)-trips grown from ``level`` by higher-ranked requests only."""
    trips, _ = _grow(level, sorted(r.id for r in requests), "alg2", net, sp, cp,
                     _evaluator or _Evaluator(requests, net, sp, cp))
    return trips


def _grow(level, order, mode, net, sp, cp, ev):
    rank = {rid: k for k, rid in enumerate(order)}
    if mode == "alg2":
        cands = _alg2_candidates(level, rank, order)
    else:
        cands = _alg1_candidates(level, order)
    known = {t.ids for t in level}
    to_solve = [c for c in cands if _closed(c, known)]
    return _make_trips(ev, to_solve), len(cands)


def enumerate_all(requests, net: Network, sp: ServiceParams, cp: CostParams,
                  mode: str = "alg2", threads: int = 1,
                  enforce_caps: bool = True) -> TripCatalog:
    if mode not in MODES:
        raise ValueError(f"unknown mode {mode!r}; expected one of {MODES}")
    requests = sorted(requests, key=lambda r: r.id)
    n = len(requests)
    if len({r.id for r in requests}) != n:
        raise ValueError("request ids must be unique")
    if enforce_caps:
        cap = DIRECT_CAP if mode == "direct" else ENUM_CAP
        if n > cap:
            raise InstanceTooLarge(f"{mode} enumeration is capped at {cap} requests, got {n}")
    order = [r.id for r in requests]
    start = time.perf_counter()
    ev = _Evaluator(requests, net, sp, cp, threads)
    cat = TripCatalog({}, mode)
    try:
        singles = [(rid,) for rid in order]
        level = _make_trips(ev, singles)
        l = 1
        cat.level_candidates[1] = len(singles)
        while level:
            level = sorted(level, key=lambda t: t.ids)
            cat.levels[l] = level
            if l == n:
                break
            if mode == "direct":
                cands = list(combinations(order, l + 1))
                nxt = _make_trips(ev, cands)
                count = len(cands)
            else:
                nxt, count = _grow(level, order, mode, net, sp, cp, ev)
            cat.level_candidates[l + 1] = count
            level = nxt
            l += 1
    finally:
        ev.close()
    cat.candidates_evaluated = sum(cat.level_candidates.values())
    cat.feasible_found = sum(len(ts) for ts in cat.levels.values())
    cat.route_solves = ev.solves
    cat.wall_time = time.perf_counter() - start
    log.info("%s enumeration: %d candidates, %d solves, %d trips",
             mode, cat.candidates_evaluated, cat.route_solves, cat.feasible_found)
    return cat


def dump_catalog(catalog: TripCatalog) -> str:
    return "".join(json.dumps(t.to_dict(), sort_keys=True) + "\n" for t in catalog.trips)


def load_catalog(path, requests=None) -> TripCatalog:
    """Read a JSON-lines catalog; routes are rebuilt only when ``requests`` is given."""
    reqs = None if requests is None else {r.id: r for r in requests}
    levels: dict[int, list[Trip]] = {}
    with open(Path(path)) as fh:
        for lineno, line in enumerate(fh, 1):
            if not line.strip():
                continue
            try:
                d = json.loads(line)
                ids = tuple(sorted(int(i) for i in d["ids"]))
                route = None
                if reqs is not None and d.get("route") is not None:
                    route = Route.from_dict(d["route"], reqs)
                trip = Trip(ids, d["kind"], float(d["profit"]), route)
            except (KeyError, ValueError, TypeError) as exc:
                raise ValueError(f"{path}:{lineno}: bad trip record ({exc})") from None
            levels.setdefault(len(ids), []).append(trip)
    for l in levels:
        levels[l].sort(key=lambda t: t.ids)
    cat = TripCatalog(levels, "loaded")
    cat.feasible_found = sum(len(v) for v in levels.values())
    return cat
