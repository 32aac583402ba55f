"""Requests, service/cost parameters and seeded scenario generation.

Scenarios draw from numpy's Philox4x64 counter-based generator
(``np.random.Generator(np.random.Philox(seed))``). Draw order is fixed:
for every passenger then every parcel, in id order, one integer for the
origin, integers for the destination until it differs from the origin,
then one uniform submission time on ``[0, horizon)``.

Parcel submission times follow the same uniform law as passengers; no
empirical distribution is assumed.
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path

import numpy as np

from sarprl.network import Network, grid_network, load_network, network_from_dict

PASSENGER = "passenger"
PARCEL = "parcel"
PATTERNS = ("SS", "SC_South", "SC_North", "CS_South", "CS_North")
CLUSTER_BAND = 0.2


class RequestFormatError(ValueError):
    pass


@dataclass(frozen=True)
class ServiceParams:
    sigma: float = 5.0
    delta_P: float = 10.0
    delta_F: float = 15.0
    eta: int = 2
    Q: float = 6.0
    q_passenger: float = 4.0
    q_parcel: float = 1.0

    def __post_init__(self):
        for f in fields(self):
            if getattr(self, f.name) < 0:
                raise ValueError(f"{f.name} must be non-negative")
        # passenger-passenger sharing is excluded through capacity alone
        if not self.Q < 2 * self.q_passenger:
            raise ValueError("capacity must be below two passenger loads")

    def load_of(self, kind: str) -> float:
        return self.q_passenger if kind == PASSENGER else self.q_parcel


@dataclass(frozen=True)
class CostParams:
    alpha: float = 5.0
    beta: float = 3.0
    gamma1: float = 2.4
    gamma2: float = 1.2
    gamma3: float = 0.6
    gamma4: float = 0.5

    def __post_init__(self):
        for f in fields(self):
            if getattr(self, f.name) < 0:
                raise ValueError(f"{f.name} must be non-negative")


@dataclass(frozen=True)
class Request:
    id: int
    kind: str
    origin: int
    destination: int
    submit_time: float
    load: float

    def __post_init__(self):
        if self.kind not in (PASSENGER, PARCEL):
            raise ValueError(f"request {self.id}: unknown kind {self.kind!r}")
        if self.origin == self.destination:
            raise ValueError(f"request {self.id}: origin equals destination")
        if not (math.isfinite(self.submit_time) and self.submit_time >= 0):
            raise ValueError(f"request {self.id}: submit_time must be >= 0")
        if self.load < 0:
            raise ValueError(f"request {self.id}: negative load")

    @property
    def is_passenger(self) -> bool:
        return self.kind == PASSENGER

    def latest_pickup(self, sp: ServiceParams) -> float:
        return self.submit_time + sp.sigma

    def earliest_arrival(self, net: Network) -> float:
        return self.submit_time + net.travel_time(self.origin, self.destination)

    def max_delay(self, sp: ServiceParams) -> float:
        return sp.delta_P if self.is_passenger else sp.delta_F

    def to_dict(self) -> dict:
        return {
            "id": self.id,
            "kind": self.kind,
            "origin": self.origin,
            "destination": self.destination,
            "submit_time": self.submit_time,
        }


@dataclass
class ScenarioSpec:
    pattern: str = "SS"
    n_passengers: int = 19
    n_parcels: int = 6
    seed: int = 0
    horizon: float = 60.0
    network: Network = field(default_factory=grid_network)
    service: ServiceParams = field(default_factory=ServiceParams)
    costs: CostParams = field(default_factory=CostParams)
    rv_fleet: int = 3

    def __post_init__(self):
        if self.pattern not in PATTERNS:
            raise ValueError(f"unknown pattern {self.pattern!r}; expected one of {PATTERNS}")
        if self.n_passengers < 0 or self.n_parcels < 0:
            raise ValueError("request counts must be non-negative")
        if not self.horizon > 0:
            raise ValueError("horizon must be positive")
        if self.rv_fleet < 0:
            raise ValueError("rv_fleet must be non-negative")

    @property
    def name(self) -> str:
        return f"{self.pattern}-{self.n_passengers}-{self.n_parcels}-{self.seed}"

    def replace(self, **changes) -> "ScenarioSpec":
        d = {f.name: getattr(self, f.name) for f in fields(self)}
        d.update(changes)
        return ScenarioSpec(**d)

    def to_dict(self) -> dict:
        return {
            "pattern": self.pattern,
            "n_passengers": self.n_passengers,
            "n_parcels": self.n_parcels,
            "seed": self.seed,
            "horizon": self.horizon,
            "rv_fleet": self.rv_fleet,
            "network": self.network.to_dict(),
            "service": asdict(self.service),
            "costs": asdict(self.costs),
        }


def cluster_region(net: Network, side: str) -> list[int]:
    """Location ids in the southern or northern 20% band of the y-range."""
    lo, hi = net.y_range()
    band = CLUSTER_BAND * (hi - lo)
    if side == "South":
        ids = [l.id for l in net.locations if l.y <= lo + band + 1e-9]
    else:
        ids = [l.id for l in net.locations if l.y >= hi - band - 1e-9]
    if not ids:
        raise ValueError(f"cluster region {side} contains no locations")
    return ids


def _pools(net: Network, pattern: str) -> tuple[list[int], list[int]]:
    everywhere = net.ids
    if pattern == "SS":
        return everywhere, everywhere
    shape, side = pattern.split("_")
    region = cluster_region(net, side)
    if shape == "SC":
        return everywhere, region
    return region, everywhere


def _draw(rng, origins: list[int], destinations: list[int], horizon: float):
    o = origins[int(rng.integers(len(origins)))]
    if len(destinations) == 1 and destinations[0] == o:
        raise ValueError("cannot draw a destination distinct from the origin")
    d = o
    while d == o:
        d = destinations[int(rng.integers(len(destinations)))]
    t = float(rng.uniform(0.0, horizon))
    return o, d, t


def generate_scenario(spec: ScenarioSpec) -> list[Request]:
    """Passengers get ids 1..n, parcels n+1..n+m."""
    net, sp = spec.network, spec.service
    if len(net.locations) < 2 and spec.n_passengers + spec.n_parcels > 0:
        raise ValueError("network needs at least two locations")
    parcel_o, parcel_d = _pools(net, spec.pattern)
    rng = np.random.Generator(np.random.Philox(spec.seed))
    out = []
    for k in range(spec.n_passengers):
        o, d, t = _draw(rng, net.ids, net.ids, spec.horizon)
        out.append(Request(k + 1, PASSENGER, o, d, t, sp.q_passenger))
    for k in range(spec.n_parcels):
        o, d, t = _draw(rng, parcel_o, parcel_d, spec.horizon)
        out.append(Request(spec.n_passengers + k + 1, PARCEL, o, d, t, sp.q_parcel))
    return out


def requests_from_list(records, sp: ServiceParams | None = None,
                       net: Network | None = None) -> list[Request]:
    sp = sp or ServiceParams()
    if not isinstance(records, list):
        raise RequestFormatError("request file must hold a JSON array")
    out, seen = [], set()
    for n, rec in enumerate(records):
        where = f"record {n}" + (f" (id={rec.get('id')})" if isinstance(rec, dict) else "")
        try:
            if not isinstance(rec, dict):
                raise ValueError("not an object")
            missing = {"id", "kind", "origin", "destination", "submit_time"} - rec.keys()
            if missing:
                raise ValueError(f"missing fields {sorted(missing)}")
            kind = rec["kind"]
            r = Request(int(rec["id"]), kind, int(rec["origin"]), int(rec["destination"]),
                        float(rec["submit_time"]), float(rec.get("load", sp.load_of(kind))))
            if r.id in seen:
                raise ValueError("duplicate id")
            if net is not None:
                for end in (r.origin, r.destination):
                    if end not in net:
                        raise ValueError(f"unknown location {end}")
        except (ValueError, TypeError) as exc:
            raise RequestFormatError(f"{where}: {exc}") from None
        seen.add(r.id)
        out.append(r)
    return sorted(out, key=lambda r: r.id)


def load_requests(path, sp: ServiceParams | None = None,
                  net: Network | None = None) -> list[Request]:
    with open(Path(path)) as fh:
        try:
            data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise RequestFormatError(f"{path}: invalid JSON ({exc})") from None
    return requests_from_list(data, sp, net)


def dump_requests(requests: list[Request]) -> str:
    return json.dumps([r.to_dict() for r in requests], indent=1) + "\n"


def scenario_from_dict(d: dict, base_dir: Path | None = None) -> ScenarioSpec:
    net_cfg = d.get("network", {})
    if isinstance(net_cfg, str):
        p = Path(net_cfg)
        if base_dir is not None and not p.is_absolute():
            p = base_dir / p
        net = load_network(p)
    else:
        net = network_from_dict(net_cfg)
    return ScenarioSpec(
        pattern=d.get("pattern", "SS"),
        n_passengers=int(d.get("n_passengers", 19)),
        n_parcels=int(d.get("n_parcels", 6)),
        seed=int(d.get("seed", 0)),
        horizon=float(d.get("horizon", 60.0)),
        network=net,
        service=ServiceParams(**d.get("service", {})),
        costs=CostParams(**d.get("costs", {})),
        rv_fleet=int(d.get("rv_fleet", 3)),
    )


def load_scenario(path) -> ScenarioSpec:
    """Read a scenario config in JSON or TOML."""
    path = Path(path)
    if path.suffix == ".toml":
        import tomli

        with open(path, "rb") as fh:
            d = tomli.load(fh)
    else:
        with open(path) as fh:
            d = json.load(fh)
    return scenario_from_dict(d, path.parent)
