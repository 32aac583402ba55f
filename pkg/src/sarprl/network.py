"""Travel distances and times between stops.

Two metrics are supported: a rectilinear grid, where each location carries
coordinates in kilometers, and an explicit distance matrix ingested from a
file (not necessarily symmetric). Times are minutes at a constant speed.
"""

from __future__ import annotations

import json
import logging
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from scipy.sparse.csgraph import shortest_path

log = logging.getLogger(__name__)


class UnknownLocation(KeyError):
    pass


@dataclass(frozen=True)
class Location:
    id: int
    x: float = 0.0
    y: float = 0.0


@dataclass
class Network:
    """Immutable after construction.

    ``matrix`` holds kilometers indexed by position in ``locations``.
    """

    locations: list[Location]
    metric: str = "grid"
    speed_kmh: float = 30.0
    matrix: np.ndarray | None = None
    _index: dict[int, int] = field(init=False, repr=False)
    _lower: np.ndarray | None = field(init=False, repr=False, default=None)
    _xy: tuple = field(init=False, repr=False, default=())

    def __post_init__(self):
        if self.metric not in ("grid", "matrix"):
            raise ValueError(f"unknown metric {self.metric!r}")
        if not self.speed_kmh > 0:
            raise ValueError("speed_kmh must be positive")
        self._index = {}
        for pos, loc in enumerate(self.locations):
            if loc.id in self._index:
                raise ValueError(f"duplicate location id {loc.id}")
            if not (math.isfinite(loc.x) and math.isfinite(loc.y)):
                raise ValueError(f"location {loc.id} has non-finite coordinates")
            self._index[loc.id] = pos
        self._xy = (np.array([l.x for l in self.locations], dtype=float),
                    np.array([l.y for l in self.locations], dtype=float))
        if self.metric == "matrix":
            if self.matrix is None:
                raise ValueError("matrix mode requires a distance matrix")
            m = np.asarray(self.matrix, dtype=float)
            n = len(self.locations)
            if m.shape != (n, n):
                raise ValueError(f"matrix shape {m.shape} does not match {n} locations")
            if not np.all(np.isfinite(m)) or np.any(m < 0):
                raise ValueError("matrix distances must be finite and non-negative")
            if np.any(np.diag(m) != 0):
                raise ValueError("matrix diagonal must be zero")
            self.matrix = m
            # shortest-path closure: admissible lower bounds for pruning
            self._lower = shortest_path(m, method="FW", directed=True)
            if np.any(self._lower < m - 1e-9):
                log.warning(
                    "distance matrix violates the triangle inequality; "
                    "trip enumeration assumes shortest-path distances"
                )

    @property
    def ids(self) -> list[int]:
        return [loc.id for loc in self.locations]

    def location(self, i: int) -> Location:
        try:
            return self.locations[self._index[i]]
        except KeyError:
            raise UnknownLocation(f"unknown location {i}") from None

    def __contains__(self, i) -> bool:
        return i in self._index

    def _pos(self, i: int) -> int:
        try:
            return self._index[i]
        except KeyError:
            raise UnknownLocation(f"unknown location {i}") from None

    def travel_distance(self, i: int, j: int) -> float:
        """Kilometers from ``i`` to ``j``."""
        a, b = self._pos(i), self._pos(j)
        if self.metric == "matrix":
            return float(self.matrix[a, b])
        la, lb = self.locations[a], self.locations[b]
        return abs(la.x - lb.x) + abs(la.y - lb.y)

    def travel_time(self, i: int, j: int) -> float:
        """Minutes from ``i`` to ``j`` at ``speed_kmh``."""
        return self.travel_distance(i, j) / self.speed_kmh * 60.0

    def distance_lower_bound(self, i: int, j: int) -> float:
        """Shortest chain length from ``i`` to ``j`` through any locations."""
        if self._lower is None:
            return self.travel_distance(i, j)
        return float(self._lower[self._pos(i), self._pos(j)])

    def distance_table(self, ids, lower: bool = False) -> list[list[float]]:
        """Pairwise distances (or lower bounds) among ``ids`` as nested lists."""
        pos = np.fromiter((self._pos(i) for i in ids), dtype=np.intp)
        if self.metric == "matrix":
            m = self._lower if lower else self.matrix
            return m[np.ix_(pos, pos)].tolist()
        xs, ys = self._xy[0][pos], self._xy[1][pos]
        return (np.abs(xs[:, None] - xs[None, :]) + np.abs(ys[:, None] - ys[None, :])).tolist()

    def y_range(self) -> tuple[float, float]:
        ys = [loc.y for loc in self.locations]
        return min(ys), max(ys)

    def to_dict(self) -> dict:
        d = {
            "mode": self.metric,
            "speed_kmh": self.speed_kmh,
            "locations": [{"id": l.id, "x": l.x, "y": l.y} for l in self.locations],
        }
        if self.metric == "matrix":
            d["matrix"] = self.matrix.tolist()
        return d


def travel_distance(net: Network, i: int, j: int) -> float:
    return net.travel_distance(i, j)


def travel_time(net: Network, i: int, j: int) -> float:
    return net.travel_time(i, j)


def grid_network(nx: int = 8, ny: int = 40, spacing_km: float = 0.5,
                 speed_kmh: float = 30.0) -> Network:
    """Rectangular lattice of ``nx`` by ``ny`` intersections, ids row-major from 0."""
    if nx < 1 or ny < 1:
        raise ValueError("grid needs at least one row and column")
    locs = [Location(j * nx + i, i * spacing_km, j * spacing_km)
            for j in range(ny) for i in range(nx)]
    return Network(locs, "grid", speed_kmh)


def network_from_dict(d: dict) -> Network:
    mode = d.get("mode", "grid")
    speed = float(d.get("speed_kmh", 30.0))
    if "locations" not in d and mode == "grid":
        return grid_network(int(d.get("nx", 8)), int(d.get("ny", 40)),
                            float(d.get("spacing_km", 0.5)), speed)
    locs = [Location(int(l["id"]), float(l.get("x", 0.0)), float(l.get("y", 0.0)))
            for l in d["locations"]]
    matrix = d.get("matrix")
    if mode == "matrix" and matrix is None:
        raise ValueError("matrix mode requires a 'matrix' entry")
    return Network(locs, mode, speed, None if matrix is None else np.asarray(matrix, float))


def load_network(path) -> Network:
    with open(Path(path)) as fh:
        return network_from_dict(json.load(fh))
