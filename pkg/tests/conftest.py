import pytest

from sarprl.demand import PARCEL, PASSENGER, CostParams, Request, ScenarioSpec, ServiceParams
from sarprl.network import grid_network


@pytest.fixture
def sp():
    return ServiceParams()


@pytest.fixture
def cp():
    return CostParams()


@pytest.fixture
def line():
    """Eleven locations on a line, 1 km apart (ids 0..10, x = id)."""
    return grid_network(11, 1, 1.0)


def passenger(i, o, d, t, sp=ServiceParams()):
    return Request(i, PASSENGER, o, d, t, sp.q_passenger)


def parcel(i, o, d, t, sp=ServiceParams()):
    return Request(i, PARCEL, o, d, t, sp.q_parcel)


@pytest.fixture
def small_spec():
    """Dense 10-request instance: 7 passengers, 3 parcels on a 4x8 grid."""
    return ScenarioSpec(n_passengers=7, n_parcels=3, seed=0, network=grid_network(4, 8, 0.5),
                        horizon=30, rv_fleet=2)
