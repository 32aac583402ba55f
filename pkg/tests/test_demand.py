import json

import pytest

from sarprl.demand import (
    PARCEL,
    PASSENGER,
    PATTERNS,
    Request,
    RequestFormatError,
    ScenarioSpec,
    ServiceParams,
    cluster_region,
    dump_requests,
    generate_scenario,
    load_requests,
    load_scenario,
)


def test_full_scale_scenario_counts():
    spec = ScenarioSpec("SS", 76, 24, seed=0)
    reqs = generate_scenario(spec)
    assert spec.name == "SS-76-24-0"
    assert len(reqs) == 100
    assert sum(r.kind == PASSENGER for r in reqs) == 76
    assert sum(r.kind == PARCEL for r in reqs) == 24
    assert [r.id for r in reqs] == list(range(1, 101))


def test_empty_scenario():
    assert generate_scenario(ScenarioSpec(n_passengers=0, n_parcels=0)) == []


@pytest.mark.parametrize("pattern", PATTERNS)
def test_generation_is_deterministic(pattern):
    spec = ScenarioSpec(pattern, 10, 5, seed=3)
    assert dump_requests(generate_scenario(spec)) == dump_requests(generate_scenario(spec))
    other = dump_requests(generate_scenario(spec.replace(seed=4)))
    assert other != dump_requests(generate_scenario(spec))


def test_derived_times():
    spec = ScenarioSpec("SS", 10, 10, seed=1)
    sp, net = spec.service, spec.network
    for r in generate_scenario(spec):
        assert r.earliest_arrival(net) == r.submit_time + net.travel_time(r.origin, r.destination)
        assert r.latest_pickup(sp) == r.submit_time + sp.sigma
        assert 0 <= r.submit_time <= spec.horizon
        assert r.load == sp.load_of(r.kind)


def test_cluster_patterns_geometry():
    spec = ScenarioSpec("SC_South", 5, 30, seed=2)
    net = spec.network
    lo, hi = net.y_range()
    south = set(cluster_region(net, "South"))
    parcels = [r for r in generate_scenario(spec) if r.kind == PARCEL]
    for r in parcels:
        assert r.destination in south
        assert net.location(r.destination).y <= lo + 0.2 * (hi - lo) + 1e-9
    spec = ScenarioSpec("CS_North", 5, 30, seed=2)
    for r in generate_scenario(spec):
        if r.kind == PARCEL:
            assert net.location(r.origin).y >= hi - 0.2 * (hi - lo) - 1e-9


def test_service_params_validation():
    with pytest.raises(ValueError):
        ServiceParams(Q=8)
    with pytest.raises(ValueError):
        ServiceParams(sigma=-1)


def test_request_validation():
    with pytest.raises(ValueError):
        Request(1, PASSENGER, 3, 3, 0.0, 4)
    with pytest.raises(ValueError):
        Request(1, PASSENGER, 3, 4, -1.0, 4)


def _write(tmp_path, records):
    p = tmp_path / "reqs.json"
    p.write_text(json.dumps(records))
    return p


def test_load_requests(tmp_path):
    recs = [{"id": i, "kind": "passenger" if i < 3 else "parcel", "origin": i, "destination": i + 1,
             "submit_time": 1.5 * i} for i in (1, 2, 3)]
    reqs = load_requests(_write(tmp_path, recs))
    assert len(reqs) == 3
    assert reqs[2].load == ServiceParams().q_parcel
    assert load_requests(_write(tmp_path, [])) == []


def test_load_requests_names_bad_record(tmp_path):
    recs = [{"id": 1, "kind": "passenger", "origin": 2, "destination": 3, "submit_time": 0},
            {"id": 7, "kind": "parcel", "origin": 4, "destination": 4, "submit_time": 0}]
    with pytest.raises(RequestFormatError, match=r"record 1 \(id=7\).*origin equals destination"):
        load_requests(_write(tmp_path, recs))


def test_dump_then_load_roundtrip(tmp_path):
    spec = ScenarioSpec("CS_South", 6, 4, seed=9)
    reqs = generate_scenario(spec)
    p = tmp_path / "r.json"
    p.write_text(dump_requests(reqs))
    assert load_requests(p, spec.service, spec.network) == reqs


def test_scenario_configs(tmp_path):
    toml = tmp_path / "s.toml"
    toml.write_text('pattern = "SC_North"\nn_passengers = 4\nn_parcels = 2\nseed = 5\n'
                    '[network]\nnx = 4\nny = 10\nspacing_km = 0.5\n[costs]\ngamma2 = 1.8\n')
    spec = load_scenario(toml)
    assert spec.name == "SC_North-4-2-5"
    assert spec.costs.gamma2 == 1.8
    assert len(spec.network.locations) == 40
    js = tmp_path / "s.json"
    js.write_text(json.dumps(spec.to_dict()))
    again = load_scenario(js)
    assert generate_scenario(again) == generate_scenario(spec)
