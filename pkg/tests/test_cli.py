import json

import pytest

from sarprl.cli import EXIT_CAP, EXIT_INPUT, EXIT_MISSING, EXIT_USAGE, main
from sarprl.demand import load_requests, load_scenario
from sarprl.report import parse_report, parse_sweep
from sarprl.trip_enum import load_catalog

SMALL = ["--passengers", "6", "--parcels", "3", "--seed", "1"]


@pytest.fixture
def scen(tmp_path):
    p = tmp_path / "scen.json"
    p.write_text(json.dumps({"n_passengers": 7, "n_parcels": 3, "seed": 2, "horizon": 30,
                             "rv_fleet": 2, "network": {"nx": 4, "ny": 8, "spacing_km": 0.5}}))
    return p


def test_generate(tmp_path):
    out = tmp_path / "r.json"
    assert main(["generate", "--pattern", "SS", "--passengers", "19", "--parcels", "6",
                 "--seed", "0", "--out", str(out)]) == 0
    reqs = load_requests(out)
    assert len(reqs) == 25
    assert sum(r.is_passenger for r in reqs) == 19


def test_enumerate_and_assign(tmp_path, scen, capsys):
    cat = tmp_path / "c.jsonl"
    stats = tmp_path / "s.json"
    assert main(["enumerate", "--scenario", str(scen), "--out", str(cat), "--stats", str(stats)]) == 0
    s = json.loads(stats.read_text())
    assert s["feasible"] == len(load_catalog(cat).trips)
    assert set(s) >= {"candidates", "feasible", "wall_time_s", "levels"}
    prog = tmp_path / "p.json"
    prog.write_text(json.dumps({"program": "min_lv_fleet"}))
    out = tmp_path / "sol.json"
    assert main(["assign", "--scenario", str(scen), "--catalog", str(cat), "--program", str(prog),
                 "--out", str(out)]) == 0
    sol = json.loads(out.read_text())
    assert sol["feasible"] and sol["objective"] == len(sol["selected"])
    prog.write_text(json.dumps({"program": "max_rv_profit", "rv_fleet": 2, "lv_served": []}))
    assert main(["assign", "--scenario", str(scen), "--catalog", str(cat), "--program", str(prog),
                 "--out", str(out)]) == 0
    prog.write_text(json.dumps({"objective": "count-min", "kinds": ["F"],
                                "coverage": {"8": "exact", "9": "exact", "10": "exact"}}))
    assert main(["assign", "--scenario", str(scen), "--catalog", str(cat), "--program", str(prog),
                 "--out", str(out)]) == 0


def test_route(tmp_path, scen):
    out = tmp_path / "route.json"
    assert main(["route", "--scenario", str(scen), "--ids", "1", "--out", str(out)]) == 0
    d = json.loads(out.read_text())
    assert d["feasible"] and len(d["route"]["stops"]) == 2
    assert main(["route", "--scenario", str(scen), "--ids", "99"]) == EXIT_INPUT


def test_pareto_and_sweep(tmp_path, scen):
    fr, rep = tmp_path / "f.json", tmp_path / "r.csv"
    assert main(["pareto", "--scenario", str(scen), "--rvs", "3", "--out", str(fr),
                 "--report", str(rep)]) == 0
    doc = json.loads(fr.read_text())
    assert doc["rv_fleet"] == 3 and doc["frontier"]
    assert parse_report(rep.read_text())[0].rvs == 3
    sw = tmp_path / "sw.csv"
    assert main(["sweep", "--scenario", str(scen), "--param", "gamma2", "--values", "0.6,1.2",
                 "--seeds", "0-1", "--out", str(sw)]) == 0
    rows = parse_sweep(sw.read_text())
    assert len(rows) == 6 and rows[2]["seed"] == "mean"


def test_runs_are_byte_identical(tmp_path, scen):
    outs = []
    for k in range(2):
        d = tmp_path / str(k)
        d.mkdir()
        main(["enumerate", "--scenario", str(scen), "--out", str(d / "c.jsonl"), "--stats",
              str(d / "s.json")])
        main(["pareto", "--scenario", str(scen), "--out", str(d / "f.json"), "--report",
              str(d / "r.csv")])
        outs.append([(d / n).read_bytes() for n in ("c.jsonl", "f.json", "r.csv")])
    assert outs[0] == outs[1]


def test_direct_mode_cap(tmp_path):
    rc = main(["enumerate", "--mode", "direct", "--passengers", "10", "--parcels", "3",
               "--out", str(tmp_path / "c.jsonl")])
    assert rc == EXIT_CAP


def test_error_codes(tmp_path, capsys):
    assert main(["pareto", "--scenario", str(tmp_path / "missing.json")]) == EXIT_MISSING
    bad = tmp_path / "bad.json"
    bad.write_text('[{"id": 1, "kind": "passenger", "origin": 2, "destination": 2, "submit_time": 0}]')
    assert main(["enumerate", "--requests", str(bad)]) == EXIT_INPUT
    assert "record 0" in capsys.readouterr().err
    with pytest.raises(SystemExit) as exc:
        main(["enumerate", "--mode", "fastest"])
    assert exc.value.code == EXIT_USAGE


def test_scenario_out_is_reloadable(tmp_path):
    s = tmp_path / "s.json"
    assert main(["generate", *SMALL, "--out", str(tmp_path / "r.json"),
                 "--scenario-out", str(s)]) == 0
    assert load_scenario(s).name == "SS-6-3-1"


def test_verify(capsys):
    assert main(["verify"]) == 0
    out = capsys.readouterr().out
    assert out.count("PASS") == 4 and "FAIL" not in out
