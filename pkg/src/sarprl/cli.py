"""Command-line entry point: ``sarprl <subcommand> ...``."""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from sarprl.assignment import (
    AT_MOST,
    COUNT_MIN,
    EXACT,
    SelectionProgram,
    check_solution,
    max_lv_utility,
    max_rv_profit,
    min_lv_fleet,
    rv_candidates,
    solve_selection,
)
from sarprl.demand import (
    PATTERNS,
    RequestFormatError,
    ScenarioSpec,
    dump_requests,
    generate_scenario,
    load_requests,
    load_scenario,
)
from sarprl.errors import InstanceTooLarge
from sarprl.network import load_network
from sarprl.pipeline import SWEEP_PARAMS, run_scenario, solve_instance, sweep
from sarprl.report import dump_frontier, render_report, render_sweep, render_text, row_from_result
from sarprl.route_opt import optimal_route
from sarprl.trip_enum import MODES, dump_catalog, enumerate_all, load_catalog, partition

log = logging.getLogger("sarprl")

EXIT_FAILURE = 1
EXIT_USAGE = 2
EXIT_MISSING = 3
EXIT_CAP = 4
EXIT_INPUT = 5


def _write(text: str, path: str | None) -> None:
    if path in (None, "-"):
        sys.stdout.write(text)
    else:
        Path(path).parent.mkdir(parents=True, exist_ok=True)
        Path(path).write_text(text)


def _scenario(args) -> ScenarioSpec:
    spec = load_scenario(args.scenario) if getattr(args, "scenario", None) else ScenarioSpec()
    changes = {}
    for flag, key in (("pattern", "pattern"), ("passengers", "n_passengers"),
                      ("parcels", "n_parcels"), ("seed", "seed"), ("horizon", "horizon"),
                      ("rvs", "rv_fleet")):
        value = getattr(args, flag, None)
        if value is not None:
            changes[key] = value
    if getattr(args, "network", None):
        changes["network"] = load_network(args.network)
    return spec.replace(**changes) if changes else spec


def _requests(args, spec: ScenarioSpec):
    if getattr(args, "requests", None):
        return load_requests(args.requests, spec.service, spec.network)
    return generate_scenario(spec)


def cmd_generate(args) -> int:
    spec = _scenario(args)
    _write(dump_requests(generate_scenario(spec)), args.out)
    if args.scenario_out:
        _write(json.dumps(spec.to_dict(), indent=1) + "\n", args.scenario_out)
    return 0


def cmd_route(args) -> int:
    spec = _scenario(args)
    reqs = {r.id: r for r in _requests(args, spec)}
    ids = [int(x) for x in args.ids.split(",")]
    unknown = [i for i in ids if i not in reqs]
    if unknown:
        raise RequestFormatError(f"unknown request ids {unknown}")
    res = optimal_route([reqs[i] for i in ids], spec.network, spec.service, spec.costs)
    out = {"ids": sorted(ids), "feasible": res.feasible, "profit": res.profit,
           "route": res.route.to_dict() if res.route else None}
    _write(json.dumps(out, indent=1) + "\n", args.out)
    return 0


def cmd_enumerate(args) -> int:
    spec = _scenario(args)
    reqs = _requests(args, spec)
    cat = enumerate_all(reqs, spec.network, spec.service, spec.costs, args.mode, args.threads)
    _write(dump_catalog(cat), args.out)
    stats = dict(cat.stats(), requests=len(reqs))
    text = json.dumps(stats, indent=1, sort_keys=True) + "\n"
    if args.stats:
        _write(text, args.stats)
    elif args.out not in (None, "-"):
        sys.stdout.write(text)
    return 0


def cmd_assign(args) -> int:
    spec = _scenario(args)
    reqs = _requests(args, spec)
    cat = load_catalog(args.catalog)
    with open(args.program) as fh:
        prog = json.load(fh)
    passengers = [r.id for r in reqs if r.is_passenger]
    parcels = [r.id for r in reqs if not r.is_passenger]
    tp, tf, tm = partition(cat)
    name = prog.get("program")
    if name == "min_lv_fleet":
        _, sol = min_lv_fleet(tf, parcels)
    elif name == "max_lv_utility":
        sol = max_lv_utility(tf, parcels, int(prog["epsilon"]))
    elif name == "max_rv_profit":
        served = set(prog.get("lv_served", []))
        sol = max_rv_profit(rv_candidates((tp, tf, tm), served), passengers,
                            [r for r in parcels if r not in served], int(prog["rv_fleet"]))
    elif name in (None, "custom"):
        kinds = set(prog.get("kinds", ["P", "F", "M"]))
        program = SelectionProgram(
            [t for t in cat.trips if t.kind in kinds], prog.get("objective", "profit-max"),
            {int(k): v for k, v in prog.get("coverage", {}).items()}, prog.get("cap"))
        sol = solve_selection(program)
        check_solution(program, sol)
    else:
        raise RequestFormatError(f"unknown program {name!r}")
    _write(json.dumps(sol.to_dict(), indent=1) + "\n", args.out)
    return 0


def cmd_pareto(args) -> int:
    spec = _scenario(args)
    reqs = _requests(args, spec)
    catalog = load_catalog(args.catalog) if args.catalog else None
    result = solve_instance(reqs, spec.network, spec.service, spec.costs, spec.rv_fleet,
                            args.mode, args.threads, catalog, spec.name)
    _write(dump_frontier(result), args.out)
    row = row_from_result(spec.seed, result)
    if args.report:
        _write(render_report([row]), args.report)
    if args.out not in (None, "-"):
        sys.stdout.write(render_text([row]))
    return 0


def _seeds(text: str) -> list[int]:
    out = []
    for part in text.split(","):
        if "-" in part:
            a, b = part.split("-")
            out.extend(range(int(a), int(b) + 1))
        else:
            out.append(int(part))
    return out


def cmd_sweep(args) -> int:
    spec = _scenario(args)
    rows = sweep(args.param, args.values.split(","), spec, _seeds(args.seeds),
                 args.workers, args.mode)
    _write(render_sweep(rows), args.out)
    return 0


def cmd_verify(args) -> int:
    from sarprl.verify import run_all

    results = run_all(seed=args.seed)
    for name, ok, detail in results:
        print(f"{'PASS' if ok else 'FAIL'}  {name}: {detail}")
    return 0 if all(ok for _, ok, _ in results) else EXIT_FAILURE


def _scenario_flags(p, with_requests=True):
    p.add_argument("--scenario", help="scenario config (JSON or TOML)")
    p.add_argument("--network", help="network JSON overriding the scenario's")
    p.add_argument("--pattern", choices=PATTERNS)
    p.add_argument("--passengers", type=int)
    p.add_argument("--parcels", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--horizon", type=float)
    if with_requests:
        p.add_argument("--requests", help="request JSON instead of generating from the scenario")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="sarprl", description=__doc__)
    ap.add_argument("--log-level", default="WARNING")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate", help="draw a seeded request set")
    _scenario_flags(p, with_requests=False)
    p.add_argument("--out", help="request JSON path (default stdout)")
    p.add_argument("--scenario-out", help="also write the resolved scenario config")
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("route", help="optimal route for a set of request ids")
    _scenario_flags(p)
    p.add_argument("--ids", required=True, help="comma-separated request ids")
    p.add_argument("--out")
    p.set_defaults(func=cmd_route)

    p = sub.add_parser("enumerate", help="build the feasible trip catalog")
    _scenario_flags(p)
    p.add_argument("--mode", choices=MODES, default="alg2")
    p.add_argument("--threads", type=int, default=1)
    p.add_argument("--out", help="catalog JSON-lines path (default stdout)")
    p.add_argument("--stats", help="stats JSON path")
    p.set_defaults(func=cmd_enumerate)

    p = sub.add_parser("assign", help="solve one selection program over a catalog")
    _scenario_flags(p)
    p.add_argument("--catalog", required=True)
    p.add_argument("--program", required=True, help="program descriptor JSON")
    p.add_argument("--out")
    p.set_defaults(func=cmd_assign)

    p = sub.add_parser("pareto", help="epsilon-constraint frontier plus benchmarks")
    _scenario_flags(p)
    p.add_argument("--rvs", type=int, help="RV fleet size")
    p.add_argument("--mode", choices=MODES, default="alg2")
    p.add_argument("--threads", type=int, default=1)
    p.add_argument("--catalog", help="reuse a saved catalog")
    p.add_argument("--out", help="frontier JSON path (default stdout)")
    p.add_argument("--report", help="comparison table CSV path")
    p.set_defaults(func=cmd_pareto)

    p = sub.add_parser("sweep", help="re-run the pipeline over parameter values and seeds")
    _scenario_flags(p, with_requests=False)
    p.add_argument("--rvs", type=int)
    p.add_argument("--param", choices=SWEEP_PARAMS, required=True)
    p.add_argument("--values", required=True, help="comma-separated; ratios as 19:6")
    p.add_argument("--seeds", default="0-7")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--mode", choices=MODES, default="alg2")
    p.add_argument("--out", help="CSV path (default stdout)")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("verify", help="oracle-equivalence suites on a small built-in instance")
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_verify)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    logging.basicConfig(level=args.log_level.upper(), format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_MISSING
    except InstanceTooLarge as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CAP
    except (RequestFormatError, ValueError, KeyError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
