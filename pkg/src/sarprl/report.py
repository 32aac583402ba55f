"""CSV/JSON persistence and the comparison table against the benchmarks."""

from __future__ import annotations

import csv
import io
import json
import re
from dataclasses import dataclass, field

from sarprl.pipeline import SWEEP_COLUMNS, InstanceResult

REPORT_COLUMNS = ["RVs", "seed", "pareto_pairs", "lv_only_fleet", "rv_only_profit",
                  "sarp_fleet", "sarp_rv_profit"]
_PAIR = re.compile(r"\(\s*([^,()]+?)\s*,\s*([^,()]+?)\s*\)")


@dataclass
class ReportRow:
    rvs: int
    seed: int | str
    pairs: list[tuple[int, float]] = field(default_factory=list)
    lv_only_fleet: int = 0
    rv_only_profit: float = 0.0
    sarp_fleet: int = 0
    sarp_rv_profit: float = 0.0


def fmt_num(x) -> str:
    """Integral values print without a fractional part; others round-trip via repr."""
    if isinstance(x, float):
        if x.is_integer():
            return str(int(x))
        return repr(x)
    return str(x)


def _parse_num(s: str):
    s = s.strip()
    try:
        return int(s)
    except ValueError:
        return float(s)


def row_from_result(seed, result: InstanceResult) -> ReportRow:
    b = result.bench
    return ReportRow(result.rv_fleet, seed, [(p.epsilon, p.phi_rv) for p in result.frontier],
                     b.lv_only_fleet, b.rv_only_profit, b.sarp_fleet, b.sarp_rv_profit)


def render_report(rows: list[ReportRow]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(REPORT_COLUMNS)
    for r in rows:
        pairs = "; ".join(f"({fmt_num(e)}, {fmt_num(p)})" for e, p in r.pairs)
        w.writerow([r.rvs, r.seed, pairs, fmt_num(r.lv_only_fleet), fmt_num(r.rv_only_profit),
                    fmt_num(r.sarp_fleet), fmt_num(r.sarp_rv_profit)])
    return buf.getvalue()


def parse_report(text: str) -> list[ReportRow]:
    reader = csv.reader(io.StringIO(text))
    header = next(reader, None)
    if header != REPORT_COLUMNS:
        raise ValueError(f"unexpected report header {header}")
    rows = []
    for rec in reader:
        pairs = [(int(a), _parse_num(b)) for a, b in _PAIR.findall(rec[2])]
        seed = rec[1]
        rows.append(ReportRow(int(rec[0]), int(seed) if seed.lstrip("-").isdigit() else seed,
                              pairs, _parse_num(rec[3]), _parse_num(rec[4]),
                              _parse_num(rec[5]), _parse_num(rec[6])))
    return rows


def render_text(rows: list[ReportRow]) -> str:
    """Fixed-width table with profits rounded to whole units."""
    head = ["RVs", "seed", "Pareto (eps, profit)", "LV-only", "RV-only", "SARP LVs",
            "SARP profit"]
    body = [[str(r.rvs), str(r.seed),
             "; ".join(f"({e}, {p:.0f})" for e, p in r.pairs),
             str(r.lv_only_fleet), f"{r.rv_only_profit:.0f}", str(r.sarp_fleet),
             f"{r.sarp_rv_profit:.0f}"] for r in rows]
    widths = [max(len(x) for x in col) for col in zip(head, *body)]
    lines = ["  ".join(x.ljust(w) for x, w in zip(line, widths)).rstrip()
             for line in [head] + body]
    return "\n".join(lines) + "\n"


def render_sweep(rows: list[dict]) -> str:
    buf = io.StringIO()
    w = csv.DictWriter(buf, SWEEP_COLUMNS, lineterminator="\n")
    w.writeheader()
    for r in rows:
        w.writerow({k: fmt_num(v) for k, v in r.items()})
    return buf.getvalue()


def parse_sweep(text: str) -> list[dict]:
    out = []
    for rec in csv.DictReader(io.StringIO(text)):
        row = {}
        for k, v in rec.items():
            if k in ("param", "value") or v == "" or k == "seed" and v == "mean":
                row[k] = v
            else:
                row[k] = _parse_num(v)
        out.append(row)
    return out


def dump_frontier(result: InstanceResult) -> str:
    return json.dumps(result.to_dict(), indent=1, sort_keys=True) + "\n"
