"""Command-line frontend: ``python -m sigmarot <command> MAP ...``.

Exit codes: 0 when every reported quantity is exact, 2 when something had
to be approximated, 1 on errors.  ``MAP`` is a map file or ``example`` for
the bundled fixture.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from fractions import Fraction
from typing import Optional

from . import cycles
from .covering import PeriodicNotFound, find_periodic_mod1
from .dynamics import compute_XF, partition_XF, rho_bounds, rho_bounds_batch
from .mapfile import MapFileError, example_map, load_map
from .markov import MarkovGraph, NotMarkov, xf_graph
from .rotset import RotationSet, oracle_cycle_enumeration, rationals_in, rotation_set
from .space import Line, branch_point, format_point, format_rational, parse_point, parse_rational

EXIT_OK, EXIT_ERROR, EXIT_APPROX = 0, 1, 2


def _load(name):
    return example_map() if name == "example" else load_map(name)


def _q(x) -> str:
    return format_rational(x, signed=True)


def _machine(x) -> str:
    x = Fraction(x)
    return f"{x.numerator}/{x.denominator}"


# --- analyze ----------------------------------------------------------------------


def analyze(m, max_den: int = 6, reach_cap: int = 64) -> dict:
    """Full pipeline as a plain dict of exact values (rationals as strings)."""
    xf = compute_XF(m, reach_cap)
    part = partition_XF(m, xf)
    rs = rotation_set(m, xf)
    report = {
        "attach": str(m.c),
        "reach": str(xf.h),
        "reach_exact": xf.exact,
        "XF": None if xf.empty else [str(xf.h), "1"],
        "partition": [
            {"index": i, "segment": [str(s.lo), str(s.hi)], "p": p}
            for i, (s, p) in enumerate(zip(part.segments, part.displacements), start=1)
        ],
        "markov": rs.graph is not None or part.N == 0,
        "graph": None,
        "rot_R": {"interval": [str(rs.line.lo), str(rs.line.hi)], "exact": rs.line.exact,
                  "method": rs.line.method},
        "stages": [{"index": st.index, "intervals": [[str(a), str(b)] for a, b in st.intervals]}
                   for st in rs.stages],
        "rotation_set": [[str(a), str(b)] for a, b in rs.components],
        "problems": list(rs.problems),
        "realized": [],
        "exact": rs.exact,
    }
    if rs.graph is not None:
        g = rs.graph
        report["graph"] = {
            "vertices": [v.label() for v in g.vertices],
            "edges": [[e.src, e.dst, e.weight] for e in g.edges],
        }
    for r, tag in rationals_in(rs, max_den):
        entry = {"rho": str(r), "tag": tag}
        try:
            res = find_periodic_mod1(m, r.numerator, r.denominator, part=part, xf=xf)
            entry.update(point=format_point(res.point), period=res.period,
                         displacement=res.displacement, method=res.method)
        except PeriodicNotFound as err:
            entry["error"] = str(err)
            report["exact"] = False
        report["realized"].append(entry)
    return report


def render_analysis(report: dict, name: str = "") -> str:
    out = io.StringIO()
    w = out.write
    if name:
        w(f"map: {name}\n")
    w(f"attach offset c = {report['attach']}\n")
    w(f"reach h = {report['reach']} ({'exact' if report['reach_exact'] else 'cap hit, approximate'})\n")
    xf = report["XF"]
    w("X_F = empty\n" if xf is None else f"X_F = [{xf[0]}, {xf[1]}]\n")
    w(f"partition: N = {len(report['partition'])}\n")
    for item in report["partition"]:
        lo, hi = item["segment"]
        w(f"  X_{item['index']} = [{lo}, {hi}]  p_{item['index']} = {_q(item['p'])}\n")
    if report["graph"] is not None:
        g = report["graph"]
        w(f"Markov graph: {len(g['vertices'])} vertices, {len(g['edges'])} edges\n")
        for i, v in enumerate(g["vertices"]):
            outs = [f"v{d}({_q(wt)})" for s, d, wt in g["edges"] if s == i]
            w(f"  v{i} {v} -> {' '.join(outs) if outs else '-'}\n")
    elif not report["markov"]:
        w("Markov graph: none (not Markov within the cap)\n")
    rr = report["rot_R"]
    w(f"Rot_R(F) = [{_q(rr['interval'][0])}, {_q(rr['interval'][1])}] "
      f"({rr['method']}{'' if rr['exact'] else ', approximate'})\n")
    for st in report["stages"][1:]:
        ivs = st["intervals"]
        text = "empty" if not ivs else ", ".join(f"[{_q(a)}, {_q(b)}]" for a, b in ivs)
        w(f"I_{st['index']} = {text}\n")
    w("Rot(F) = " + " U ".join(f"[{_q(a)}, {_q(b)}]" for a, b in report["rotation_set"]) + "\n")
    for msg in report["problems"]:
        w(f"warning: {msg}\n")
    if report["realized"]:
        w("periodic (mod 1) points:\n")
        for e in report["realized"]:
            if "error" in e:
                w(f"  rho {_q(e['rho'])} ({e['tag']}): NOT FOUND\n")
            else:
                w(f"  rho {_q(e['rho'])} ({e['tag']}): {e['point']}  "
                  f"F^{e['period']}(x) = x {_q(e['displacement'])}  [{e['method']}]\n")
    w("--- machine-readable ---\n")
    for st in report["stages"]:
        for a, b in st["intervals"]:
            w(f"I{st['index']} = [{_machine(a)}, {_machine(b)}]\n")
    for a, b in report["rotation_set"]:
        w(f"ROT = [{_machine(a)}, {_machine(b)}]\n")
    w(f"EXACT = {'yes' if report['exact'] else 'no'}\n")
    return out.getvalue()


# --- sweep and oracle -------------------------------------------------------------


def sweep_points(m, samples: int):
    """Deterministic grid: half the samples on ``X_F``, the rest on one line period."""
    xf = compute_XF(m)
    on_branch = 0 if xf.empty else (samples + 1) // 2
    pts = []
    for j in range(on_branch):
        s = xf.h + (1 - xf.h) * Fraction(j, max(1, on_branch - 1))
        pts.append(branch_point(0, s, m.c))
    rest = samples - on_branch
    pts += [Line(m.c + Fraction(j, rest)) for j in range(rest)]
    return pts


def sweep(m, samples: int, iters: int, period_cap: int = 32):
    pts = sweep_points(m, samples)
    return list(zip(pts, rho_bounds_batch(m, pts, iters, period_cap)))


def sweep_violations(rows, rs: RotationSet, iters: int):
    """Rows whose bounds fall outside ``Rot(F)`` by more than the tail-window slack."""
    slack = 2 / iters
    bad = []
    for p, b in rows:
        tol = 0 if b.exact else slack
        if not any(float(lo) - tol <= float(b.lower) and float(b.upper) <= float(hi) + tol
                   for lo, hi in rs.components):
            bad.append((p, b))
    return bad


def oracle_check(g: MarkovGraph, max_len: Optional[int] = None, corrupt: bool = False):
    """Compare per-component extreme cycle means with exhaustive enumeration.

    Returns ``(ok, lines)``.  ``corrupt`` perturbs the graph handed to the
    extremal algorithm (not to the enumeration) and must lead to a failure.
    """
    triples = g.triples()
    fast = [(u, v, w + 1) for u, v, w in triples] if corrupt else list(triples)
    max_len = max_len or max(1, g.n)
    ranges, _ = cycles.cycle_mean_range(g.n, fast)
    ok = True
    lines = []
    for rg in ranges:
        sub = [t if t[0] in rg.nodes and t[1] in rg.nodes else None for t in triples]
        sub = [t for t in sub if t is not None]
        means = cycles.simple_cycle_means(g.n, sub, max(max_len, len(rg.nodes)))
        lo, hi = min(means), max(means)
        good = (lo, hi) == (rg.lo, rg.hi)
        ok &= good
        lines.append(f"SCC {list(rg.nodes)}: extremal [{_q(rg.lo)}, {_q(rg.hi)}] "
                     f"enumeration [{_q(lo)}, {_q(hi)}] {'PASS' if good else 'FAIL'}")
    return ok, lines


# --- argument handling ------------------------------------------------------------


def _cmd_analyze(args):
    m = _load(args.map)
    report = analyze(m, args.max_den, args.reach_cap)
    if args.json:
        sys.stdout.write(json.dumps(report, indent=2, sort_keys=True) + "\n")
    else:
        sys.stdout.write(render_analysis(report, args.map))
    return EXIT_OK if report["exact"] else EXIT_APPROX


def _cmd_rho(args):
    m = _load(args.map)
    p = parse_point(args.point, m.c)
    b = rho_bounds(m, p, args.iters)
    if b.exact:
        print(f"rho({format_point(p)}) = {_q(b.lower)} exact (period {b.period})")
        return EXIT_OK
    print(f"rho({format_point(p)}) in [{b.lower:.12g}, {b.upper:.12g}] "
          f"(approximate, {b.iterations} iterations)")
    return EXIT_APPROX


def _cmd_periodic(args):
    m = _load(args.map)
    r = parse_rational(args.rho)
    rs = rotation_set(m)
    if r not in rs:
        comps = " U ".join(f"[{_q(a)}, {_q(b)}]" for a, b in rs.components)
        print(f"not found: {_q(r)} is outside Rot(F) = {comps}", file=sys.stderr)
        return EXIT_ERROR
    try:
        res = find_periodic_mod1(m, r.numerator, r.denominator, max_cycle_len=args.max_cycle_len)
    except PeriodicNotFound as err:
        print(f"not found: {err}", file=sys.stderr)
        return EXIT_ERROR
    print(f"x = {format_point(res.point)}")
    print(f"F^{res.period}(x) = x {_q(res.displacement)}  verified exactly  "
          f"(rho = {_q(res.rho)}, method {res.method})")
    if res.chain is not None and args.chain:
        print(f"chain: {res.chain}")
    return EXIT_OK


def _graph_of(m):
    return xf_graph(m, partition_XF(m))


def _cmd_graph(args):
    m = _load(args.map)
    text = _graph_of(m).to_dot()
    if args.dot:
        with open(args.dot, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def _cmd_sweep(args):
    m = _load(args.map)
    rows = sweep(m, args.samples, args.iters)
    fh = open(args.csv, "w", newline="") if args.csv else sys.stdout
    try:
        wr = csv.writer(fh)
        wr.writerow(["point", "lower", "upper", "exact"])
        for p, b in rows:
            wr.writerow([format_point(p), str(b.lower), str(b.upper), int(b.exact)])
    finally:
        if args.csv:
            fh.close()
    rs = rotation_set(m)
    bad = sweep_violations(rows, rs, args.iters)
    print(f"{len(rows)} samples, {len(bad)} outside Rot(F) beyond slack {2 / args.iters:g}",
          file=sys.stderr)
    if bad:
        return EXIT_ERROR
    return EXIT_OK if rs.exact else EXIT_APPROX


def _cmd_oracle(args):
    m = _load(args.map)
    g = _graph_of(m)
    means = sorted(oracle_cycle_enumeration(g, args.max_cycle_len))
    shown = ", ".join(_q(x) for x in means[:40]) + (" ..." if len(means) > 40 else "")
    print(f"cycle means up to length {args.max_cycle_len}: {shown}")
    ok, lines = oracle_check(g, args.max_cycle_len, corrupt=args.corrupt_graph)
    for line in lines:
        print(line)
    print("PASS" if ok else "FAIL")
    return EXIT_OK if ok else EXIT_ERROR


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        # usage errors share exit code 1 with other failures; 2 means approximate
        self.print_usage(sys.stderr)
        self.exit(EXIT_ERROR, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="sigmarot", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def add(name, func, help):
        sp = sub.add_parser(name, help=help, description=help)
        sp.add_argument("map", help="map file, or 'example' for the bundled fixture")
        sp.set_defaults(func=func)
        return sp

    sp = add("analyze", _cmd_analyze, "full report: partition, graph, rotation set, periodic points")
    sp.add_argument("--max-den", type=int, default=6)
    sp.add_argument("--reach-cap", type=int, default=64)
    sp.add_argument("--json", action="store_true", help="print the report as JSON")

    sp = add("rho", _cmd_rho, "rotation number bounds of one point")
    sp.add_argument("point", help="'L x' or 'B n s'")
    sp.add_argument("--iters", type=int, default=1000)

    sp = add("periodic", _cmd_periodic, "periodic (mod 1) point with rotation number p/q")
    sp.add_argument("rho", help="rational p/q")
    sp.add_argument("--max-cycle-len", type=int, default=48)
    sp.add_argument("--chain", action="store_true", help="also print the covering chain")

    sp = add("graph", _cmd_graph, "Markov graph of X_F as DOT")
    sp.add_argument("--dot", help="output path (default stdout)")

    sp = add("sweep", _cmd_sweep, "rotation bounds over a grid of starting points as CSV")
    sp.add_argument("--samples", type=int, default=100)
    sp.add_argument("--iters", type=int, default=1000)
    sp.add_argument("--csv", help="output path (default stdout)")

    sp = add("oracle", _cmd_oracle, "check extremal cycle means against enumeration")
    sp.add_argument("--max-cycle-len", type=int, default=6)
    sp.add_argument("--corrupt-graph", action="store_true", help=argparse.SUPPRESS)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except MapFileError as err:
        print(f"error: {err}", file=sys.stderr)
    except (NotMarkov, ValueError, OSError) as err:
        print(f"error: {err}", file=sys.stderr)
    return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
