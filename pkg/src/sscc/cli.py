"""Command-line driver: ``sscc run|estimate|scan SPEC [options]``.

Exit codes: 0 success, 1 usage or input error, 2 non-convergence (estimate)
or no matches under ``--expect-match`` (scan).
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys
import time
from fractions import Fraction

from .analysis import (AgentCount, EquivalentStores, ExecutionTime, InconsistentStore, StoreEntails,
                       StorePredicateHolds, estimate, scan)
from .constraints import ExternalSolver, FragmentError, SolverError, to_text
from .engine import EngineError, run
from .space import AgentId
from .syntax import SpecError, load_spec, parse_formula


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(1)


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="sscc", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="cmd", required=True, parser_class=_Parser)

    def common(sp):
        sp.add_argument("spec", help="system description file")
        sp.add_argument("--seed", type=int, help="override the spec's seed")
        sp.add_argument("--max-time", type=Fraction, help="override the spec's maxtime")
        sp.add_argument("--solver", help="path to an SMT-LIB2 solver binary (z3, cvc5, ...)")

    r = sub.add_parser("run", help="simulate once and write the trace")
    common(r)
    r.add_argument("--out", default="-", help="trace file (JSON lines); '-' for stdout")
    r.add_argument("--final", help="also write the final-state dump here")

    e = sub.add_parser("estimate", help="CI-bounded estimate of an observable")
    common(e)
    e.add_argument("--observable", default="time",
                   help="time | agents | store:AGENT:FORMULA (AGENT may be '*')")
    e.add_argument("--alpha", type=float, default=0.05)
    e.add_argument("--delta", type=float, default=0.1, help="target interval width")
    e.add_argument("--batch", type=int, default=30)
    e.add_argument("--max-samples", type=int, default=10_000)
    e.add_argument("--csv", help="append a summary row to this CSV file")

    s = sub.add_parser("scan", help="check a state predicate along seeded runs")
    common(s)
    s.add_argument("--predicate", default="inconsistent",
                   help="inconsistent | entails:FORMULA | equivalent")
    s.add_argument("--seeds", default="0:32", help="'a:b' (half-open range) or comma list")
    s.add_argument("--expect-match", action="store_true")
    s.add_argument("--out", default="-", help="match records (JSON lines)")
    return p


def _observable(text: str):
    if text == "time":
        return ExecutionTime()
    if text == "agents":
        return AgentCount()
    if text.startswith("store:"):
        _, who, formula = text.split(":", 2)
        agent = None if who == "*" else AgentId.parse(who)
        return StorePredicateHolds(parse_formula(formula), agent)
    raise UsageError(f"unknown observable {text!r}")


def _predicate(text: str):
    if text == "inconsistent":
        return InconsistentStore()
    if text == "equivalent":
        return EquivalentStores()
    if text.startswith("entails:"):
        return StoreEntails(parse_formula(text.split(":", 1)[1]))
    raise UsageError(f"unknown predicate {text!r}")


def _seeds(text: str) -> list:
    try:
        if ":" in text:
            a, b = text.split(":")
            return list(range(int(a), int(b)))
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise UsageError(f"bad seed list {text!r}") from None


def _open(path):
    return sys.stdout if path == "-" else open(path, "w", encoding="utf-8", newline="\n")


def final_records(c) -> list:
    return [{"agent": str(a.id), "store": to_text(a.store), "children": sorted(a.children)}
            for a in c.agents]


def cmd_run(args, spec, solver) -> int:
    c = spec.configuration()
    res = run(c, solver)
    out = _open(args.out)
    try:
        for ev in res.trace:
            out.write(ev.to_json() + "\n")
        out.write(json.dumps({"event": "end", "reason": res.reason, "gtime": str(res.final.sim.gtime),
                              "final": final_records(res.final)}, sort_keys=True) + "\n")
    finally:
        if out is not sys.stdout:
            out.close()
    dump = "\n".join(f"{r['agent']}: {r['store']}" + (f"  children {' '.join(map(str, r['children']))}"
                                                      if r["children"] else "")
                     for r in final_records(res.final)) + "\n"
    if args.final:
        with open(args.final, "w", encoding="utf-8") as fh:
            fh.write(dump)
    if args.out != "-":
        sys.stdout.write(dump)
    return 0


def cmd_estimate(args, spec, solver) -> int:
    obs = _observable(args.observable)
    t0 = time.perf_counter()
    res = estimate(spec, obs, alpha=args.alpha, delta=args.delta, batch=args.batch,
                   max_samples=args.max_samples, seed0=spec.seed, solver=solver)
    wall = time.perf_counter() - t0
    print(json.dumps({**res.to_record(), "observable": args.observable}, sort_keys=True))
    if args.csv:
        fresh = not os.path.exists(args.csv) or os.path.getsize(args.csv) == 0
        with open(args.csv, "a", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh)
            if fresh:
                w.writerow(["mean", "half_width", "samples", "wall_time"])
            w.writerow([repr(res.mean), repr(res.half_width), res.samples, f"{wall:.3f}"])
    if not res.converged:
        print(f"sscc: no convergence after {res.samples} samples", file=sys.stderr)
        return 2
    return 0


def cmd_scan(args, spec, solver) -> int:
    pred = _predicate(args.predicate)
    matches = scan(spec, _seeds(args.seeds), pred, solver=solver)
    out = _open(args.out)
    try:
        for m in matches:
            out.write(json.dumps(m.to_record(), sort_keys=True) + "\n")
    finally:
        if out is not sys.stdout:
            out.close()
    if args.expect_match and not matches:
        print("sscc: no matching state", file=sys.stderr)
        return 2
    return 0


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:   # usage errors and --help
        return exc.code if isinstance(exc.code, int) else 1
    try:
        spec = load_spec(args.spec)
        if args.seed is not None:
            spec.seed = args.seed
        if args.max_time is not None:
            spec.max_time = args.max_time
        solver = ExternalSolver(args.solver) if args.solver else None
        handler = {"run": cmd_run, "estimate": cmd_estimate, "scan": cmd_scan}[args.cmd]
        return handler(args, spec, solver)
    except (OSError, SpecError, UsageError, FragmentError, SolverError, EngineError) as exc:
        print(f"sscc: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
