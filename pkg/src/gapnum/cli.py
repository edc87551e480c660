"""``gapnum`` command line."""
from __future__ import annotations

import argparse
import json
import sys

from .bounds import minimal_m, monomino_lower_bound
from .digraph import CapacityError, digraph_stats, export_digraph, get_digraph
from .formulas import expected_gap_number
from .oracle import OracleBudgetExceeded, OracleConfig, brute_gap_number
from .render import Format, render
from .solver import gap_number
from .structure import DEFAULT_MAX_WORK, cylinder_search, max_gapless_run


def _positive(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if v < 1:
        raise argparse.ArgumentTypeError(f"must be positive: {v}")
    return v


def _nonneg(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if v < 0:
        raise argparse.ArgumentTypeError(f"must be >= 0: {v}")
    return v


def _emit(args, doc: dict, text: str) -> None:
    if args.json:
        print(json.dumps(doc, indent=2, sort_keys=True))
    else:
        print(text, end="" if text.endswith("\n") else "\n")


def cmd_compute(args) -> int:
    res = gap_number(args.width, args.length)
    pic = render(res.witness, args.format, res.gap_number)
    expected = expected_gap_number(args.width, args.length)
    doc = res.to_dict()
    doc["expected"] = expected
    lines = [
        f"M({args.width}, {args.length}) = {res.gap_number}",
        f"lower bound {res.lower_bound_used}",
    ]
    if expected is not None:
        lines.append(f"closed form {expected}")
    if args.output:
        with open(args.output, "w") as fh:
            fh.write(pic.payload)
        lines.append(f"witness written to {args.output}")
    elif not args.json:
        lines.append(pic.payload.rstrip("\n"))
    _emit(args, doc, "\n".join(lines))
    return 0


def cmd_digraph(args) -> int:
    g = get_digraph(args.width)
    if args.export:
        export_digraph(g, args.export)
    st = digraph_stats(g)
    doc = st.to_dict()
    if args.export:
        doc["exported_to"] = args.export
    head = f"{'width':>5} {'nodes':>10} {'T-edges':>10} {'M-edges':>10} {'max out':>7}"
    row = f"{st.width:>5} {st.node_count:>10,} {st.t_edge_count:>10,} {st.m_edge_count:>10,} {st.max_out_degree:>7}"
    text = f"{head}\n{row}"
    if args.export:
        text += f"\nwritten to {args.export}"
    _emit(args, doc, text)
    return 0


def cmd_bound(args) -> int:
    d = minimal_m(get_digraph(args.width))
    doc = d.to_dict()
    if args.length:
        doc["lower_bound"] = monomino_lower_bound(d, args.length)
    if d.unbounded:
        text = f"width {args.width}: UNBOUNDED (a cycle of T-edges tiles forever without gaps)"
    else:
        text = (f"width {args.width}: m = {d.minimal_m}, "
                f"at least one monomino per {d.columns_per_monomino} columns")
    if args.length:
        text += f"\nlength {args.length}: at least {doc['lower_bound']} monominoes"
    _emit(args, doc, text)
    return 0


def cmd_run(args) -> int:
    r = max_gapless_run(args.width)
    doc = r.to_dict()
    if r.unbounded:
        text = f"width {args.width}: UNBOUNDED gapless run ({len(r.witness_path)}-edge T-cycle)"
    else:
        text = (f"width {args.width}: at most {r.max_gapless_columns} consecutive gap-free columns"
                f" (witness: columns {r.first_column}..{r.first_column + r.max_gapless_columns - 1})")
    _emit(args, doc, text)
    return 0


def cmd_cylinder(args) -> int:
    g = get_digraph(args.width)
    wit = cylinder_search(args.width, args.period, args.monominoes, digraph=g, max_work=args.max_work)
    if wit is None:
        doc = {"width": args.width, "period": args.period, "mu_max": args.monominoes, "found": False}
        text = f"no {args.width} x {args.period} cylinder with at most {args.monominoes} monominoes"
    else:
        doc = wit.to_dict() | {"mu_max": args.monominoes, "found": True}
        doc["placements"] = [p.to_dict() for p in wit.placements(g)]
        text = (f"{args.width} x {args.period} cylinder with {wit.monominoes} monominoes: "
                f"{len(wit.cycle)}-edge closed walk from node {wit.start_node}")
    _emit(args, doc, text)
    return 0


def cmd_oracle(args) -> int:
    cfg = OracleConfig(area_cap=args.area_cap, node_budget=args.node_budget)
    v = brute_gap_number(args.width, args.length, cfg)
    doc = {"width": args.width, "length": args.length, "gap_number": v, "method": "ORACLE"}
    _emit(args, doc, f"M({args.width}, {args.length}) = {v} (brute force)")
    return 0


def cmd_verify(args) -> int:
    from .verify import run_claims

    results = run_claims(args.level)
    failed = [r for r in results if not r.ok]
    doc = {"level": args.level, "passed": len(results) - len(failed), "failed": len(failed),
           "claims": [r.to_dict() for r in results]}
    lines = [r.line() for r in results]
    lines.append(f"{len(results) - len(failed)}/{len(results)} claims reproduced")
    if failed:
        lines.append("failed: " + "; ".join(r.label for r in failed))
    _emit(args, doc, "\n".join(lines))
    return 1 if failed else 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="gapnum", description="T-tetromino gap numbers")
    sub = p.add_subparsers(dest="command", required=True)

    def add(name, fn, help_):
        sp = sub.add_parser(name, help=help_)
        sp.add_argument("--json", action="store_true", help="machine-readable output")
        sp.set_defaults(func=fn)
        return sp

    sp = add("compute", cmd_compute, "exact gap number with a witness tiling")
    sp.add_argument("--width", type=_positive, required=True)
    sp.add_argument("--length", type=_positive, required=True)
    sp.add_argument("--output", help="write the rendered witness here")
    sp.add_argument("--format", choices=[f.value for f in Format], default="ascii")

    sp = add("digraph", cmd_digraph, "fringe digraph statistics or JSON export")
    sp.add_argument("--width", type=_positive, required=True)
    g = sp.add_mutually_exclusive_group(required=True)
    g.add_argument("--stats", action="store_true")
    g.add_argument("--export", metavar="PATH")

    sp = add("bound", cmd_bound, "minimal edge weight and density lower bound")
    sp.add_argument("--width", type=_positive, required=True)
    sp.add_argument("--length", type=_positive, help="also print the bound for this length")

    sp = add("run", cmd_run, "longest gap-free run of columns")
    sp.add_argument("--width", type=_positive, required=True)

    sp = add("cylinder", cmd_cylinder, "search for a periodic tiling")
    sp.add_argument("--width", type=_positive, required=True)
    sp.add_argument("--period", type=_positive, required=True)
    sp.add_argument("--monominoes", type=_nonneg, default=0, help="largest number of gaps allowed")
    sp.add_argument("--max-work", type=_positive, default=DEFAULT_MAX_WORK)

    sp = add("oracle", cmd_oracle, "brute-force gap number for small rectangles")
    sp.add_argument("--width", type=_positive, required=True)
    sp.add_argument("--length", type=_positive, required=True)
    sp.add_argument("--area-cap", type=_positive, default=OracleConfig.area_cap)
    sp.add_argument("--node-budget", type=_positive, default=OracleConfig.node_budget)

    sp = add("verify-paper", cmd_verify, "reproduce the published values")
    sp.add_argument("--level", choices=["fast", "full"], default="fast")
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (CapacityError, OracleBudgetExceeded) as exc:
        print(f"gapnum: capacity: {exc}", file=sys.stderr)
        return 3
    except ValueError as exc:
        print(f"gapnum: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
