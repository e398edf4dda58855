"""Command line front end.

Thin client over the runner layer: parse arguments, read files, print a
text or machine (JSON) report, exit 0 on success/certified, 1 when the
analysis itself says no, 2 on bad input or failed preconditions.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import runners as rn


def _read(path: str) -> str:
    try:
        return Path(path).read_text()
    except OSError as err:
        raise rn.RunnerError(f"cannot read {path}: {err}") from err


def _emit(doc: dict, fmt: str, render) -> None:
    if fmt == "machine":
        print(json.dumps(doc, indent=2, default=str))
    else:
        render(doc)


def _render_parse(doc: dict) -> None:
    print(f"nodes: {' '.join(doc['nodes'])}")
    for b in doc["branches"]:
        expr = f"  {b['expression']}" if b["expression"] else ""
        print(f"  {b['name']:8s} {b['kind']:9s} {b['tail']} -> {b['head']}{expr}")
    for name, val in doc["params"].items():
        print(f"  .param {name} = {val if val is not None else '(symbolic)'}")


def _render_trees(doc: dict) -> None:
    print(f"spanning trees: {doc['count']}")
    for t in doc["trees"]:
        print("  " + " ".join(t))


def _render_kirchhoff(doc: dict) -> None:
    print(doc["kirchhoff_polynomial"]["text"])


def _render_charpoly(doc: dict) -> None:
    print(f"mode: {doc['mode']}  (result {doc['scale_disclaimer']})")
    if "polynomial" in doc:
        print(doc["polynomial"]["text"])
    else:
        print("coefficients (ascending powers of lambda):")
        print("  " + "  ".join(str(x) for x in doc["coefficients"]))
        if "pencil_oracle" in doc:
            print("pencil oracle:")
            print("  " + "  ".join(str(x) for x in doc["pencil_oracle"]))
    if doc["memristor_count"]:
        print(f"memristors: {doc['memristor_count']} "
              f"(factor lambda^{doc['memristor_count']} included)")


def _render_check_solution(doc: dict) -> None:
    r = doc["residuals"]
    print(f"residuals: kcl {r['kcl']:.3e}  kvl {r['kvl']:.3e}  "
          f"max {r['max']:.3e}  (tol {r['tol']:.1e})")
    print(f"tree sum:      {doc['nondegeneracy_sum']}")
    print(f"matrix0 det:   {doc['matrix0_determinant']}  "
          f"(sign factor {doc['sign_factor']})")
    print("nondegenerate" if doc["nondegenerate"] else "DEGENERATE")


def _render_bifurcation(doc: dict) -> None:
    for name, h in doc["hypotheses"].items():
        mark = "ok" if h["passed"] else f"FAIL ({h['witness']})"
        print(f"  {name}: {mark}")
    for name in ("condition_i", "condition_ii"):
        h = doc[name]
        mark = "ok" if h["passed"] else f"FAIL ({h['witness']})"
        print(f"  {name}: {mark}")
    print(f"verdict: {doc['overall']}")


def _render_associates(doc: dict) -> None:
    print("associates" if doc["associates"] else "NOT associates")
    print(f"  gamma range [{doc['gamma_min_abs']:.6g}, "
          f"{doc['gamma_max_abs']:.6g}] over {doc['samples']} samples")
    if doc["zero_set_mismatches"]:
        for w in doc["zero_set_mismatches"]:
            print(f"  zero-set mismatch near {w}")


def build_parser() -> argparse.ArgumentParser:
    top = argparse.ArgumentParser(
        prog="homcirc",
        description="Nonlinear circuit analysis with implicit characteristics")
    top.add_argument("--format", choices=("text", "machine"), default="text")
    sub = top.add_subparsers(dest="command", required=True)

    for name in ("parse", "trees", "kirchhoff"):
        p = sub.add_parser(name)
        p.add_argument("netlist")

    p = sub.add_parser("charpoly")
    p.add_argument("netlist")
    group = p.add_mutually_exclusive_group()
    group.add_argument("--symbolic", action="store_true", default=True)
    group.add_argument("--at", metavar="OPFILE",
                       help="operating point file; switches to numeric mode")
    p.add_argument("--dehom", metavar="MAP",
                   help="branch=current|voltage pairs, comma separated")
    p.add_argument("--tol", type=float, default=1e-8)

    p = sub.add_parser("check-solution")
    p.add_argument("netlist")
    p.add_argument("opfile")
    p.add_argument("--tol", type=float, default=1e-8)

    p = sub.add_parser("check-bifurcation")
    p.add_argument("netlist")
    p.add_argument("branch")
    p.add_argument("--param", default="mu",
                   help="name of the bifurcation parameter (default mu)")

    p = sub.add_parser("associates")
    p.add_argument("--f1", required=True)
    p.add_argument("--f2", required=True)
    p.add_argument("--domain", default="-1,1,-1,1",
                   metavar="IMIN,IMAX,VMIN,VMAX")
    p.add_argument("--grid", type=int, default=32)
    p.add_argument("--tol", type=float, default=1e-8)
    return top


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "parse":
            code, doc = rn.run_parse(_read(args.netlist))
            _emit(doc, args.format, _render_parse)
        elif args.command == "trees":
            code, doc = rn.run_trees(_read(args.netlist))
            _emit(doc, args.format, _render_trees)
        elif args.command == "kirchhoff":
            code, doc = rn.run_kirchhoff(_read(args.netlist))
            _emit(doc, args.format, _render_kirchhoff)
        elif args.command == "charpoly":
            op_text = _read(args.at) if args.at else None
            code, doc = rn.run_charpoly(
                _read(args.netlist), symbolic=args.at is None,
                op_text=op_text, dehom=args.dehom, tol=args.tol)
            _emit(doc, args.format, _render_charpoly)
        elif args.command == "check-solution":
            code, doc = rn.run_check_solution(
                _read(args.netlist), _read(args.opfile), tol=args.tol)
            _emit(doc, args.format, _render_check_solution)
        elif args.command == "check-bifurcation":
            code, doc = rn.run_check_bifurcation(
                _read(args.netlist), args.branch, mu=args.param)
            _emit(doc, args.format, _render_bifurcation)
        else:  # associates
            try:
                domain = tuple(float(x) for x in args.domain.split(","))
            except ValueError:
                domain = ()
            if len(domain) != 4:
                raise rn.RunnerError(
                    f"bad --domain {args.domain!r}; expected imin,imax,vmin,vmax")
            code, doc = rn.run_associates(
                args.f1, args.f2, domain, grid=args.grid, tol=args.tol)
            _emit(doc, args.format, _render_associates)
    except rn.RunnerError as err:
        print(f"error: {err}", file=sys.stderr)
        return err.code
    return code


if __name__ == "__main__":
    sys.exit(main())
