"""Command-line interface.

    graphk0 build "Z/2 x Z/2" -o g.json
    graphk0 k0 g.json [--mode finite] [--truncate N]
    graphk0 verify "Z/2 x Z/4" --all-auts
    graphk0 verify "Z/5" --aut 2
    graphk0 snf matrix.txt
    graphk0 export-dot g.json -o g.dot

Exit codes: 0 success, 1 verification failure, 2 usage or domain error,
3 I/O error.
"""

from __future__ import annotations

import argparse
import csv
import io
import itertools
import json
import sys
from typing import Optional, Sequence

from . import gamma
from .abelian import (
    GroupAut,
    GroupHom,
    GroupSpecError,
    IllDefinedHomError,
    InfiniteGroupError,
    enumerate_automorphisms,
    parse_group_spec,
)
from .graph import GraphSchemaError, deserialize, serialize, to_dot
from .intlin import IntMatrix, parse_matrix, smith_normal_form
from .ktheory import KTheoryError, Mode, k0, truncate_tails

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_IO = 0, 1, 2, 3

# exhaustive functor-law pairs up to this many automorphisms, sampled beyond
MAX_EXHAUSTIVE_AUTS = 12


class UsageError(Exception):
    pass


def _read(path: str) -> str:
    try:
        with open(path, encoding="utf-8") as fh:
            return fh.read()
    except OSError as e:
        raise OSError(f"cannot read {path}: {e.strerror}") from e


def _write(path: Optional[str], text: str) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
        return
    try:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)
    except OSError as e:
        raise OSError(f"cannot write {path}: {e.strerror}") from e


def _load_graph(path: str):
    text = _read(path)
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        raise UsageError(f"{path}: invalid JSON: {e}") from None
    return deserialize(doc)


def parse_aut_matrix(text: str, ngens: int) -> IntMatrix:
    """``"2"``, ``"0 1; 1 0"`` or ``"0,1;1,0"`` -> square integer matrix."""
    rows = [r for r in text.split(";")]
    try:
        data = [[int(x) for x in r.replace(",", " ").split()] for r in rows]
    except ValueError:
        raise UsageError(f"bad matrix {text!r}: entries must be integers") from None
    if len(data) != ngens or any(len(r) != ngens for r in data):
        raise UsageError(f"matrix {text!r} must be {ngens}x{ngens} for this group")
    return IntMatrix.from_rows(data, cols=ngens)


def cmd_build(args) -> int:
    group = parse_group_spec(args.spec)
    if not group.is_finite and args.window is None:
        raise InfiniteGroupError(f"{group} is infinite; pass --window W")
    g = gamma.build(group, args.window)
    text = json.dumps(serialize(g), indent=1) + "\n"
    _write(args.output, text)
    summary = (f"Gamma({group}): {len(g.vertices)} core vertices, {g.num_edges()} edges, "
               f"{g.num_loops()} loops, {len(g.tail_anchors)} tail anchors")
    print(summary, file=sys.stdout if args.output not in (None, "-") else sys.stderr)
    return EXIT_OK


def cmd_k0(args) -> int:
    g = _load_graph(args.graph)
    mode = Mode(args.mode)
    if args.truncate is not None:
        if args.truncate < 1:
            raise UsageError("--truncate needs N >= 1")
        g = truncate_tails(g, args.truncate)
        mode = Mode.FINITE
    k = k0(g, mode)
    out = io.StringIO()
    out.write(f"{k.group}\n")
    if not args.no_classes:
        w = csv.writer(out, lineterminator="\n")
        w.writerow(["tag", "coordinates"])
        for v in k.boundary.row_tags:
            w.writerow([str(v), str(k.class_of[v])])
    sys.stdout.write(out.getvalue())
    return EXIT_OK


def cmd_verify(args) -> int:
    group = parse_group_spec(args.spec)
    if not group.is_finite:
        raise InfiniteGroupError(f"{group} is infinite; verification needs a finite group")
    if args.aut is not None:
        try:
            hom = GroupHom(group, group, parse_aut_matrix(args.aut, group.ngens))
        except IllDefinedHomError as e:
            raise UsageError(str(e)) from None
        try:
            auts = [GroupAut.from_hom(hom)]
        except ValueError as e:
            raise UsageError(f"rejected: {hom.matrix.to_rows()} is not invertible on {group} ({e})") from None
    elif args.all_auts:
        auts = enumerate_automorphisms(group)
    else:
        auts = [GroupAut.identity(group)]

    ctx = gamma.GammaContext.of(group)
    reports = [gamma.verify_mc1(group, ctx), gamma.verify_relations(group, ctx)]
    results = [gamma.verify_mc2(group, phi, ctx) for phi in auts]
    reports += [r.report for r in results]
    passed_lifts = sum(r.report.passed for r in results)
    if args.all_auts:
        reports.append(gamma.verify_lift_embedding(results))
        homs = [a.hom for a in auts]
        if len(homs) <= MAX_EXHAUSTIVE_AUTS:
            pairs = list(itertools.product(homs, homs))
        else:
            pairs = gamma.random_pairs(auts, args.pairs, args.seed)
        reports.append(gamma.verify_functor_laws(group, pairs, ctx.graph))
    for rep in reports:
        print(rep.text())
    ok = all(rep.passed for rep in reports)
    print(f"lifts: {passed_lifts}/{len(results)} pass")
    print("RESULT: " + ("PASS" if ok else "FAIL"))
    return EXIT_OK if ok else EXIT_FAIL


def cmd_snf(args) -> int:
    try:
        m = parse_matrix(_read(args.matrix))
    except ValueError as e:
        raise UsageError(f"{args.matrix}: {e}") from None
    snf = smith_normal_form(m)
    print("diag(" + ",".join(str(d) for d in snf.diagonal) + ")")
    print("U")
    print(snf.U)
    print("S")
    print(snf.S)
    print("V")
    print(snf.V)
    return EXIT_OK


def cmd_export_dot(args) -> int:
    _write(args.output, to_dot(_load_graph(args.graph)))
    return EXIT_OK


def make_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="graphk0", description=__doc__,
                                 formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("build", help="build Gamma(A) and write its graph JSON")
    p.add_argument("spec", help='group spec, e.g. "Z/2 x Z/4"')
    p.add_argument("-o", "--output", help="output file (default stdout)")
    p.add_argument("--window", type=int, help="window W for free coordinates (experimental)")
    p.set_defaults(func=cmd_build)

    p = sub.add_parser("k0", help="compute K0 of a graph file")
    p.add_argument("graph")
    p.add_argument("--mode", choices=[m.value for m in Mode], default=Mode.TAIL_ELIMINATED.value)
    p.add_argument("--truncate", type=int, metavar="N",
                   help="materialize N levels of every tail, then use finite mode")
    p.add_argument("--no-classes", action="store_true", help="omit the per-vertex class table")
    p.set_defaults(func=cmd_k0)

    p = sub.add_parser("verify", help="check K0(Gamma(A)) = A and lifting of automorphisms")
    p.add_argument("spec")
    g = p.add_mutually_exclusive_group()
    g.add_argument("--all-auts", action="store_true", help="check every automorphism")
    g.add_argument("--aut", metavar="MATRIX", help='automorphism matrix, rows split by ";"')
    p.add_argument("--pairs", type=int, default=20, help="sampled functor-law pairs for large Aut")
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("snf", help="Smith normal form of a matrix file")
    p.add_argument("matrix")
    p.set_defaults(func=cmd_snf)

    p = sub.add_parser("export-dot", help="render a graph file as Graphviz DOT")
    p.add_argument("graph")
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_export_dot)
    return ap


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = make_parser().parse_args(argv)
    try:
        return args.func(args)
    except OSError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_IO
    except (UsageError, GroupSpecError, InfiniteGroupError, GraphSchemaError, KTheoryError,
            ValueError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
