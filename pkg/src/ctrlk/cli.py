"""ctrlk command line: size, rep, vanish, squeeze, render, selftest.

Exit codes: 0 success, 1 a verification flag came out false, 2 unreadable
document, 3 bad usage or dimensions, 4 mathematical precondition failed.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction

from . import documents
from .documents import DocumentError
from .geo import (
    GeoModule, GeoMorphism, PreconditionError, Window, matrix_size_breakdown, sizes, v_functor,
)
from .rings import QQ, LaurentPoly, RingMatrix, fmt_scalar, to_scalar

EXIT_OK, EXIT_FLAG, EXIT_PARSE, EXIT_USAGE, EXIT_PRECONDITION = 0, 1, 2, 3, 4


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _fraction(text: str) -> Fraction:
    try:
        return to_scalar(text)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not an exact rational: {text!r}") from None


def _window(text: str | None) -> Window | None:
    if text is None:
        return None
    try:
        return Window.parse(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise UsageError(f"bad window {text!r}: {exc}") from None


def _emit(args, obj, summary: list[str]) -> None:
    if args.out:
        documents.write(args.out, obj)
    if args.format == "json" and not args.out:
        print(documents.dumps(obj))
    else:
        for line in summary:
            print(line)


def _read(path: str):
    try:
        return documents.read(path)
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc}") from None


# --------------------------------------------------------------------------


def cmd_size(args) -> int:
    kind, A = _read(args.file)
    if kind not in ("laurent-matrix", "dihedral-matrix"):
        raise UsageError(f"size expects a matrix document, got {kind}")
    n = args.n if args.n is not None else A.rows
    if A.rows != A.cols or A.rows != n:
        raise UsageError(f"matrix is {A.rows}x{A.cols} but --n is {n}")
    breakdown = matrix_size_breakdown(A, n)
    total = max(breakdown.values(), default=Fraction(0))
    cross = None
    if kind == "laurent-matrix":
        cross = sizes(v_functor(A, n)).size
    out = {"size": str(total), "n": n,
           "by_degree": {str(k): str(v) for k, v in breakdown.items()},
           "v_functor_size": None if cross is None else str(cross),
           "cross_check": None if cross is None else cross == total}
    if args.format == "json":
        print(json.dumps(out, indent=2, sort_keys=True))
    else:
        print(f"size = {fmt_scalar(total)}")
        for k, v in breakdown.items():
            print(f"  degree {k}: {fmt_scalar(v)}")
        if cross is not None:
            verdict = "agrees" if cross == total else "DISAGREES"
            print(f"V_{n} cross-check: size = {fmt_scalar(cross)} ({verdict})")
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            json.dump(out, fh, indent=2, sort_keys=True)
            fh.write("\n")
    return EXIT_OK if cross is None or cross == total else EXIT_FLAG


def _parse_matrix(text: str) -> RingMatrix:
    """Inline "a,b;c,d" rows of rationals, or a path to a matrix document."""
    if ";" in text or "," in text or not text.strip():
        try:
            rows = [[to_scalar(v) for v in row.split(",")] for row in text.split(";")]
            return RingMatrix(QQ, rows)
        except (ValueError, ZeroDivisionError) as exc:
            raise UsageError(f"bad matrix {text!r}: {exc}") from None
    kind, M = _read(text)
    if kind != "laurent-matrix":
        raise UsageError("--matrix file must hold a laurent-matrix document")
    for v in M.nonzero().values():
        if isinstance(v, LaurentPoly) and v.exponents() != [0]:
            raise UsageError("--matrix entries must be constants")
    return M.map(lambda v: v.coeff(0) if isinstance(v, LaurentPoly) else v, QQ)


def cmd_rep(args) -> int:
    from . import reps
    kind = args.kind
    if kind in ("xi", "nu", "r"):
        if args.n is None or args.n < 1:
            raise UsageError(f"rep {kind} needs --n >= 1")
        b = {"xi": reps.xi_rep, "nu": reps.nu_rep, "r": reps.r_rep}[kind](args.n)
    elif kind == "s":
        b = reps.s_rep()
    else:
        if args.eps is None or args.eps <= 0:
            raise UsageError(f"rep {kind} needs a positive --eps")
        M = _parse_matrix(args.matrix) if args.matrix else RingMatrix.identity(QQ, 1)
        if M.rows != M.cols:
            raise UsageError(f"--matrix must be square, got {M.rows}x{M.cols}")
        if kind == "constant":
            b = reps.squeeze_constant(M, args.eps)
        else:
            if args.k is None:
                raise UsageError("rep class needs --k")
            b = reps.squeeze_class(args.k, M, args.eps)
    ok = b.check()
    summary = [f"{kind}: size = {fmt_scalar(b.size)}",
               f"size(forward) = {fmt_scalar(b.forward_sizes.size)}",
               f"size(inverse) = {fmt_scalar(b.inverse_sizes.size)}",
               f"inverse verified: {'true' if ok else 'false'}"]
    if all(p.t == 1 for p in b.forward.source.points):
        try:
            summary.append(f"det U = {b.determinant()}  (necessary condition only)")
        except ValueError as exc:
            summary.append(f"det U not computed: {exc}")
    if b.witness is not None:
        from .rings import verify_witness
        good = verify_witness(b.witness, b.witness_target)
        summary.append(f"elementary witness ({len(b.witness.factors)} factors) verifies: "
                       f"{'true' if good else 'false'}")
        ok = ok and good
    _emit(args, b, summary)
    return EXIT_OK if ok else EXIT_FLAG


def cmd_vanish(args) -> int:
    from .squeeze import IntervalSpec
    from .vanish import run_vanishing
    kind, obj = _read(args.file)
    if kind == "bundle":
        alpha, alpha_inv = obj.forward, obj.inverse
    elif kind == "morphism":
        alpha, alpha_inv = obj, None
    else:
        raise UsageError(f"vanish expects a morphism or bundle document, got {kind}")
    if not alpha.is_endo():
        raise UsageError("vanish needs an endomorphism")
    I = IntervalSpec(args.interval)
    w = _window(args.window)
    try:
        report = run_vanishing(alpha, alpha_inv, I, args.layers, w)
    except PreconditionError:
        raise
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    _emit(args, report, report.summary_lines())
    return EXIT_OK if report.ok else EXIT_FLAG


def cmd_squeeze(args) -> int:
    from .squeeze import DEFAULT_SCHEDULE, IntervalSpec, squeeze_total
    kind, obj = _read(args.file)
    if kind not in ("module", "morphism"):
        raise UsageError(f"squeeze expects a module or morphism document, got {kind}")
    if args.layers < 1:
        raise UsageError("--layers must be at least 1")
    stack = squeeze_total(obj, IntervalSpec(args.interval), DEFAULT_SCHEDULE, args.layers)
    summary = [f"squeezed {kind} into {stack.N} layers over ({args.interval}, {args.interval + 1})"]
    for n, layer in enumerate(stack.layers, 1):
        if isinstance(layer, GeoModule):
            summary.append(f"  layer {n}: {len(layer.points)} points, rank {layer.total_rank()}")
        else:
            summary.append(f"  layer {n}: hsize {fmt_scalar(sizes(layer).hsize)}")
    _emit(args, stack, summary)
    return EXIT_OK


def cmd_render(args) -> int:
    from .render import render_svg
    if args.window is None:
        raise UsageError("render needs a bounded --window x0,x1,t0,t1")
    w = _window(args.window)
    kind, obj = _read(args.file)
    if kind not in ("module", "morphism", "stack"):
        raise UsageError(f"cannot render a {kind} document")
    svg = render_svg(obj, w)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(svg)
    else:
        sys.stdout.write(svg)
    return EXIT_OK


def cmd_selftest(args) -> int:
    from .acceptance import run_all
    results = run_all(print)
    return EXIT_OK if all(r.passed for r in results) else EXIT_FLAG


# --------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", help="write the resulting document to this path")
    common.add_argument("--format", choices=("json", "text"), default="text")

    p = _Parser(prog="ctrlk", description="Exact controlled algebra over the line.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("size", parents=[common], help="size of a matrix over R[t, 1/t]")
    s.add_argument("file")
    s.add_argument("--n", type=int)
    s.set_defaults(func=cmd_size)

    r = sub.add_parser("rep", parents=[common], help="small representing automorphisms")
    r.add_argument("kind", choices=("xi", "nu", "s", "r", "class", "constant"))
    r.add_argument("--n", type=int)
    r.add_argument("--k", type=int)
    r.add_argument("--eps", type=_fraction)
    r.add_argument("--matrix", help='rational matrix "a,b;c,d" or a laurent-matrix file')
    r.set_defaults(func=cmd_rep)

    v = sub.add_parser("vanish", parents=[common], help="verify the vanishing construction")
    v.add_argument("file")
    v.add_argument("--interval", type=_fraction, default=Fraction(0))
    v.add_argument("--layers", type=int)
    v.add_argument("--window")
    v.set_defaults(func=cmd_vanish)

    q = sub.add_parser("squeeze", parents=[common], help="squeeze into layers")
    q.add_argument("file")
    q.add_argument("--interval", type=_fraction, default=Fraction(0))
    q.add_argument("--layers", type=int, default=5)
    q.set_defaults(func=cmd_squeeze)

    d = sub.add_parser("render", parents=[common], help="SVG picture of a support")
    d.add_argument("file")
    d.add_argument("--window")
    d.set_defaults(func=cmd_render)

    t = sub.add_parser("selftest", parents=[common], help="run the acceptance suite")
    t.set_defaults(func=cmd_selftest)
    return p


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except DocumentError as exc:
        print(f"ctrlk: parse error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except UsageError as exc:
        print(f"ctrlk: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except PreconditionError as exc:
        print(f"ctrlk: precondition failed: {exc}", file=sys.stderr)
        return EXIT_PRECONDITION


if __name__ == "__main__":
    sys.exit(main())
