"""Command-line driver: ``qshadow category|cy|shadow|compare|pachner``.

Exit codes are 0 for success or PASS, 1 for a failed check or a FAIL
comparison, and 2 for usage or input errors (including a resource-guard
refusal).

With ``--format record`` results are printed one ``key=value`` per line.
The keys for ``cy`` and ``shadow`` are

    invariant_exact     exact literal, or ``none`` on the float backend
    invariant_float_re  real part of the value
    invariant_float_im  imaginary part of the value
    colorings           number of admissible colorings summed
    seconds             wall time of the evaluation
    backend             exact or float
    category            category name

plus ``strategy`` and ``estimate`` for ``cy``.  ``compare`` prints the cy
keys prefixed ``cy_``, the shadow keys prefixed ``shadow_``, and
``result=PASS`` or ``result=FAIL``.
"""

from __future__ import annotations

import argparse
import os
import sys
import time

from . import category as catmod
from . import cy, shadow, simplicial
from .scalar import DEFAULT_TOL, Cyclo, format_complex

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def _data_file(path: str, suffix: str) -> str:
    """Existing path, else a shipped data file of that name."""
    if os.path.exists(path):
        return path
    name = path if path.endswith(suffix) else path + suffix
    cand = simplicial.data_path(name)
    if os.path.exists(cand):
        return cand
    raise UsageError(f"no such file: {path}")


def load_triangulation(path: str) -> simplicial.Complex4:
    return simplicial.load(_data_file(path, ".tri"))


def load_shadow(path: str) -> shadow.ShadowPolyhedron:
    return shadow.load(_data_file(path, ".shadow"))


def load_category(source: str, backend: str | None, tol: float):
    c = catmod.resolve(source, tol)
    if backend == "float":
        return catmod.as_float(c, tol)
    if backend == "exact" and not c.exact:
        raise UsageError(f"category {c.name} has float data only; use --backend float")
    return c


def _parts(value) -> dict:
    z = complex(value.to_complex()) if isinstance(value, Cyclo) else complex(value.value)
    return {
        "invariant_exact": value.literal() if isinstance(value, Cyclo) else "none",
        "invariant_float_re": repr(z.real + 0.0),
        "invariant_float_im": repr(z.imag + 0.0),
    }


def _text_value(value, tol: float) -> list[str]:
    if isinstance(value, Cyclo):
        return [value.literal(), f"  ~ {format_complex(value.to_complex(), tol)}"]
    return [value.literal()]


def _emit(lines: dict, fmt: str, text: list[str]) -> None:
    if fmt == "record":
        for k, v in lines.items():
            print(f"{k}={v}")
    else:
        print("\n".join(text))


def _run_cy(args, cat):
    c = load_triangulation(args.triangulation)
    opts = cy.CYOptions(strategy=args.strategy, threads=args.threads, force=args.force,
                        flip=args.flip_orientation)
    return cy.cy_state_sum(c, cat, opts)


def _run_shadow(args, cat):
    p = load_shadow(args.shadow)
    t0 = time.perf_counter()
    res = shadow.shadow_state_sum(p, cat, force=args.force)
    return res, time.perf_counter() - t0


def _cy_record(res, cat) -> dict:
    rec = _parts(res.value)
    rec.update(colorings=res.colorings, seconds=f"{res.seconds:.3f}", backend="exact" if cat.exact else "float",
               category=cat.name, strategy=res.strategy, estimate=f"{res.estimate:.6g}")
    return rec


def _shadow_record(res, secs, cat) -> dict:
    rec = _parts(res.value)
    rec.update(colorings=res.colorings, seconds=f"{secs:.3f}", backend="exact" if cat.exact else "float",
               category=cat.name)
    return rec


def cmd_category(args) -> int:
    c = load_category(args.category, None, args.tol)
    if args.action == "info":
        print(catmod.info(c))
        return EXIT_OK
    rep = catmod.validate(c)
    print(rep.format(c.labels))
    return EXIT_OK if rep.ok else EXIT_FAIL


def cmd_cy(args) -> int:
    cat = load_category(args.category, args.backend, args.tol)
    res = _run_cy(args, cat)
    text = _text_value(res.value, args.tol)
    text.append(f"  colorings {res.colorings}  strategy {res.strategy}  seconds {res.seconds:.3f}")
    _emit(_cy_record(res, cat), args.format, text)
    return EXIT_OK


def cmd_shadow(args) -> int:
    cat = load_category(args.category, args.backend, args.tol)
    res, secs = _run_shadow(args, cat)
    text = _text_value(res.value, args.tol)
    text.append(f"  colorings {res.colorings}  b2 {res.b2}  nullity {res.nullity}  seconds {secs:.3f}")
    _emit(_shadow_record(res, secs, cat), args.format, text)
    return EXIT_OK


def cmd_compare(args) -> int:
    cat = load_category(args.category, args.backend, args.tol)
    a = _run_cy(args, cat)
    b, secs = _run_shadow(args, cat)
    same = a.value.equals(b.value)
    verdict = "PASS" if same else "FAIL"
    if args.format == "record":
        rec = {f"cy_{k}": v for k, v in _cy_record(a, cat).items()}
        rec.update({f"shadow_{k}": v for k, v in _shadow_record(b, secs, cat).items()})
        rec["result"] = verdict
        _emit(rec, "record", [])
    else:
        print(f"cy      {'  '.join(_text_value(a.value, args.tol)).replace('    ', '  ')}")
        print(f"shadow  {'  '.join(_text_value(b.value, args.tol)).replace('    ', '  ')}")
        print(verdict)
    return EXIT_OK if same else EXIT_FAIL


def _parse_site(c: simplicial.Complex4, move: str, text: str):
    if "," in text:
        try:
            return tuple(sorted(int(v) for v in text.split(",") if v))
        except ValueError:
            raise UsageError(f"bad site {text!r}") from None
    try:
        k = int(text)
    except ValueError:
        raise UsageError(f"bad site {text!r}; give an index or comma-separated vertices") from None
    avail = simplicial.sites(c, move)
    if not 0 <= k < len(avail):
        raise UsageError(f"site index {k} out of range: {len(avail)} sites admit move {move}")
    return avail[k]


def cmd_pachner(args) -> int:
    c = load_triangulation(args.triangulation)
    if args.list:
        for k, s in enumerate(simplicial.sites(c, args.move)):
            print(k, ",".join(map(str, s)))
        return EXIT_OK
    if args.site is None:
        raise UsageError("a site is required unless --list is given")
    site = _parse_site(c, args.move, args.site)
    try:
        out = simplicial.pachner(c, args.move, site)
    except simplicial.MoveError as exc:
        raise UsageError(str(exc)) from None
    text = simplicial.dumps(out, signs=True)
    if args.output and args.output != "-":
        with open(args.output, "w") as fh:
            fh.write(text)
        print(f"wrote {args.output}: {len(out.facets)} facets, f-vector {list(out.fvector)}", file=sys.stderr)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def _positive_float(s: str) -> float:
    v = float(s)
    if not v > 0:
        raise argparse.ArgumentTypeError("must be > 0")
    return v


def _positive_int(s: str) -> int:
    v = int(s)
    if v < 1:
        raise argparse.ArgumentTypeError("must be >= 1")
    return v


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--tol", type=_positive_float, default=DEFAULT_TOL,
                        help="float equality tolerance (default %(default)g)")
    run = argparse.ArgumentParser(add_help=False)
    run.add_argument("--category", required=True, help="builtin name or category file")
    run.add_argument("--backend", choices=("exact", "float"), default=None,
                     help="arithmetic backend (default: that of the category data)")
    run.add_argument("--threads", type=_positive_int, default=None,
                     help="worker processes (default: $QSHADOW_THREADS or 1)")
    run.add_argument("--force", action="store_true", help="bypass the resource guard")
    run.add_argument("--flip-orientation", action="store_true", help="use the opposite orientation class")
    run.add_argument("--format", choices=("text", "record"), default="text")
    run.add_argument("--strategy", choices=cy.STRATEGIES, default="auto",
                     help="coloring strategy for cy")

    ap = argparse.ArgumentParser(prog="qshadow", description="Crane-Yetter and shadow state sums.")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("category", parents=[common], help="validate or describe a category")
    p.add_argument("action", choices=("validate", "info"))
    p.add_argument("category", help="builtin name or category file")
    p.set_defaults(func=cmd_category)

    p = sub.add_parser("cy", parents=[common, run], help="state sum of a triangulation")
    p.add_argument("triangulation")
    p.set_defaults(func=cmd_cy)

    p = sub.add_parser("shadow", parents=[common, run], help="state sum of a shadow polyhedron")
    p.add_argument("shadow")
    p.set_defaults(func=cmd_shadow)

    p = sub.add_parser("compare", parents=[common, run], help="compare the two state sums")
    p.add_argument("triangulation")
    p.add_argument("shadow")
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("pachner", help="apply a bistellar move")
    p.add_argument("triangulation")
    p.add_argument("move", choices=simplicial.MOVES)
    p.add_argument("site", nargs="?", help="site index (see --list) or comma-separated vertices, e.g. 0,1,2 or 6,")
    p.add_argument("output", nargs="?", help="output file (default stdout)")
    p.add_argument("--list", action="store_true", help="list the admissible sites")
    p.set_defaults(func=cmd_pachner)
    return ap


def main(argv: list[str] | None = None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    try:
        return args.func(args)
    except cy.ResourceLimit as exc:
        print(f"qshadow: refused: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (UsageError, OSError, catmod.CategoryError, simplicial.ComplexError,
            shadow.ShadowError, cy.CYError) as exc:
        print(f"qshadow: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
