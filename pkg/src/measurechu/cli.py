"""Command-line front end.

Every subcommand reads one or more workspace files (``--in``, repeatable),
writes canonical JSON to stdout and diagnostics to stderr.  Exit codes:
0 success, 1 usage error, 2 parse/validation error, 3 invariant violation,
4 law-suite failure.
"""

from __future__ import annotations

import argparse
import sys
from fractions import Fraction

from . import chu, laws
from .errors import MeasureChuError, ValidationError
from .expr import parse_expr
from .fourier import char_fn, grid_points, levy_diagnostic, pd_check
from .integration import double_integral, ftc_forward, ftc_inverse, integrate_vector
from .measures import (
    Measure,
    MetaMeasure,
    flatten,
    is_probability,
    measure_to_json,
    meta_to_json,
    product,
    pushforward,
    total_mass,
    total_variation,
    weak_convergence_report,
)
from .scalar import EXACT, FLOAT
from .serialize import (
    dumps,
    load_workspace,
    map_to_json,
    matrix_to_json,
    paired_to_json,
    space_to_json,
    vector_to_json,
)

EXIT_OK, EXIT_USAGE, EXIT_LAWS = 0, 1, 4


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


# helpers ---------------------------------------------------------------------------


def _ws(args):
    if not args.inputs:
        raise UsageError("at least one --in file is required")
    return load_workspace(args.inputs, args.backend)


def _param(text: str, backend: str):
    """Numeric option as an exact rational or a float, matching the backend."""
    try:
        return Fraction(text) if backend == EXACT else float(text)
    except (ValueError, ZeroDivisionError):
        raise UsageError(f"not a number: {text!r}") from None


def _point(text: str) -> tuple[float, ...]:
    try:
        return tuple(float(Fraction(c)) for c in text.split(","))
    except (ValueError, ZeroDivisionError):
        raise UsageError(f"bad point {text!r}; expected comma-separated numbers") from None


def _grid(args, dim: int) -> list[tuple[float, ...]]:
    pts = [_point(p) for p in args.point or []]
    if args.grid:
        lo, hi, k = args.grid
        try:
            pts.extend(grid_points(float(Fraction(lo)), float(Fraction(hi)), int(k), dim))
        except ValueError:
            raise UsageError("--grid takes LO HI K") from None
    if not pts:
        raise UsageError("give sample points with --point or --grid")
    return pts


def _tol(args, default: float) -> float:
    tol = default if args.tol is None else args.tol
    if not tol > 0:
        raise UsageError(f"--tol must be positive, got {tol!r}")
    return tol


def _inner_json(m):
    return measure_to_json(m, True) if isinstance(m, Measure) else meta_to_json(m)


# measure ---------------------------------------------------------------------------


def cmd_measure(args) -> dict:
    ws = _ws(args)
    op = args.op
    if op == "push":
        if not args.map:
            raise UsageError("measure push needs --map")
        f = ws.get("maps", args.map)
        return measure_to_json(pushforward(f, ws.get("measures", _one(args.names))), True)
    if op == "product":
        if len(args.names) != 2:
            raise UsageError("measure product takes two measure names")
        mu, nu = (ws.get("measures", n) for n in args.names)
        return measure_to_json(product(mu, nu), True)
    if op == "flatten":
        pi: MetaMeasure = ws.get("meta_measures", _one(args.names))
        return _inner_json(flatten(pi))
    mu = ws.get("measures", _one(args.names))
    if op == "tv":
        return {"total_variation": total_variation(mu).to_json()}
    return {"is_probability": is_probability(mu), "total_mass": total_mass(mu).to_json(mu.field == "complex")}


def _one(names):
    if len(names) > 1:
        raise UsageError(f"expected at most one name, got {names}")
    return names[0] if names else None


# integration -------------------------------------------------------------------------


def cmd_integrate(args) -> dict:
    ws = _ws(args)
    f = ws.get("vector_fns", args.fn)
    mu = ws.get("measures", args.measure)
    return {"value": vector_to_json(integrate_vector(mu, f))}


def cmd_double(args) -> dict:
    ws = _ws(args)
    f = ws.get("vector_fns", args.fn)
    d = double_integral(f, ws.get("measures", args.mu), ws.get("measures", args.nu))
    out = d.to_json()
    out["agree"] = d.agree() if f.codomain.backend == EXACT else d.agree(_tol(args, 1e-12))
    return out


def cmd_ftc(args) -> dict:
    ws = _ws(args)
    curve = ws.get("curves", args.curve)
    b = curve.backend
    if args.op == "forward":
        res = ftc_forward(curve, _param(args.t or "1", b), args.n)
    else:
        if args.t is None or args.h is None:
            raise UsageError("ftc inverse needs --t and --h")
        res = ftc_inverse(curve, _param(args.t, b), _param(args.h, b), args.n)
    return res.to_json()


# fourier -------------------------------------------------------------------------------


def cmd_char(args) -> dict:
    ws = _ws(args)
    mu = ws.get("measures", args.measure)
    return char_fn(mu, _grid(args, mu.space.dim or 0)).to_json()


def cmd_pd(args) -> dict:
    ws = _ws(args)
    mu = ws.get("measures", args.measure)
    return pd_check(mu, _grid(args, mu.space.dim or 0), _tol(args, 1e-9)).to_json()


def _sequence(ws, args):
    limit = ws.get("measures", args.limit)
    if args.seq:
        seq = [ws.get("measures", n) for n in args.seq]
    else:
        seq = [m for n, m in ws.measures.items() if n != args.limit]
    dim = limit.space.dim or 0
    tests = [(parse_expr(t, dim), t) for t in args.test or []]
    return seq, limit, tests


def cmd_weakconv(args) -> dict:
    ws = _ws(args)
    seq, limit, tests = _sequence(ws, args)
    return weak_convergence_report(seq, limit, tests, _tol(args, 1e-6)).to_json()


def cmd_levy(args) -> dict:
    ws = _ws(args)
    seq, limit, tests = _sequence(ws, args)
    return levy_diagnostic(seq, limit, _grid(args, limit.space.dim or 0), tests, _tol(args, 1e-6)).to_json()


# chu ---------------------------------------------------------------------------------


def cmd_chu(args) -> dict:
    ws = _ws(args)
    op, names = args.op, args.names

    def paired(i):
        return ws.get("paired_spaces", names[i] if i < len(names) else None)

    def need(k):
        if len(names) != k:
            raise UsageError(f"chu {op} takes {k} paired-space name(s)")

    if op == "dual":
        if names and names[0] in ws.paired_maps:
            return map_to_json(chu.dual_map(ws.paired_maps[names[0]]))
        return paired_to_json(chu.dual(paired(0)))
    if op == "hom":
        need(2)
        return paired_to_json(chu.internal_hom(paired(0), paired(1)))
    if op == "tensor":
        need(2)
        return paired_to_json(chu.tensor(paired(0), paired(1)))
    if op == "eta":
        return map_to_json(chu.eta(paired(0)))
    if op == "curry":
        need(3)
        c, u = chu.curry(paired(0), paired(1), paired(2))
        return {"curry": map_to_json(c), "uncurry": map_to_json(u)}
    if op in ("separate", "ext"):
        R = ws.pair(_one(names))
        if op == "separate":
            refl, radical = chu.separate(R), chu.left_radical(R)
        else:
            refl, radical = chu.extensionalize(R), chu.right_radical(R)
        return {
            "pair": paired_to_json(refl.pair),
            "projection": matrix_to_json(refl.projection),
            "radical": [vector_to_json(v) for v in radical],
        }
    if op == "free":
        X = ws.get("spaces", _one(names))
        return paired_to_json(chu.free_paired(X, args.backend or EXACT))
    # extend
    f = ws.get("vector_fns", args.fn or _one(names))
    ext = chu.free_extend(f.domain, f.codomain, f.table)
    return {"space": space_to_json(f.domain), "map": map_to_json(ext)}


# laws ---------------------------------------------------------------------------------


def cmd_laws(args):
    if args.cases < 1:
        raise UsageError("--cases must be positive")
    report = laws.SUITES[args.suite](args.cases, args.seed)
    print(f"laws {args.suite}: {report.wall_time:.3f}s", file=args.err)
    return report.to_json(), (EXIT_OK if report.passed else EXIT_LAWS)


# parser -------------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--in", dest="inputs", action="append", default=[], metavar="FILE",
                        help="workspace JSON file (repeatable)")
    common.add_argument("--backend", choices=(EXACT, FLOAT), default=None,
                        help="backend for objects that do not declare one")
    common.add_argument("--tol", type=float, default=None, help="numerical tolerance")

    p = _Parser(prog="measurechu", description="Finitely supported measures, paired spaces and their laws.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    m = sub.add_parser("measure", parents=[common], help="measure operations")
    m.add_argument("op", choices=("push", "product", "flatten", "tv", "isprob"))
    m.add_argument("names", nargs="*", help="measure (or meta-measure) names")
    m.add_argument("--map", help="map name for push")
    m.set_defaults(func=cmd_measure)

    i = sub.add_parser("integrate", parents=[common], help="integrate a vector function")
    i.add_argument("--fn")
    i.add_argument("--measure")
    i.set_defaults(func=cmd_integrate)

    d = sub.add_parser("double", parents=[common], help="iterated and product integrals")
    d.add_argument("--fn")
    d.add_argument("--mu", required=True)
    d.add_argument("--nu", required=True)
    d.set_defaults(func=cmd_double)

    for name, func, helptext in (("char", cmd_char, "characteristic function on a grid"),
                                 ("pd", cmd_pd, "positive-definiteness check")):
        c = sub.add_parser(name, parents=[common], help=helptext)
        c.add_argument("--measure")
        c.add_argument("--point", action="append", help="sample point 'x1,x2,...' (repeatable)")
        c.add_argument("--grid", nargs=3, metavar=("LO", "HI", "K"), help="uniform K^dim grid on [LO, HI]^dim")
        c.set_defaults(func=func)

    c = sub.add_parser("chu", parents=[common], help="paired-space operations")
    c.add_argument("op", choices=("dual", "hom", "tensor", "eta", "curry", "separate", "ext", "free", "extend"))
    c.add_argument("names", nargs="*", help="paired space / pair / space names")
    c.add_argument("--fn", help="vector function for extend")
    c.set_defaults(func=cmd_chu)

    f = sub.add_parser("ftc", parents=[common], help="fundamental theorem of calculus checks")
    f.add_argument("op", choices=("forward", "inverse"))
    f.add_argument("--curve")
    f.add_argument("--t")
    f.add_argument("--h")
    f.add_argument("--n", type=int, default=10)
    f.set_defaults(func=cmd_ftc)

    for name, func in (("weakconv", cmd_weakconv), ("levy", cmd_levy)):
        w = sub.add_parser(name, parents=[common], help=f"{name} diagnostic")
        w.add_argument("--limit", required=True)
        w.add_argument("--seq", nargs="+", help="sequence of measure names (default: all but the limit)")
        w.add_argument("--test", action="append", help="test function expression (repeatable)")
        if name == "levy":
            w.add_argument("--point", action="append")
            w.add_argument("--grid", nargs=3, metavar=("LO", "HI", "K"))
        w.set_defaults(func=func)

    law = sub.add_parser("laws", help="run a seeded randomized law suite")
    law.add_argument("suite", choices=sorted(laws.SUITES))
    law.add_argument("--cases", type=int, default=100)
    law.add_argument("--seed", type=int, default=0)
    law.set_defaults(func=cmd_laws)
    return p


def run(argv=None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    try:
        args = build_parser().parse_args(argv)
        args.err = err
        result = args.func(args)
        code = EXIT_OK
        if isinstance(result, tuple):
            result, code = result
        out.write(dumps(result))
        return code
    except UsageError as e:
        print(f"usage error: {e}", file=err)
        return EXIT_USAGE
    except MeasureChuError as e:
        kind = "validation error" if isinstance(e, ValidationError) else "invariant violation"
        print(f"{kind}: {e}", file=err)
        return e.exit_code


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
