"""Command-line entry point.

Exit status: 0 on success, 1 when a check finds violations, 2 on input errors.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import cohomology, deformation, io, reduced, transform
from .exact import format_rational
from .intertwiner import enumerate_m_tuples, lambda_table, validate_scheme
from .io import InputError

OK, VIOLATIONS, BAD_INPUT = 0, 1, 2


def _ints(text: str) -> list[int]:
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def _scheme(text: str):
    def conv(x):
        if isinstance(x, int):
            return x
        if isinstance(x, list) and len(x) == 2:
            return (conv(x[0]), conv(x[1]))
        raise argparse.ArgumentTypeError(f"malformed scheme {text!r}")

    try:
        return conv(json.loads(text))
    except json.JSONDecodeError:
        raise argparse.ArgumentTypeError(f"scheme must be nested JSON lists, got {text!r}") from None


def _read(path: str) -> bytes:
    try:
        return Path(path).read_bytes()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from None


def _emit(args, obj) -> None:
    text = io.dumps(obj)
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _space(args):
    return io.parse_space(_read(args.space))


def _space_f(args):
    space = _space(args)
    return space, io.parse_structure_constants(_read(args.f), space)


# ---------------------------------------------------------------------------
# commands


def cmd_lambda(args):
    table = lambda_table(args.a, args.b, args.c)
    _emit(args, {f"({p},{q})": format_rational(v) for (p, q), v in table.items()})
    return OK


def cmd_tbasis(args):
    if args.scheme is not None:
        validate_scheme(args.scheme, len(args.dims))
    basis = enumerate_m_tuples(args.scheme, args.dims, args.e)
    _emit(args, [b.to_json() for b in basis])
    return OK


def _eps_policy(args):
    return "limit" if getattr(args, "eps_limit", False) else args.eps


def cmd_ymatrix(args):
    # a degenerate multiplier set is detected by the solver; retry with the other one
    order = [args.regulator_set] + [r for r in sorted(transform.REGULATOR_SETS) if r != args.regulator_set]
    for regset in order:
        dims = transform.regulate((args.a, args.b, args.c), regulator_set=regset)
        try:
            mat = transform.y_matrix(*dims, args.n, method=args.method)
        except transform.DegenerateRegulatorError:
            continue
        out = io.matrix_json(mat, _eps_policy(args))
        if regset != args.regulator_set:
            out["regulatorSet"] = regset
        _emit(args, out)
        return OK
    raise InputError("every regulator set is degenerate for this block")


def cmd_zmatrix(args):
    perm = args.perm
    if sorted(perm) != list(range(1, len(args.dims) + 1)):
        raise InputError(f"--perm must be a permutation of 1..{len(args.dims)}")
    dims = transform.regulate(args.dims, regulator_set=args.regulator_set)
    mat = transform.z_matrix(dims, perm, args.source, args.target, args.n)
    _emit(args, io.matrix_json(mat, _eps_policy(args)))
    return OK


def _default_cutoff(space):
    return 3 * max(space.grades)


def cmd_constraints_generate(args):
    space = _space(args)
    cutoff = args.max_total_grade or _default_cutoff(space)
    system = reduced.generate_constraints(space, cutoff, args.regulator_set, all_orders=args.eps == "laurent")
    _emit(args, io.constraints_json(system))
    return OK


def cmd_constraints_check(args):
    space, F = _space_f(args)
    if args.constraints:
        system = io.parse_constraints(_read(args.constraints))
    else:
        cutoff = args.max_total_grade or _default_cutoff(space)
        system = reduced.generate_constraints(space, cutoff, args.regulator_set, all_orders=args.eps == "laurent")
    report = reduced.check_constraints(system, F, require_all=False)
    _emit(args, io.violations_json(report))
    return VIOLATIONS if report["violations"] else OK


def cmd_invariance_check(args):
    space, F = _space_f(args)
    G = io.parse_gram(_read(args.gram), space)
    res = [r for r in reduced.invariance_residuals(space, F, G) if r["residual"] != 0]
    _emit(args, {"violations": [dict(r, residual=format_rational(r["residual"])) for r in res]})
    return VIOLATIONS if res else OK


def cmd_gram_check(args):
    G = io.parse_gram(_read(args.gram))
    ok, witness = reduced.gram_positivity_check(G)
    out = {"positive": ok}
    if witness is not None:
        out["witness"] = json.loads(json.dumps(witness, default=format_rational))
    _emit(args, out)
    return OK if ok else VIOLATIONS


def _sector(args):
    return args.sector or [1]


def cmd_cohomology_dims(args):
    space, F = _space_f(args)
    try:
        dims = cohomology.rlh_dims(space, F, args.degree, _sector(args))
    except cohomology.SectorError as exc:
        raise InputError(str(exc)) from None
    _emit(args, dims)
    return OK


def cmd_cohomology_bb(args):
    space, F = _space_f(args)
    res = cohomology.bb_test(space, F, args.degree, args.seed, args.cutoff)
    out = {"degree": res["degree"], "seed": res["seed"], "pass": res["pass"]}
    if res["offending"] is not None:
        off = res["offending"]
        out["offending"] = {
            "labels": list(off["labels"]),
            "m": list(off["m"]),
            "component": off["component"],
            "value": io.scalar_json(off["value"]),
        }
    _emit(args, out)
    return OK if res["pass"] else VIOLATIONS


def _zsym_or_fail(omega, space, sector):
    labels = [lab for a in sector for lab in space.fields(a)]
    bad = cohomology.zsym_check(omega, labels=labels, at_limit=True)
    if bad:
        v = bad[0]
        raise InputError(f"cochain is not Z-symmetric at {list(v['labels'])}, m={list(v['m'])}")


def cmd_deform_first(args):
    space, F = _space_f(args)
    gamma1 = io.parse_cochain(_read(args.gamma1), space, 2)
    _zsym_or_fail(gamma1, space, _sector(args))
    try:
        ok, res = deformation.first_order_cocycle_check(space, F, gamma1, _sector(args))
    except cohomology.SectorError as exc:
        raise InputError(str(exc)) from None
    out = {"cocycle": ok}
    if res is not None:
        out["residual"] = {"labels": list(res["labels"]), "m": list(res["m"]), "component": res["component"], "value": io.scalar_json(res["value"])}
    _emit(args, out)
    return OK if ok else VIOLATIONS


def _series(args, space, F):
    terms = io.parse_series(_read(args.series), space)
    for t in terms:
        _zsym_or_fail(t, space, _sector(args))
    return deformation.DeformationSeries(F, terms)


def cmd_deform_obstruct(args):
    space, F = _space_f(args)
    series = _series(args, space, F)
    try:
        deformation._require_closed(space, F, _sector(args))
        g = deformation.obstruction_Gn(space, series, args.order)
        bg = deformation.bG_test(space, F, series, args.order, _sector(args))
        exact = deformation.in_coboundary_image(space, F, g, 3, _sector(args))
    except (cohomology.SectorError, ValueError) as exc:
        raise InputError(str(exc)) from None
    _emit(args, {"order": args.order, "G": io.cochain_json(g, _sector(args)), "inB3": exact, "bG": bg["holds"]})
    return OK if exact else VIOLATIONS


def cmd_deform_integrate(args):
    space, F = _space_f(args)
    series = _series(args, space, F)
    try:
        res = deformation.integrate_step(space, F, series, args.order, _sector(args))
        bg = deformation.bG_test(space, F, series, args.order, _sector(args))
    except (cohomology.SectorError, ValueError) as exc:
        raise InputError(str(exc)) from None
    if isinstance(res, deformation.Obstructed):
        wit = json.loads(json.dumps(res.witness, default=format_rational))
        _emit(args, {"order": args.order, "obstructed": True, "witness": wit, "bG": bg["holds"]})
        return VIOLATIONS
    _emit(args, {
        "order": args.order,
        "obstructed": False,
        "gamma": io.cochain_json(res["gamma"]),
        "ambiguityDim": res["ambiguity_dim"],
        "bG": bg["holds"],
    })
    return OK


# ---------------------------------------------------------------------------
# parser


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", help="write JSON here instead of stdout")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--regulator-set", choices=sorted(transform.REGULATOR_SETS), default="3pow")
    common.add_argument("--eps", choices=io.EPS_POLICIES, default="generic")

    parser = argparse.ArgumentParser(prog="wconformal", description="Exact intertwiner and reduced-algebra computations.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("lambda", parents=[common], help="local intertwiner coefficients")
    for k in ("a", "b", "c"):
        p.add_argument(f"--{k}", type=int, required=True)
    p.set_defaults(func=cmd_lambda)

    p = sub.add_parser("tbasis", parents=[common], help="multi-argument intertwiner basis")
    p.add_argument("--dims", type=_ints, required=True)
    p.add_argument("--e", type=int, required=True)
    p.add_argument("--scheme", type=_scheme)
    p.set_defaults(func=cmd_tbasis)

    p = sub.add_parser("ymatrix", parents=[common], help="cyclic transformation matrix")
    for k in ("a", "b", "c", "n"):
        p.add_argument(f"--{k}", type=int, required=True)
    p.add_argument("--method", choices=sorted(transform.Y_METHODS), default="closed")
    p.add_argument("--eps-limit", action="store_true", help="same as --eps limit")
    p.set_defaults(func=cmd_ymatrix)

    p = sub.add_parser("zmatrix", parents=[common], help="permutation matrix between intertwiner bases")
    p.add_argument("--dims", type=_ints, required=True)
    p.add_argument("--perm", type=_ints, required=True)
    p.add_argument("--n", type=int, default=0, help="block (total order)")
    p.add_argument("--source", type=_scheme)
    p.add_argument("--target", type=_scheme)
    p.add_argument("--eps-limit", action="store_true")
    p.set_defaults(func=cmd_zmatrix)

    def with_space(p, f=True):
        p.add_argument("--space", required=True)
        if f:
            p.add_argument("--f", required=True)

    cons = sub.add_parser("constraints", help="reduced Jacobi constraint systems").add_subparsers(dest="action", required=True)
    p = cons.add_parser("generate", parents=[common])
    with_space(p, f=False)
    p.add_argument("--max-total-grade", type=int)
    p.set_defaults(func=cmd_constraints_generate)
    p = cons.add_parser("check", parents=[common])
    with_space(p)
    p.add_argument("--max-total-grade", type=int)
    p.add_argument("--constraints", help="previously generated system")
    p.set_defaults(func=cmd_constraints_check)

    inv = sub.add_parser("invariance", help="two-point invariance").add_subparsers(dest="action", required=True)
    p = inv.add_parser("check", parents=[common])
    with_space(p)
    p.add_argument("--gram", required=True)
    p.set_defaults(func=cmd_invariance_check)

    gram = sub.add_parser("gram", help="Gram matrix positivity").add_subparsers(dest="action", required=True)
    p = gram.add_parser("check", parents=[common])
    p.add_argument("--gram", required=True)
    p.set_defaults(func=cmd_gram_check)

    coh = sub.add_parser("cohomology", help="cochain complex").add_subparsers(dest="action", required=True)
    p = coh.add_parser("dims", parents=[common])
    with_space(p)
    p.add_argument("--degree", type=int, required=True)
    p.add_argument("--sector", type=_ints, help="grades of a closed sector (default 1)")
    p.set_defaults(func=cmd_cohomology_dims)
    p = coh.add_parser("bb-test", parents=[common])
    with_space(p)
    p.add_argument("--degree", type=int, choices=[1, 2], required=True)
    p.add_argument("--cutoff", type=int, default=2)
    p.set_defaults(func=cmd_cohomology_bb)

    dfm = sub.add_parser("deform", help="formal deformations").add_subparsers(dest="action", required=True)
    p = dfm.add_parser("check-first-order", parents=[common])
    with_space(p)
    p.add_argument("--gamma1", required=True)
    p.add_argument("--sector", type=_ints)
    p.set_defaults(func=cmd_deform_first)
    for name, fn in (("obstruct", cmd_deform_obstruct), ("integrate", cmd_deform_integrate)):
        p = dfm.add_parser(name, parents=[common])
        with_space(p)
        p.add_argument("--order", type=int, required=True)
        p.add_argument("--series", required=True)
        p.add_argument("--sector", type=_ints)
        p.set_defaults(func=fn)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return BAD_INPUT if exc.code else OK
    try:
        return args.func(args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return BAD_INPUT
    except (reduced.SpaceError, ValueError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return BAD_INPUT


if __name__ == "__main__":
    sys.exit(main())
