"""Command-line driver: evaluate operators on files, run identity suites.

Exit codes: 0 when everything asked for holds, 1 when a check or suite
fails, 2 for unusable input (parse errors, rank/dimension mismatches).
"""

from __future__ import annotations

import argparse
import json
import sys

from fvx import calculus as ca
from fvx import forms_core as fc
from fvx import integration as ig
from fvx import io as fio
from fvx import lagrange as lg
from fvx import metric_dual as md
from fvx import mutations as mu
from fvx import suites as su
from fvx.polyfield import COORD_NAMES, Poly, format_poly


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fvx",
        description="Exact exterior calculus on five-vector forms over a flat patch.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    check = sub.add_parser("check", help="run seeded randomized identity suites")
    check.add_argument(
        "--suite",
        action="append",
        choices=su.SUITE_NAMES,
        help="suite to run (repeatable; default: all)",
    )
    check.add_argument("--seed", type=int, default=0)
    check.add_argument("--trials", type=int, default=25, help="instances per identity")
    check.add_argument("--max-degree", type=int, default=3, help="polynomial degree cap")
    check.add_argument("--config", help="metric cfg JSON file")
    check.add_argument("--format", choices=("text", "jsonl"), default="text")
    check.add_argument(
        "--mutate",
        choices=sorted(mu.REGISTRY),
        help="corrupt one operator sign before running (must fail)",
    )
    check.add_argument("--out", help="write the report here instead of stdout")
    check.set_defaults(handler=cmd_check)

    for name, text in (
        ("d", "plain exterior derivative (label-5-free forms)"),
        ("bd", "five-vector exterior derivative"),
        ("bdstar", "reflected five-vector exterior derivative"),
        ("dual", "alternating-tensor dual"),
    ):
        op = sub.add_parser(name, help=text)
        op.add_argument("--form", required=True, help="form JSON file")
        if name == "dual":
            op.add_argument("--config", help="metric cfg JSON file")
        op.add_argument("--out", help="also write the result as JSON here")
        op.set_defaults(handler=cmd_operator, operator=name)

    integrate = sub.add_parser("integrate", help="integrate a form over a surface")
    integrate.add_argument("--form", required=True)
    integrate.add_argument("--surface", required=True)
    integrate.set_defaults(handler=cmd_integrate)

    stokes = sub.add_parser("stokes", help="boundary term against interior derivative")
    stokes.add_argument("--form", required=True)
    stokes.add_argument("--surface", required=True)
    stokes.add_argument(
        "--variant",
        choices=("auto",) + ig.STOKES_VARIANTS,
        default="auto",
    )
    stokes.set_defaults(handler=cmd_stokes)

    flux = sub.add_parser("flux", help="five-vector flux, both routes")
    flux.add_argument("--form", required=True)
    flux.add_argument("--surface", required=True)
    flux.set_defaults(handler=cmd_flux)

    el = sub.add_parser("el", help="Euler-Lagrange report for fields")
    el.add_argument("--lagrangian", required=True)
    el.add_argument("--fields", required=True)
    el.add_argument("--box", help="probe box JSON ([[a,b],...] inline or a file)")
    el.set_defaults(handler=cmd_el)

    return parser


def _write_form(form, path: str | None) -> None:
    if path:
        with open(path, "w") as handle:
            json.dump(fio.form_to_dict(form), handle, sort_keys=True, indent=2)
            handle.write("\n")


def cmd_operator(args) -> int:
    form = fio.load_form(args.form)
    if args.operator == "d":
        if not fc.e_part(form).is_zero:
            raise ValueError("d needs a form without label-5 components")
        result = fc.lift(ca.d4(fc.project(form)))
    elif args.operator == "bd":
        result = ca.bd(form)
    elif args.operator == "bdstar":
        result = ca.bdstar(form)
    else:
        metric = fio.load_metric(args.config) if args.config else md.DEFAULT_CFG
        result = md.dual(form, metric)
    print(fio.form_to_text(result))
    _write_form(result, args.out)
    return 0


def cmd_integrate(args) -> int:
    form = fio.load_form(args.form)
    V = fio.load_surface(args.surface)
    if form.rank == V.dim + 1:
        value = ig.integrate_deg(form, V)
    else:
        value = ig.integrate_m(form, V)
    print(value)
    return 0


def cmd_stokes(args) -> int:
    form = fio.load_form(args.form)
    V = fio.load_surface(args.surface)
    variant = args.variant
    if variant == "auto":
        variant = "rank_eq_dim" if form.rank == V.dim else "rank_eq_dim_plus"
    if variant == "rank_eq_dim_plus":
        if form.rank + 1 != V.dim:
            raise ValueError("variant needs rank + 1 = dim")
        interior = ig.integrate_m(ca.d5(form), V)
    else:
        if form.rank != V.dim:
            raise ValueError("variant needs rank = dim")
        interior = ig.integrate_deg(ca.d5(form), V)
    boundary = ig.boundary_flux(form, V)
    print(f"boundary: {boundary}")
    print(f"interior: {interior}")
    print("EQUAL" if boundary == interior else "DIFFER")
    return 0 if boundary == interior else 1


def cmd_flux(args) -> int:
    form = fio.load_form(args.form)
    V = fio.load_surface(args.surface)
    direct = ig.five_flux(form, V)
    derivative = ig.integrate_deg(ca.bd(form), V)
    print(f"boundary+interior: {direct}")
    print(f"derivative route: {derivative}")
    print("EQUAL" if direct == derivative else "DIFFER")
    return 0 if direct == derivative else 1


def _probe_box(arg: str | None) -> ig.ParamSurface:
    if arg is None:
        return lg.unit_probe_box()
    text = arg.strip()
    data = json.loads(text) if text.startswith("[") else fio.load_json(arg)
    if not isinstance(data, list) or len(data) != 4:
        raise fio.FormatError("box: expected four [a, b] pairs")
    box = tuple(
        (fio.parse_rational(pair[0], f"box[{k}][0]"), fio.parse_rational(pair[1], f"box[{k}][1]"))
        for k, pair in enumerate(data)
    )
    maps = tuple(Poly.variable(k, 4) for k in range(4))
    return ig.ParamSurface(4, maps, box)


def cmd_el(args) -> int:
    L = fio.load_lagrangian(args.lagrangian)
    phi = fio.load_fields(args.fields)
    V = _probe_box(args.box)
    report = lg.el_report(L, phi, V)
    for ell in range(L.n_fields):
        residual = report.residuals[ell]
        print(f"field {ell}:")
        print(f"  residual: {format_poly(residual, COORD_NAMES)}")
        print(f"  current/source match: {'yes' if lg.check_51(L, phi, ell) else 'no'}")
        print(f"  closed-form check: {'yes' if lg.check_55(L, phi, ell) else 'no'}")
        print(f"  probe flux: {report.flux_values[ell]}")
    print("solution" if report.is_solution else "not a solution")
    return 0 if report.is_solution else 1


def cmd_check(args) -> int:
    metric = fio.load_metric(args.config) if args.config else md.DEFAULT_CFG
    cfg = su.SuiteConfig(
        seed=args.seed,
        trials=args.trials,
        max_degree=args.max_degree,
        metric=metric,
        suites=tuple(args.suite) if args.suite else su.SUITE_NAMES,
    )
    if args.mutate:
        with mu.apply_mutation(args.mutate):
            report = su.run_suite(cfg)
    else:
        report = su.run_suite(cfg)
    text = su.emit_report(report, args.format)
    if args.out:
        with open(args.out, "w") as handle:
            handle.write(text)
    else:
        sys.stdout.write(text)
    return 0 if report.passed else 1


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.handler(args)
    except (fio.FormatError, ValueError, KeyError) as exc:
        print(f"fvx: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
