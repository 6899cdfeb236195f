"""Command-line front end.

    lbm-isotropy list
    lbm-isotropy expand --scheme d2q9 --set d2q9.order1 --params alpha=2 --order 1
    lbm-isotropy verify --set d3q19.order3a
    lbm-isotropy coeffs --set d3q27.order3a --params alpha=-1,sigma4=1/2,sigma5=1
    lbm-isotropy dispersion --set d2q9.order3 --format json
    lbm-isotropy figure1 --grid 0.05:1.45:0.05 --format csv

``--scheme`` takes a built-in name or a path to a scheme file.  Parameter
values are exact: ``1/3``, ``-2`` and ``0.05`` are all accepted.

Exit codes: 0 success, 1 verification failure (verify, or coeffs at an
anisotropic point), 2 usage or validation error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from pathlib import Path

from . import __version__
from .algebra import AlgebraError, HomPoly, OpMatrix, format_rational, rational_record, to_rational
from .conditions import (CONDITION_SETS, FIGURE1_COLUMNS, ConditionError, apply_conditions, evaluate_point, figure1_csv,
                         figure1_data, get_condition_set, parse_grid, report_to_dict, sample_free_points, verify_order)
from .config import load_scheme_file
from .dispersion import (DispersionError, anisotropy_order_fit, direction_fan, dispersion_sweep, log_magnitudes,
                         pde_mismatch_fit, report_dict, samples_csv)
from .expansion import MAX_ORDER, ExpansionError, expand
from .expr import ExpressionError
from .isotropy import IsotropyError, decompose_expansion, extract_physical
from .lattices import BUILTIN_NAMES, load_builtin
from .scheme import ParameterError, ParamPoint, SchemeError

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2
_DERIV = ("dx", "dy", "dz")


class UsageError(ValueError):
    pass


# ---------------------------------------------------------------------------
# argument helpers

def parse_assignments(items: list[str] | None) -> dict:
    """``["a=1/2,b=3", "c=-1"]`` -> exact rationals; repeated names are rejected."""
    out = {}
    for item in items or []:
        for part in item.split(","):
            part = part.strip()
            if not part:
                continue
            name, sep, value = part.partition("=")
            name = name.strip()
            if not sep or not name:
                raise UsageError(f"expected name=value, got {part!r}")
            if name in out:
                raise UsageError(f"parameter {name!r} given twice")
            try:
                out[name] = to_rational(value)
            except (TypeError, ValueError):
                raise UsageError(f"{name}: {value.strip()!r} is not an exact rational") from None
    return out


def _resolve(args):
    """(scheme, condition set or None); the set's scheme when --scheme is omitted."""
    cs = get_condition_set(args.set) if getattr(args, "set", None) else None
    spec = args.scheme
    if spec is None:
        if cs is None:
            raise UsageError("give --scheme, --set or both")
        return load_builtin(cs.scheme), cs, False
    if spec.lower() in BUILTIN_NAMES:
        if cs is not None and cs.scheme != spec.lower():
            raise UsageError(f"condition set {cs.name} belongs to {cs.scheme}, not {spec.lower()}")
        return load_builtin(spec.lower()), cs, False
    path = Path(spec)
    if not path.is_file():
        raise UsageError(f"{spec!r} is neither a built-in scheme ({', '.join(BUILTIN_NAMES)}) nor a readable file")
    return load_scheme_file(path), cs, True


def _free_point(cs, params):
    """The given free values, or the first deterministic sample when none are given."""
    if params:
        return dict(params)
    return sample_free_points(cs, 1)[0]


def _point(args, scheme, cs, custom):
    params = parse_assignments(args.params)
    if cs is None:
        point = ParamPoint(params)
        scheme.check_point(point)
        return point, None
    free = _free_point(cs, params)
    return apply_conditions(cs, free, scheme=scheme if custom else None,
                            overrides=parse_assignments(getattr(args, "override", None))), free


def _order(args, cs) -> int:
    order = args.order if args.order is not None else (cs.order if cs is not None else None)
    if order is None:
        raise UsageError("--order is required without --set")
    if not 1 <= order <= MAX_ORDER:
        raise UsageError(f"order {order} outside 1..{MAX_ORDER} (expansion is capped at order {MAX_ORDER})")
    return order


def _write(args, text: str) -> None:
    if args.output:
        Path(args.output).write_text(text, encoding="utf-8", newline="\n")
    else:
        sys.stdout.write(text)


def _json(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True, ensure_ascii=False) + "\n"


def _csv(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def _monomial(exps) -> str:
    parts = [d + (f"^{e}" if e > 1 else "") for d, e in zip(_DERIV, exps) if e]
    return "*".join(parts) or "1"


def _poly_terms(p: HomPoly) -> list[dict]:
    return [{"monomial": _monomial(e), **rational_record(c)} for e, c in sorted(p.items())]


# ---------------------------------------------------------------------------
# commands

def cmd_list(args) -> int:
    sets = [{"name": cs.name, "scheme": cs.scheme, "order": cs.order, "revised": cs.revised,
             "free": list(cs.free_names), "required": list(cs.required)} for cs in CONDITION_SETS.values()]
    schemes = []
    for name in BUILTIN_NAMES:
        s = load_builtin(name)
        schemes.append({"name": name, "d": s.dim, "q": s.q, "conserved": s.n_conserved,
                        "parameters": list(s.parameter_names)})
    if args.format == "json":
        _write(args, _json({"schemes": schemes, "condition_sets": sets}))
    elif args.format == "csv":
        _write(args, _csv(["set", "scheme", "order", "revised", "required", "free"],
                          [[s["name"], s["scheme"], s["order"], s["revised"], " ".join(s["required"]), " ".join(s["free"])]
                           for s in sets]))
    else:
        lines = ["schemes:"] + [f"  {s['name']}  d={s['d']} q={s['q']} N={s['conserved']}" for s in schemes]
        lines.append("condition sets:")
        lines += [f"  {s['name']:<16} order {s['order']}  required: {', '.join(s['required'])}" for s in sets]
        _write(args, "\n".join(lines) + "\n")
    return EXIT_OK


def _op_records(op: OpMatrix, rows, cols) -> list[dict]:
    out = []
    for i, r in enumerate(rows):
        for j, c in enumerate(cols):
            p = op[i, j]
            if not p.is_zero():
                out.append({"row": r, "col": c, "terms": _poly_terms(p)})
    return out


def cmd_expand(args) -> int:
    scheme, cs, custom = _resolve(args)
    order = _order(args, cs)
    point, free = _point(args, scheme, cs, custom)
    result = expand(scheme, point, order)
    names = [m.name for m in scheme.moments]
    cons, slave = names[: scheme.n_conserved], names[scheme.n_conserved:]
    ops = [(f"alpha_{j}", result.alpha(j), cons, cons) for j in range(1, order + 1)]
    ops += [(f"beta_{j}", result.beta(j), slave, cons) for j in range(1, order)]
    if args.format == "json":
        _write(args, _json({"scheme": scheme.name, "set": cs.name if cs else None, "order": order,
                            "point": point.as_strings(),
                            "operators": {label: _op_records(op, r, c) for label, op, r, c in ops}}))
    elif args.format == "csv":
        rows = [[label, rec["row"], rec["col"], t["monomial"], t["exact"], t["decimal"]]
                for label, op, r, c in ops for rec in _op_records(op, r, c) for t in rec["terms"]]
        _write(args, _csv(["operator", "row", "col", "monomial", "exact", "decimal"], rows))
    else:
        lines = [f"{scheme}  order {order}", "point: " + ", ".join(f"{k}={v}" for k, v in point.as_strings().items())]
        for label, op, r, c in ops:
            lines.append(f"{label}:")
            for rec in _op_records(op, r, c):
                body = " + ".join(f"{t['exact']}*{t['monomial']}" for t in rec["terms"]).replace("+ -", "- ")
                lines.append(f"  [{rec['row']}, {rec['col']}] {body}")
        _write(args, "\n".join(lines) + "\n")
    return EXIT_OK


def _passed(report, accept_errata: bool) -> bool:
    exact = report.errata_explained if accept_errata else report.formulas_exact
    return report.isotropic and exact and report.stable


def _failure_message(report) -> str:
    p = report.first_failure
    if p is None:
        return f"{report.set_name}: not verified"
    where = ", ".join(f"{k}={format_rational(v)}" for k, v in sorted(p.free.items()))
    if p.first_anisotropic_order is not None:
        return f"{report.set_name}: anisotropic at order {p.first_anisotropic_order} at {where}"
    if not p.stability.ok:
        return f"{report.set_name}: unstable at {where}: " + "; ".join(p.stability.failures)
    bad = ", ".join(f"{c.name} ({c.status})" for c in p.comparisons if c.status != "match")
    return f"{report.set_name}: order {report.order} coefficients differ from the closed forms at {where}: {bad}"


def cmd_verify(args) -> int:
    scheme, cs, custom = _resolve(args)
    if cs is None:
        raise UsageError("verify needs --set")
    params = parse_assignments(args.params)
    samples = [params] if params else sample_free_points(cs, args.samples)
    report = verify_order(cs, samples, scheme=scheme if custom else None, overrides=parse_assignments(args.override),
                          allow_boundary=args.allow_boundary, control=not args.no_control)
    ok = _passed(report, args.accept_errata)
    data = report_to_dict(report)
    data["passed"] = ok
    data["accept_errata"] = args.accept_errata
    if args.format == "json":
        _write(args, _json(data))
    elif args.format == "csv":
        rows = []
        for i, p in enumerate(report.points):
            free = " ".join(f"{k}={format_rational(v)}" for k, v in sorted(p.free.items()))
            for c in p.comparisons:
                rows.append([i, free, c.name, c.status, format_rational(c.engine), format_rational(c.expected),
                             "" if c.corrected is None else format_rational(c.corrected)])
            if not all(p.isotropic):
                rows.append([i, free, "", f"anisotropic@{p.first_anisotropic_order}", "", "", ""])
        _write(args, _csv(["point", "free", "coefficient", "status", "engine", "formula", "corrected"], rows))
    else:
        counts = report.status_counts()
        lines = [f"{report.set_name}: {len(report.points)} point(s), order {report.order}",
                 f"  isotropic: {report.isotropic}  stable: {report.stable}",
                 f"  comparisons: {counts['match']} match, {counts['erratum']} erratum, {counts['mismatch']} mismatch"]
        for name, status in sorted(report.mismatched_names().items()):
            lines.append(f"  {name}: {status}")
        if report.negative_control is not None:
            nc = report.negative_control
            lines.append(f"  negative control ({nc.description}): residual {'nonzero' if nc.residual_nonzero else 'ZERO'}")
        lines.append("VERIFIED" if ok else "NOT VERIFIED")
        _write(args, "\n".join(lines) + "\n")
    if not ok:
        print(_failure_message(report), file=sys.stderr)
        return EXIT_FAIL
    return EXIT_OK


def cmd_coeffs(args) -> int:
    scheme, cs, custom = _resolve(args)
    order = _order(args, cs)
    comparisons, windows = [], []
    if cs is not None and args.order is None:
        free = _free_point(cs, parse_assignments(args.params))
        res = evaluate_point(cs, free, scheme=scheme if custom else None, overrides=parse_assignments(args.override),
                             allow_boundary=True)
        point, iso, values, extras = res.point, res.isotropic, res.coefficients, res.extras
        comparisons, windows = res.comparisons, res.windows
    else:
        point, _ = _point(args, scheme, cs, custom)
        decs = decompose_expansion(expand(scheme, point, order))
        iso = [d.isotropic for d in decs]
        values, extras = None, {}
        if all(iso):
            phys = extract_physical(decs, point)
            values, extras = phys.values, phys.extras
    window_recs = [{"constraint": lab, "status": st, "hard": hard} for lab, st, hard in windows]
    for lab, st, hard in windows:
        if st != "inside":
            print(f"constraint {lab}: {st}", file=sys.stderr)
    if values is None:
        bad = iso.index(False) + 1
        print(f"{scheme.name}: anisotropic at order {bad}; no physical coefficients", file=sys.stderr)
        if args.format == "json":
            _write(args, _json({"scheme": scheme.name, "point": point.as_strings(), "isotropic": iso,
                                "windows": window_recs}))
        return EXIT_FAIL
    by_name = {c.name: c for c in comparisons}
    records = []
    for name in sorted(values):
        rec = {"name": name, **rational_record(values[name])}
        c = by_name.get(name)
        if c is not None:
            rec["formula"] = format_rational(c.expected)
            rec["status"] = c.status
        records.append(rec)
    if args.format == "json":
        _write(args, _json({"scheme": scheme.name, "set": cs.name if cs else None, "point": point.as_strings(),
                            "isotropic": iso, "coefficients": records, "windows": window_recs,
                            "extras": {k: rational_record(v) for k, v in sorted(extras.items())}}))
    elif args.format == "csv":
        _write(args, _csv(["name", "exact", "decimal", "formula", "status"],
                          [[r["name"], r["exact"], r["decimal"], r.get("formula", ""), r.get("status", "")] for r in records]))
    else:
        lines = [f"{scheme.name}  point: " + ", ".join(f"{k}={v}" for k, v in point.as_strings().items())]
        for r in records:
            tail = f"  [{r['status']}]" if "status" in r else ""
            lines.append(f"  {r['name']:<7} = {r['exact']}  ({r['decimal']}){tail}")
        for k, v in sorted(extras.items()):
            lines.append(f"  extra {k} = {format_rational(v)}")
        _write(args, "\n".join(lines) + "\n")
    return EXIT_OK


def cmd_dispersion(args) -> int:
    scheme, cs, custom = _resolve(args)
    order = _order(args, cs)
    point, _ = _point(args, scheme, cs, custom)
    if args.directions < 2:
        raise UsageError("--directions must be at least 2")
    mags = log_magnitudes(args.kmin, args.kmax, args.count)
    samples = dispersion_sweep(scheme, point, direction_fan(scheme.dim, args.directions), mags, order=order)
    if args.format == "csv":
        _write(args, samples_csv(samples, scheme.dim))
        return EXIT_OK
    window = (args.kmin, args.kmax)
    report = anisotropy_order_fit(samples, window)
    data = report_dict(report, pde_mismatch_fit(samples, window))
    data.update({"scheme": scheme.name, "set": cs.name if cs else None, "order": order, "point": point.as_strings(),
                 "acoustic_exponent": report.acoustic_exponent})
    if args.format == "json":
        _write(args, _json(data))
    else:
        lines = [f"{scheme.name}  order {order}  |k|dx in [{args.kmin:g}, {args.kmax:g}]  {report.directions} directions"]
        for m, f in sorted(report.fits.items()):
            lines.append(f"  {m:<10} anisotropy exponent {f.exponent:.3f}  pde mismatch exponent "
                         f"{data['pde_mismatch'][m]['exponent']:.3f}")
        _write(args, "\n".join(lines) + "\n")
    return EXIT_OK


def cmd_figure1(args) -> int:
    grid = parse_grid(args.grid)
    table = figure1_data(grid, alpha=to_rational(args.alpha), variant=args.variant)
    changes = table.scan_sign_changes
    if args.format == "csv":
        _write(args, figure1_csv(table))
    elif args.format == "json":
        _write(args, _json({
            "variant": table.variant, "alpha": format_rational(table.alpha), "columns": list(FIGURE1_COLUMNS),
            "rows": [{c: rational_record(r[c]) for c in FIGURE1_COLUMNS} for r in table.rows],
            "sigma16_sign_changes": [{"lower": rational_record(s.lower), "upper": rational_record(s.upper),
                                      "direction": s.direction} for s in changes],
        }))
    else:
        lines = ["  ".join(f"{c:>18}" for c in FIGURE1_COLUMNS)]
        lines += ["  ".join(f"{float(r[c]):>18.10g}" for c in FIGURE1_COLUMNS) for r in table.rows]
        _write(args, "\n".join(lines) + "\n")
    for s in changes:
        print(f"sigma16/sigma5 changes sign ({s.direction}) at psi = {float(s.midpoint):.9f}", file=sys.stderr)
    return EXIT_OK


# ---------------------------------------------------------------------------
# parser

def _common(p, *, formats=("text", "json", "csv"), scheme=True, params=True):
    if scheme:
        p.add_argument("--scheme", help="built-in scheme name or path to a scheme file")
        p.add_argument("--set", help="condition set name (see `list`)")
    if params:
        p.add_argument("--params", action="append", metavar="NAME=VALUE,...",
                       help="exact parameter values; free values of the set when --set is given")
    p.add_argument("--format", choices=formats, default=formats[0])
    p.add_argument("--output", "-o", help="write to this file instead of stdout")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="lbm-isotropy", description="Equivalent PDEs and isotropy of linear MRT lattice Boltzmann schemes.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("list", help="built-in schemes and condition sets")
    _common(p, scheme=False, params=False)
    p.set_defaults(func=cmd_list)

    p = sub.add_parser("expand", help="dump alpha_1..alpha_L and beta_1..beta_(L-1)")
    _common(p)
    p.add_argument("--order", type=int)
    p.add_argument("--override", action="append", metavar="NAME=VALUE,...")
    p.set_defaults(func=cmd_expand)

    p = sub.add_parser("verify", help="check isotropy and closed forms of a condition set")
    _common(p)
    p.add_argument("--override", action="append", metavar="NAME=VALUE,...",
                   help="scheme parameters forced after the set is applied")
    p.add_argument("--samples", type=int, default=None, help="number of deterministic sample points")
    p.add_argument("--allow-boundary", action="store_true", help="accept s_k = 2")
    p.add_argument("--accept-errata", action="store_true", help="count documented errata as passing")
    p.add_argument("--no-control", action="store_true", help="skip the negative control")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("coeffs", help="physical coefficient table at one point")
    _common(p)
    p.add_argument("--order", type=int, help="expansion order; without --set this is required")
    p.add_argument("--override", action="append", metavar="NAME=VALUE,...")
    p.set_defaults(func=cmd_coeffs)

    p = sub.add_parser("dispersion", help="hydrodynamic modes and anisotropy exponents")
    _common(p, formats=("text", "json", "csv"))
    p.add_argument("--order", type=int, help="order of the PDE symbol compared against")
    p.add_argument("--override", action="append", metavar="NAME=VALUE,...")
    p.add_argument("--directions", type=int, default=9)
    p.add_argument("--kmin", type=float, default=1e-3)
    p.add_argument("--kmax", type=float, default=1e-1)
    p.add_argument("--count", type=int, default=9)
    p.set_defaults(func=cmd_dispersion)

    p = sub.add_parser("figure1", help="D3Q27 fourth-order relaxation curves along psi")
    _common(p, formats=("csv", "json", "text"), scheme=False, params=False)
    p.add_argument("--grid", default="0.05:1.45:0.05", help="start:stop:step or a comma list of psi values")
    p.add_argument("--alpha", default="-1")
    p.add_argument("--variant", choices=("revised", "printed"), default="revised")
    p.set_defaults(func=cmd_figure1)
    return parser


_VALIDATION = (UsageError, ConditionError, SchemeError, ParameterError, ExpansionError, ExpressionError,
               IsotropyError, DispersionError, AlgebraError, OSError)


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except _VALIDATION as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
