"""Command-line front end.

Every capability of the library is reachable from here: closed-form
predictions, the mode-matching solver, the finite-difference oracle,
variational upper bounds, the one-dimensional lemma battery, clearance
sweeps with rate fits, and the verification report.  Output is CSV for
eigenvalue-like data and JSON for structured results, so runs can be
piped into the fit/report stages or diffed for determinism.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import asdict

from . import __version__
from .asymptotics import decay_rate, eigen_count, predict
from .fdoracle import bracketed_eigenvalue
from .geometry import SymmetryVariant, is_integer_half_length, make_geometry
from .harness import (
    HarnessConfig,
    METHODS,
    ResultStore,
    SweepRecord,
    fit_rate,
    lemma_checks,
    read_csv,
    render_report,
    render_store,
    sweep,
    verify,
    write_csv,
    write_plot_files,
)
from .modematch import SolveOptions, eigenvalues_below_threshold, suggested_n_right
from .rayleigh import (
    build_multimode_family,
    fractional_optimal,
    integer_a1,
    minimax_upper_bounds,
    naive_phi1,
    rayleigh_quotient,
)

__all__ = ["main"]


def _float_list(text: str) -> list[float]:
    try:
        values = [float(tok) for tok in text.split(",") if tok.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated floats, got {text!r}")
    if not values:
        raise argparse.ArgumentTypeError("empty list")
    return values


def _variant(label: str) -> list[SymmetryVariant]:
    if label == "both":
        return [SymmetryVariant.NEUMANN_AT_CUT, SymmetryVariant.DIRICHLET_AT_CUT]
    return [SymmetryVariant.from_label(label)]


def _emit_csv(records: list[SweepRecord], path: str | None) -> None:
    if path and path != "-":
        with open(path, "w") as fh:
            write_csv(records, fh)
    else:
        write_csv(records, sys.stdout)


def _cmd_predict(args) -> int:
    geometry = make_geometry(args.a, args.delta)
    prediction = predict(geometry)
    split = eigen_count(args.a)
    out = {
        "a": args.a,
        "delta": args.delta,
        "regime": "integer" if is_integer_half_length(args.a) else "fractional",
        "lambda_leading": prediction.lambda_leading,
        "exponent": prediction.exponent,
        "constant": prediction.constant,
        "remainder_order": prediction.remainder_order,
        "decay_rate": decay_rate(geometry),
        "count_total": split.total,
        "count_from_neumann": split.from_neumann,
        "count_from_dirichlet": split.from_dirichlet,
        "top_is_neumann": split.top_is_neumann,
    }
    print(json.dumps(out, indent=2))
    return 0


def _cmd_solve(args) -> int:
    geometry = make_geometry(args.a, args.delta)
    records: list[SweepRecord] = []
    for variant in _variant(args.variant):
        if args.modes is not None:
            opts = SolveOptions(n_right=args.modes, tol=args.tol, auto_refine=False)
        else:
            start = suggested_n_right(args.delta)
            opts = SolveOptions(n_right=start, tol=args.tol, max_n_right=4 * start)
        result = eigenvalues_below_threshold(geometry, variant, opts)
        meta = {"n_left": result.truncation[0], "n_right": result.truncation[1]}
        if result.warnings:
            meta["warnings"] = list(result.warnings)
        for idx, value in enumerate(result.values):
            records.append(
                SweepRecord(
                    args.a,
                    args.delta,
                    variant.label,
                    "modematch",
                    idx + 1,
                    value,
                    result.residuals[idx],
                    {**meta, "converged": bool(result.converged[idx])},
                )
            )
    _emit_csv(records, args.out)
    return 0


def _cmd_oracle(args) -> int:
    geometry = make_geometry(args.a, args.delta)
    records = []
    for variant in _variant(args.variant):
        lo, hi = bracketed_eigenvalue(
            geometry,
            variant,
            args.index,
            h_list=tuple(args.h_list),
            x_max=args.X,
        )
        records.append(
            SweepRecord(
                args.a,
                args.delta,
                variant.label,
                "fdoracle",
                args.index,
                0.5 * (lo + hi),
                0.5 * (hi - lo),
                {"bracket_lo": lo, "bracket_hi": hi, "h_list": list(args.h_list)},
            )
        )
    _emit_csv(records, args.out)
    return 0


def _cmd_rayleigh(args) -> int:
    geometry = make_geometry(args.a, args.delta)
    records = []
    if args.family == "multi":
        family = build_multimode_family(args.a, args.delta)
        pencil = minimax_upper_bounds(family, geometry)
        for idx, bound in enumerate(pencil.bounds):
            records.append(
                SweepRecord(
                    args.a,
                    args.delta,
                    family[0].variant.label,
                    "rayleigh",
                    idx + 1,
                    bound,
                    0.0,
                    {"trial": [phi.label for phi in family], "dropped": pencil.dropped},
                )
            )
    else:
        if args.family == "naive":
            phi = naive_phi1(geometry)
        elif is_integer_half_length(args.a):
            phi = integer_a1(geometry) if round(args.a) == 1 else naive_phi1(geometry)
        else:
            phi = fractional_optimal(geometry)
        records.append(
            SweepRecord(
                args.a,
                args.delta,
                phi.variant.label,
                "rayleigh",
                1,
                rayleigh_quotient(phi, geometry),
                0.0,
                {"trial": phi.label},
            )
        )
    _emit_csv(records, args.out)
    return 0


def _cmd_lemmas(args) -> int:
    checks = lemma_checks(args.which)
    for check in checks:
        print(
            "%s  %-28s value=%s  target=%s  tol=%s"
            % (
                "PASS" if check["pass"] else "FAIL",
                check["name"],
                check["value"],
                check["target"],
                check["tol"],
            )
        )
    failed = sum(1 for c in checks if not c["pass"])
    print(f"{len(checks) - failed}/{len(checks)} checks passed")
    return 0


def _cmd_sweep(args) -> int:
    config = HarnessConfig.from_file(args.config) if args.config else HarnessConfig()
    store = ResultStore(args.store) if args.store else None
    records = sweep(
        args.a,
        args.deltas,
        SymmetryVariant.from_label(args.variant),
        args.method,
        config=config,
        store=store,
    )
    _emit_csv(records, args.out)
    if args.plot:
        data_path, script_path = write_plot_files(records, args.plot)
        print(f"wrote {data_path} and {script_path}", file=sys.stderr)
    return 0


def _cmd_fit(args) -> int:
    with (open(args.input) if args.input != "-" else sys.stdin) as fh:
        records = read_csv(fh)
    fit = fit_rate(records)
    print(json.dumps(asdict(fit), indent=2))
    return 0


def _cmd_verify(args) -> int:
    config = HarnessConfig.from_file(args.config) if args.config else HarnessConfig()
    report = verify(args.a, config)
    print(render_report(report, args.format))
    return 0


def _cmd_report(args) -> int:
    print(render_store(args.store, args.format))
    return 0


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(
        prog="trapmodes",
        description="Trapped modes of a strip waveguide with a rectangular obstacle.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("predict", help="closed-form asymptotics and mode counts")
    p.add_argument("--a", type=float, required=True, help="obstacle half-length")
    p.add_argument("--delta", type=float, required=True, help="channel clearance")
    p.set_defaults(func=_cmd_predict)

    p = sub.add_parser("solve", help="mode-matching eigenvalues below the threshold")
    p.add_argument("--a", type=float, required=True)
    p.add_argument("--delta", type=float, required=True)
    p.add_argument("--variant", choices=["N", "D", "both"], default="both",
                   help="symmetry condition on the cut x = 0")
    p.add_argument("--modes", type=int, default=None,
                   help="fixed strip truncation (disables auto refinement)")
    p.add_argument("--tol", type=float, default=1e-5,
                   help="move-per-doubling refinement stop")
    p.add_argument("--out", default="-", help="CSV destination, - for stdout")
    p.set_defaults(func=_cmd_solve)

    p = sub.add_parser("oracle", help="finite-difference bracket for one eigenvalue")
    p.add_argument("--a", type=float, required=True)
    p.add_argument("--delta", type=float, required=True)
    p.add_argument("--variant", choices=["N", "D", "both"], default="N")
    p.add_argument("--index", type=int, default=1, help="eigenvalue index (1-based)")
    p.add_argument("--h-list", type=_float_list, default=[0.05, 0.025, 0.0125],
                   help="comma-separated grid steps, coarse to fine")
    p.add_argument("--X", type=float, default=None,
                   help="truncation abscissa for the strip (default: decay-based)")
    p.add_argument("--out", default="-", help="CSV destination, - for stdout")
    p.set_defaults(func=_cmd_oracle)

    p = sub.add_parser("rayleigh", help="variational upper bounds from trial fields")
    p.add_argument("--a", type=float, required=True)
    p.add_argument("--delta", type=float, required=True)
    p.add_argument("--family", choices=["naive", "optimal", "multi"], default="optimal",
                   help="trial family: exponential tail only, tuned profile, "
                        "or the multi-mode span")
    p.add_argument("--out", default="-", help="CSV destination, - for stdout")
    p.set_defaults(func=_cmd_rayleigh)

    p = sub.add_parser("lemmas", help="self-checks of the one-dimensional reductions")
    p.add_argument("--which", choices=["3.1", "3.2", "4.1", "5.1", "all"], default="all")
    p.set_defaults(func=_cmd_lemmas)

    p = sub.add_parser("sweep", help="solve a family over a decreasing clearance ladder")
    p.add_argument("--a", type=float, required=True)
    p.add_argument("--deltas", type=_float_list, required=True,
                   help="comma-separated clearances, strictly decreasing")
    p.add_argument("--variant", choices=["N", "D"], default="N")
    p.add_argument("--method", choices=list(METHODS), default="modematch")
    p.add_argument("--out", default="-", help="CSV destination, - for stdout")
    p.add_argument("--store", default=None, help="append-only JSON-lines cache")
    p.add_argument("--plot", default=None, help="prefix for gap-vs-delta plot files")
    p.add_argument("--config", default=None, help="key=value config file")
    p.set_defaults(func=_cmd_sweep)

    p = sub.add_parser("fit", help="convergence-rate fit from sweep CSV")
    p.add_argument("--in", dest="input", required=True, help="sweep CSV, - for stdin")
    p.set_defaults(func=_cmd_fit)

    p = sub.add_parser("verify", help="full verification report for one half-length")
    p.add_argument("--a", type=float, required=True)
    p.add_argument("--config", default=None, help="key=value config file")
    p.add_argument("--format", choices=["md", "json"], default="json")
    p.set_defaults(func=_cmd_verify)

    p = sub.add_parser("report", help="summarize an append-only result store")
    p.add_argument("--store", required=True)
    p.add_argument("--format", choices=["md", "json"], default="md")
    p.set_defaults(func=_cmd_report)

    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, RuntimeError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
