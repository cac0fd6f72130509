"""Command-line interface.

Exit codes: 0 success, 1 validation failure, 2 argument error, 3 numerical
failure.
"""

import argparse
import json
import math
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, fields
from typing import Optional

import numpy as np

from . import __version__
from .capacity import (
    LN2,
    h_y_given_x_numeric_result,
    h_y_numeric_result,
    report,
)
from .channel import ChannelParams, InputDist, sample_y
from .mc import (
    DEFAULT_SUBSTREAMS,
    MIN_GOF_BINS,
    MIN_GOF_SAMPLES,
    MIN_SAMPLES,
    gof_binned,
    mc_entropies,
    substream,
)
from .quadrature import QuadratureError
from .soliton import PhysicalLink, normalize, separation_margin

SCHEMA_VERSION = 1
EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_NUMERIC = 0, 1, 2, 3
SEPARATION_POLICY = 0.01
DEFAULT_VALIDATE_GRID = (-10.0, 0.0, 10.0, 20.0, 30.0)
CSV_COLUMNS = ("rho_db", "rho", "h_y", "h_y_given_x", "mi", "i_as", "ratio")
CSV_NUMERIC_COLUMNS = ("h_y_num", "h_ygx_num")


class UsageError(Exception):
    pass


class NumericalFailure(Exception):
    pass


@dataclass(frozen=True)
class SweepRow:
    rho_db: float
    rho: float
    h_y: float
    h_y_given_x: float
    mi: float
    i_as: float
    ratio: float
    h_y_numeric: Optional[float] = None
    h_y_given_x_numeric: Optional[float] = None
    units: str = "bits"


def fmt(value):
    """17 significant digits, locale independent."""
    return format(value, ".17g")


def rho_from_db(rho_db):
    return 10.0 ** (rho_db / 10.0)


def _emit(text, out_path):
    if out_path:
        with open(out_path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _json(obj):
    return json.dumps(obj, indent=2, sort_keys=False) + "\n"


def _seed(text):
    value = int(text)
    if not 0 <= value < 2 ** 64:
        raise argparse.ArgumentTypeError("seed must be an unsigned 64-bit integer")
    return value


def _positive_float(text):
    value = float(text)
    if not (math.isfinite(value) and value > 0):
        raise argparse.ArgumentTypeError(f"expected a positive number, got {text}")
    return value


# sweep

def sweep_row(rho_db, input_dist, units, with_numeric):
    rho = rho_from_db(rho_db)
    try:
        rep = report(input_dist, rho, units)
        h_num = hgx_num = None
        if with_numeric:
            params = ChannelParams.from_rho(input_dist, rho)
            scale = 1.0 / LN2 if units == "bits" else 1.0
            h_num = h_y_numeric_result(input_dist, params).value * scale
            hgx_num = h_y_given_x_numeric_result(input_dist, params).value * scale
    except QuadratureError as exc:
        raise NumericalFailure(f"rho = {rho:g} ({rho_db:g} dB): {exc}") from exc
    return SweepRow(rho_db, rho, rep.h_y, rep.h_y_given_x, rep.mi, rep.i_as, rep.ratio,
                    h_num, hgx_num, units)


def run_sweep(start, end, steps, units="bits", with_numeric=False, sigma_s_sq=1.0, threads=1):
    if not start < end:
        raise UsageError("rho_db_start must be below rho_db_end")
    if steps < 2:
        raise UsageError("steps must be >= 2")
    input_dist = InputDist(sigma_s_sq)
    grid = np.linspace(start, end, steps)
    job = lambda db: sweep_row(float(db), input_dist, units, with_numeric)  # noqa: E731
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            return list(pool.map(job, grid))
    return [job(db) for db in grid]


def sweep_csv(rows, sigma_s_sq, with_numeric):
    units = rows[0].units if rows else "bits"
    lines = [
        f"# soliton channel sweep; units={units}; sigma_s_sq={fmt(sigma_s_sq)}; "
        "h_y and h_y_given_x include ln(sqrt(sigma_s_sq)); mi, i_as and ratio "
        "depend on rho only",
    ]
    header = list(CSV_COLUMNS) + (list(CSV_NUMERIC_COLUMNS) if with_numeric else [])
    lines.append(",".join(header))
    for row in rows:
        values = [row.rho_db, row.rho, row.h_y, row.h_y_given_x, row.mi, row.i_as, row.ratio]
        if with_numeric:
            values += [row.h_y_numeric, row.h_y_given_x_numeric]
        lines.append(",".join(fmt(v) for v in values))
    return "\n".join(lines) + "\n"


def sweep_json(rows, sigma_s_sq, with_numeric):
    out_rows = []
    for row in rows:
        entry = {f.name: getattr(row, f.name) for f in fields(row) if f.name != "units"}
        if not with_numeric:
            entry.pop("h_y_numeric")
            entry.pop("h_y_given_x_numeric")
        out_rows.append(entry)
    return _json({
        "schema_version": SCHEMA_VERSION,
        "command": "sweep",
        "units": rows[0].units if rows else "bits",
        "sigma_s_sq": sigma_s_sq,
        "rows": out_rows,
    })


def cmd_sweep(args):
    rows = run_sweep(args.rho_db_start, args.rho_db_end, args.steps, args.units,
                     args.with_numeric, args.sigma_s_sq, args.threads)
    render = sweep_json if args.format == "json" else sweep_csv
    _emit(render(rows, args.sigma_s_sq, args.with_numeric), args.out)
    return EXIT_OK


# validate

def validate_point(rho_db, sigma_s_sq=1.0):
    """Closed-form vs numeric entropies at one grid point (nats).

    Returns ``{name: (closed, numeric, quadrature error estimate)}``.
    """
    input_dist = InputDist(sigma_s_sq)
    rho = rho_from_db(rho_db)
    params = ChannelParams.from_rho(input_dist, rho)
    rep = report(input_dist, rho)
    try:
        hy = h_y_numeric_result(input_dist, params)
        hyx = h_y_given_x_numeric_result(input_dist, params)
    except QuadratureError as exc:
        raise NumericalFailure(f"rho = {rho:g} ({rho_db:g} dB): {exc}") from exc
    return {
        "h_y": (rep.h_y, hy.value, hy.abs_error_estimate),
        "h_y_given_x": (rep.h_y_given_x, hyx.value, hyx.abs_error_estimate),
        "mi": (rep.mi, hy.value - hyx.value, hy.abs_error_estimate + hyx.abs_error_estimate),
    }


def cmd_validate(args):
    tol = args.tol
    grid = args.rho_db if args.rho_db else DEFAULT_VALIDATE_GRID
    print(f"{'rho_db':>8} {'quantity':>12} {'closed':>22} {'numeric':>22} "
          f"{'|diff|':>10} {'quad_err':>10}  status")
    worst = None
    failed = False
    for rho_db in grid:
        for name, (closed, numeric, err) in validate_point(rho_db, args.sigma_s_sq).items():
            # mi is a difference of two checked entropies and gets twice the budget
            limit = 2.0 * tol if name == "mi" else tol
            diff = abs(closed - numeric)
            ok = diff <= limit and err <= limit
            failed |= not ok
            score = max(diff, err) / limit
            if worst is None or score > worst[0]:
                worst = (score, rho_db, name, diff, err)
            print(f"{rho_db:8.3f} {name:>12} {fmt(closed):>22} {fmt(numeric):>22} "
                  f"{diff:10.2e} {err:10.2e}  {'ok' if ok else 'FAIL'}")
    if failed:
        _, rho_db, name, diff, err = worst
        print(f"FAIL: worst {name} at {rho_db:g} dB: |diff| = {diff:.3e}, "
              f"quadrature error = {err:.3e}, tol = {tol:g} nats", file=sys.stderr)
        return EXIT_FAIL
    print(f"all {len(grid)} points within {tol:g} nats")
    return EXIT_OK


# sample

def cmd_sample(args):
    if args.n <= 0:
        raise UsageError("n must be positive")
    params = ChannelParams(args.sigma_n_sq)
    if args.x <= 0:
        raise UsageError("x must be positive")
    y = sample_y(np.full(args.n, args.x), params, substream(args.seed, 0))
    lines = [f"# x={fmt(args.x)}, sigma_n_sq={fmt(args.sigma_n_sq)}, seed={args.seed}"]
    lines += [fmt(v) for v in np.atleast_1d(y)]
    _emit("\n".join(lines) + "\n", args.out)
    return EXIT_OK


# physical

def cmd_physical(args):
    link = PhysicalLink(beta2=args.beta2, gamma_nl=args.gamma, alpha=args.alpha, K_T=args.kt,
                        photon_energy=args.photon_energy, T_s=args.ts, L=args.length)
    norm = normalize(link)
    margin = separation_margin(args.sigma_s_sq)
    payload = {
        "schema_version": SCHEMA_VERSION,
        "command": "physical",
        "link": {f.name: getattr(link, f.name) for f in fields(link)},
        "normalized": norm.as_dict(),
        "sigma_s_sq": args.sigma_s_sq,
        "rho": args.sigma_s_sq / norm.sigma_n_sq,
        "separation": {
            "amplitude": args.sigma_s_sq,
            "margin": margin.margin,
            "width": margin.width,
            "isolated": margin.margin <= SEPARATION_POLICY and margin.width < 1.0,
            "policy": SEPARATION_POLICY,
            "note": "Gordon-Haus timing jitter is not included",
        },
    }
    _emit(_json(payload), args.out)
    return EXIT_OK


# mc

def run_mc(rho_db, n, seed, threads=1, substreams=DEFAULT_SUBSTREAMS, sigma_s_sq=1.0):
    if n < MIN_SAMPLES:
        raise UsageError(f"n must be >= {MIN_SAMPLES}")
    input_dist = InputDist(sigma_s_sq)
    rho = rho_from_db(rho_db)
    params = ChannelParams.from_rho(input_dist, rho)
    try:
        reports = mc_entropies(input_dist, params, n, seed, substreams, threads)
        ref = report(input_dist, rho)
    except QuadratureError as exc:
        raise NumericalFailure(str(exc)) from exc
    rows = []
    for name, rep in reports.items():
        closed = getattr(ref, name)
        rows.append({
            "quantity": name,
            "estimate": rep.estimate,
            "std_error": rep.std_error,
            "closed_form": closed,
            "z": (rep.estimate - closed) / rep.std_error,
            "pass": rep.within(closed, 4.0),
        })
    return rows


def cmd_mc(args):
    rows = run_mc(args.rho_db, args.n, args.seed, args.threads, args.substreams, args.sigma_s_sq)
    if args.format == "json":
        text = _json({
            "schema_version": SCHEMA_VERSION,
            "command": "mc",
            "rho_db": args.rho_db,
            "n": args.n,
            "seed": args.seed,
            "substreams": args.substreams,
            "units": "nats",
            "results": rows,
        })
    else:
        lines = [f"# rho_db={fmt(args.rho_db)} n={args.n} seed={args.seed} "
                 f"substreams={args.substreams} units=nats",
                 "quantity,estimate,std_error,closed_form,z,pass"]
        for r in rows:
            lines.append(",".join([r["quantity"], fmt(r["estimate"]), fmt(r["std_error"]),
                                   fmt(r["closed_form"]), fmt(r["z"]),
                                   "pass" if r["pass"] else "FAIL"]))
        text = "\n".join(lines) + "\n"
    _emit(text, args.out)
    return EXIT_OK if all(r["pass"] for r in rows) else EXIT_FAIL


def cmd_gof(args):
    if args.n < MIN_GOF_SAMPLES or args.bins < MIN_GOF_BINS:
        raise UsageError(f"need n >= {MIN_GOF_SAMPLES} and bins >= {MIN_GOF_BINS}")
    rep = gof_binned(args.x, ChannelParams(args.sigma_n_sq), args.n, args.bins, args.seed)
    ok = rep.gof_pvalue > args.alpha
    _emit(_json({
        "schema_version": SCHEMA_VERSION,
        "command": "gof",
        "x": args.x,
        "sigma_n_sq": args.sigma_n_sq,
        "n": args.n,
        "bins": args.bins,
        "seed": args.seed,
        "chi2": rep.estimate,
        "pvalue": rep.gof_pvalue,
        "pass": ok,
    }), args.out)
    return EXIT_OK if ok else EXIT_FAIL


def build_parser():
    parser = argparse.ArgumentParser(
        prog="solitoncap",
        description="Capacity lower bound of the soliton-amplitude channel.")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("sweep", help="closed-form entropies and MI over a rho grid [dB]")
    p.add_argument("rho_db_start", type=float)
    p.add_argument("rho_db_end", type=float)
    p.add_argument("steps", type=int)
    p.add_argument("--units", choices=("bits", "nats"), default="bits")
    p.add_argument("--with-numeric", action="store_true",
                   help="add numerically integrated h_Y and h_Y|X columns")
    p.add_argument("--sigma-s-sq", type=_positive_float, default=1.0)
    p.add_argument("--threads", type=int, default=1)
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--out")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("validate", help="closed forms against numerical integration")
    p.add_argument("--rho-db", type=float, nargs="+")
    p.add_argument("--tol", type=_positive_float, default=1e-6, help="tolerance in nats")
    p.add_argument("--sigma-s-sq", type=_positive_float, default=1.0)
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("sample", help="draw channel outputs Y given X = x")
    p.add_argument("--x", type=float, required=True)
    p.add_argument("--sigma-n-sq", type=_positive_float, required=True)
    p.add_argument("-n", type=int, required=True)
    p.add_argument("--seed", type=_seed, default=0)
    p.add_argument("--out")
    p.set_defaults(func=cmd_sample)

    p = sub.add_parser("physical", help="map physical link parameters to channel units")
    p.add_argument("--beta2", type=float, required=True, help="GVD [s^2/m], negative")
    p.add_argument("--gamma", type=float, required=True, help="nonlinearity [1/(W m)]")
    p.add_argument("--alpha", type=float, required=True, help="attenuation [1/m]")
    p.add_argument("--kt", type=float, default=1.0, help="Raman pump coefficient")
    p.add_argument("--photon-energy", type=float, required=True, help="h*nu [J]")
    p.add_argument("--ts", type=float, required=True, help="symbol interval [s]")
    p.add_argument("--length", type=float, required=True, help="link length [m]")
    p.add_argument("--sigma-s-sq", type=_positive_float, default=1.0,
                   help="mean normalised soliton amplitude")
    p.add_argument("--format", choices=("json",), default="json")
    p.add_argument("--out")
    p.set_defaults(func=cmd_physical)

    for name in ("mc", "mc-entropy"):
        p = sub.add_parser(name, help="Monte Carlo entropies against the closed forms")
        p.add_argument("--rho-db", type=float, required=True)
        p.add_argument("-n", type=int, default=100_000)
        p.add_argument("--seed", type=_seed, default=0)
        p.add_argument("--threads", type=int, default=1)
        p.add_argument("--substreams", type=int, default=DEFAULT_SUBSTREAMS)
        p.add_argument("--sigma-s-sq", type=_positive_float, default=1.0)
        p.add_argument("--format", choices=("csv", "json"), default="csv")
        p.add_argument("--out")
        p.set_defaults(func=cmd_mc)

    p = sub.add_parser("gof", help="binned chi-square test of the sampler")
    p.add_argument("--x", type=_positive_float, required=True)
    p.add_argument("--sigma-n-sq", type=_positive_float, required=True)
    p.add_argument("-n", type=int, default=100_000)
    p.add_argument("--bins", type=int, default=50)
    p.add_argument("--seed", type=_seed, default=0)
    p.add_argument("--alpha", type=float, default=1e-3)
    p.add_argument("--out")
    p.set_defaults(func=cmd_gof)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "threads", 1) < 1 or getattr(args, "substreams", 1) < 1:
        parser.error("threads and substreams must be >= 1")
    try:
        return args.func(args)
    except (UsageError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except NumericalFailure as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except QuadratureError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
