"""Command-line front end: ``fisher-ec {eval,cutoff,sweep,mc,figure}``.

Exit codes: 0 success, 2 usage error, 3 numerical failure, 4 partial sweep
failure.  Floats are printed with ``repr`` so every value round-trips.
"""

import argparse
import json
import math
import sys
from pathlib import Path

from . import capacity as cap
from . import sweep as sw
from ._backend import kernels
from .capacity import Scheme, SchemeKind
from .errors import DivergenceError, DomainError, FisherECError
from .montecarlo import mc_ec

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_NUMERIC = 3
EXIT_PARTIAL = 4


class UsageError(Exception):
    pass


def _snr_flags(parser, required):
    group = parser.add_mutually_exclusive_group(required=required)
    group.add_argument("--snr", help="linear scale parameter gamma_bar")
    group.add_argument("--snr-db", help="gamma_bar in dB")
    group.add_argument("--snr1", help="linear true mean SNR gamma_bar_1 (needs ms > 1)")
    group.add_argument("--snr1-db", help="true mean SNR in dB")


def _output_flags(parser, default):
    parser.add_argument("--format", choices=("text", "csv", "json"), default=default)
    parser.add_argument("--pt-db", type=float, default=None,
                        help="average transmit power in dB; recorded only, EC is invariant to it")


def _point_snr(args):
    """(snr_db, snr_linear, parameterization) for single-point commands."""
    for name, db, param in (("snr", False, sw.GAMMA_BAR), ("snr_db", True, sw.GAMMA_BAR),
                            ("snr1", False, sw.GAMMA_BAR_1), ("snr1_db", True, sw.GAMMA_BAR_1)):
        text = getattr(args, name)
        if text is not None:
            try:
                val = float(text)
            except ValueError:
                raise UsageError(f"--{name.replace('_', '-')}: {text!r} is not a number") from None
            if db:
                return val, sw.db_to_linear(val), param
            if not val > 0.0:
                raise UsageError(f"--{name.replace('_', '-')} must be positive")
            return sw.linear_to_db(val), val, param
    raise UsageError("one of --snr, --snr-db, --snr1, --snr1-db is required")


def _scheme(kind, gamma0):
    kind = SchemeKind(kind)
    if kind is SchemeKind.TCI:
        if gamma0 is None:
            raise UsageError("--gamma0 is required for tci")
        return Scheme(kind, gamma0)
    if gamma0 is not None:
        raise UsageError(f"--gamma0 is only meaningful for tci, not {kind.value}")
    return Scheme(kind)


def _params(args):
    db, lin, param = _point_snr(args)
    try:
        return db, lin, param, sw.params_for(args.m, args.ms, lin, param)
    except (DomainError, DivergenceError) as exc:
        raise UsageError(str(exc)) from None


def _base_record(args, db, lin, param, scheme):
    rec = {"snr_db": db, "snr_linear": lin, "parameterization": param, "m": args.m,
           "ms": args.ms, "scheme": scheme.kind.value, "gamma0": scheme.gamma0}
    if args.pt_db is not None:
        rec["pt_db"] = args.pt_db
    return rec


def _emit(records, fmt, out=None, fields=None):
    if fmt == "json":
        text = sw.to_json(records)
    elif fmt == "csv":
        if fields is None:
            text = sw.to_csv(records)
        else:
            rows = [[sw._cell(r.get(k)) for k in fields] for r in records]
            text = "\n".join([",".join(fields)] + [",".join(r) for r in rows]) + "\n"
    else:
        lines = []
        for rec in records:
            for key, val in rec.items():
                if isinstance(val, dict):
                    lines.extend(f"{key}.{k} = {sw._cell(v)}" for k, v in val.items())
                else:
                    lines.append(f"{key} = {sw._cell(val)}")
        text = "\n".join(lines) + "\n"
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def cmd_eval(args):
    db, lin, param, p = _params(args)
    scheme = _scheme(args.scheme, args.gamma0)
    rec = _base_record(args, db, lin, param, scheme)
    if args.method == "closed":
        res = cap.ec_closed(p, scheme)
    elif args.method == "quad":
        res = cap.ec_quadrature(p, scheme)
    elif args.method == "asym":
        res = cap.ec_asym(p, scheme)
    else:
        est = mc_ec(p, scheme, args.samples, args.seed, args.shards, args.jobs)
        res = cap.EcResult(scheme, est.mean, "monte_carlo",
                           {"std_error": est.std_error, "n": est.n, "seed": est.seed,
                            "shards": est.shards, "divergent_inverse_moment": float(est.divergent)})
        if est.gamma0 is not None:
            res = cap.EcResult(Scheme(scheme.kind, est.gamma0), res.ec_nats, res.method,
                               res.diagnostics)
    if res.scheme.gamma0 is not None:
        rec["gamma0"] = res.scheme.gamma0
    rec.update(method=res.method, ec_nats=res.ec_nats, ec_bits=res.ec_bits, unit=args.unit,
               ec=res.ec_bits if args.unit == "bits" else res.ec_nats)
    if res.diagnostics.get("divergent_inverse_moment"):
        rec["note"] = "inverse moment diverges for m <= 1; channel inversion capacity is zero"
    rec["diagnostics"] = dict(res.diagnostics)
    _emit([rec], args.format, fields=sw.FIELDS)
    return EXIT_OK


def cmd_cutoff(args):
    db, lin, param, p = _params(args)
    sol = cap.solve_opra_cutoff(p, tol=args.tol)
    rec = _base_record(args, db, lin, param, Scheme(SchemeKind.OPRA))
    rec.update(gamma0=sol.gamma0, residual=sol.residual, iterations=sol.iterations,
               bracket_lo=sol.bracket[0], bracket_hi=sol.bracket[1])
    _emit([rec], args.format, fields=("snr_db", "snr_linear", "parameterization", "m", "ms",
                                      "gamma0", "residual", "iterations"))
    return EXIT_OK


def cmd_mc(args):
    db, lin, param, p = _params(args)
    scheme = _scheme(args.scheme, args.gamma0)
    est = mc_ec(p, scheme, args.samples, args.seed, args.shards, args.jobs)
    rec = _base_record(args, db, lin, param, scheme)
    if est.gamma0 is not None:
        rec["gamma0"] = est.gamma0
    rec.update(method="monte_carlo", ec_nats=est.mean, ec_bits=est.mean / sw.LN2,
               std_error=est.std_error, n=est.n, seed=est.seed, shards=est.shards,
               divergent=est.divergent)
    if est.divergent:
        _emit([rec], args.format)
        print(f"error: mc_ec: sample inverse moment does not stabilise for m={p.m!r} <= 1",
              file=sys.stderr)
        return EXIT_NUMERIC
    closed = cap.ec_closed(p, scheme).ec_nats
    rec["closed_form"] = closed
    rec["z_score"] = (est.mean - closed) / est.std_error if est.std_error > 0 else math.nan
    _emit([rec], args.format, fields=sw.FIELDS + ("std_error", "closed_form", "z_score"))
    return EXIT_OK


def _write_sweep(spec, args):
    rows = sw.run_sweep(spec, jobs=args.jobs)
    fmt = "csv" if args.format == "text" else args.format
    _emit(rows, fmt, out=args.out)
    failed = sum(1 for r in rows if "error" in r)
    note = f"{len(rows)} rows"
    if spec.pt_db is not None:
        note += f", pt_db={spec.pt_db!r} dB (recorded, not used)"
    if args.out:
        print(f"wrote {note} to {args.out}", file=sys.stderr)
    if failed:
        print(f"error: {failed} of {len(rows)} rows failed", file=sys.stderr)
        return EXIT_PARTIAL
    return EXIT_OK


def _sweep_spec(args):
    conf = {}
    if args.config:
        try:
            conf = sw.read_config(Path(args.config).read_text())
        except OSError as exc:
            raise UsageError(f"cannot read config: {exc}") from None

    def pick(name):
        val = getattr(args, name, None)
        return val if val is not None else conf.get(name)

    grid = None
    for name, db, param in (("snr", False, sw.GAMMA_BAR), ("snr_db", True, sw.GAMMA_BAR),
                            ("snr1", False, sw.GAMMA_BAR_1), ("snr1_db", True, sw.GAMMA_BAR_1)):
        if getattr(args, name) is not None:
            grid = (getattr(args, name), db, param)
            break
    if grid is None:
        for name, db, param in (("snr", False, sw.GAMMA_BAR), ("snr_db", True, sw.GAMMA_BAR),
                                ("snr1", False, sw.GAMMA_BAR_1),
                                ("snr1_db", True, sw.GAMMA_BAR_1)):
            if name in conf:
                grid = (conf[name], db, param)
                break
    if grid is None:
        raise UsageError("no SNR grid: give --snr/--snr-db/--snr1/--snr1-db or set it in --config")
    dbs, lins = sw.parse_grid(grid[0], grid[1])
    param = pick("parameterization") or grid[2]

    sets = args.param_set or conf.get("param_set") or []
    param_sets = [sw.parse_param_set(s) for s in sets]
    gamma0 = pick("gamma0")
    gamma0 = float(gamma0) if gamma0 is not None else None
    schemes = []
    for name in (pick("schemes") or "opra,ora,ci,tci").split(","):
        name = name.strip().lower()
        try:
            kind = SchemeKind(name)
        except ValueError:
            raise UsageError(f"unknown scheme {name!r}") from None
        if kind is SchemeKind.TCI and gamma0 is None:
            raise UsageError("tci in a sweep needs gamma0")
        schemes.append(Scheme(kind, gamma0 if kind is SchemeKind.TCI else None))
    pt_db = pick("pt_db")
    return sw.SweepSpec(dbs, lins, param_sets, schemes, param, pick("outputs") or "exact",
                        float(pt_db) if pt_db is not None else None)


def cmd_sweep(args):
    try:
        spec = _sweep_spec(args)
    except DomainError as exc:
        raise UsageError(str(exc)) from None
    return _write_sweep(spec, args)


def cmd_figure(args):
    values = None
    if args.values:
        try:
            values = [float(v) for v in args.values.split(",")]
        except ValueError:
            raise UsageError(f"--values {args.values!r} is not a comma list") from None
    try:
        spec = sw.figure_spec(args.number, args.snr_db, values, args.pt_db)
    except DomainError as exc:
        raise UsageError(str(exc)) from None
    return _write_sweep(spec, args)


def build_parser():
    parser = argparse.ArgumentParser(
        prog="fisher-ec",
        description="Ergodic capacity of Fisher-Snedecor F fading channels under "
                    "OPRA, ORA, CI and TCI power adaptation (values in nats).")
    parser.add_argument("--version", action="version",
                        version=f"%(prog)s (kernels: {kernels.NAME})")
    sub = parser.add_subparsers(dest="command", required=True)

    ev = sub.add_parser("eval", help="capacity at one operating point")
    ev.add_argument("--scheme", required=True, choices=[k.value for k in SchemeKind])
    ev.add_argument("--m", type=float, required=True)
    ev.add_argument("--ms", type=float, required=True)
    _snr_flags(ev, required=True)
    ev.add_argument("--gamma0", type=float, help="TCI cutoff")
    ev.add_argument("--method", choices=("closed", "quad", "asym", "mc"), default="closed")
    ev.add_argument("--unit", choices=("nats", "bits"), default="nats")
    ev.add_argument("--samples", type=int, default=10**6)
    ev.add_argument("--seed", type=int, default=1)
    ev.add_argument("--shards", type=int, default=1)
    ev.add_argument("--jobs", type=int, default=1)
    _output_flags(ev, "text")
    ev.set_defaults(func=cmd_eval)

    cu = sub.add_parser("cutoff", help="solve the OPRA cutoff")
    cu.add_argument("--m", type=float, required=True)
    cu.add_argument("--ms", type=float, required=True)
    _snr_flags(cu, required=True)
    cu.add_argument("--tol", type=float, default=1e-12)
    _output_flags(cu, "text")
    cu.set_defaults(func=cmd_cutoff)

    mc = sub.add_parser("mc", help="Monte Carlo estimate with its z-score against the closed form")
    mc.add_argument("--scheme", required=True, choices=[k.value for k in SchemeKind])
    mc.add_argument("--m", type=float, required=True)
    mc.add_argument("--ms", type=float, required=True)
    _snr_flags(mc, required=True)
    mc.add_argument("--gamma0", type=float)
    mc.add_argument("--samples", type=int, default=10**7)
    mc.add_argument("--seed", type=int, default=1)
    mc.add_argument("--shards", type=int, default=1)
    mc.add_argument("--jobs", type=int, default=1)
    _output_flags(mc, "text")
    mc.set_defaults(func=cmd_mc)

    sp = sub.add_parser("sweep", help="grid sweep to CSV or JSON")
    sp.add_argument("--config", help="key = value file; flags override it")
    _snr_flags(sp, required=False)
    sp.add_argument("--param-set", action="append", help="'m,ms'; repeatable")
    sp.add_argument("--schemes", help="comma list, default opra,ora,ci,tci")
    sp.add_argument("--gamma0", type=float, help="TCI cutoff")
    sp.add_argument("--parameterization", choices=(sw.GAMMA_BAR, sw.GAMMA_BAR_1))
    sp.add_argument("--outputs", choices=sw.OUTPUTS)
    sp.add_argument("--out", help="output file (default stdout)")
    sp.add_argument("--jobs", type=int, default=1)
    _output_flags(sp, "csv")
    sp.set_defaults(func=cmd_sweep)

    fg = sub.add_parser("figure", help="data for figure 1, 2 or 3")
    fg.add_argument("number", type=int, choices=(1, 2, 3))
    fg.add_argument("--snr-db", help="dB grid start:stop:step or comma list")
    fg.add_argument("--values", help="m list (figure 1) or m_s list (figure 2)")
    fg.add_argument("--out")
    fg.add_argument("--jobs", type=int, default=1)
    fg.add_argument("--format", choices=("csv", "json"), default="csv")
    fg.add_argument("--pt-db", type=float, default=0.0)
    fg.set_defaults(func=cmd_figure)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"{parser.prog}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except DomainError as exc:
        print(f"{parser.prog}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except FisherECError as exc:
        op = exc.operation or type(exc).__name__
        print(f"error: {op}: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
