"""Command-line interface.

Subcommands: coeffs, exact, moments, converge, oscillation, sample,
verify-identities.  Global flags (--bits, --seed, --out, --format,
--config) may also be provided through a JSON or TOML config file;
explicit flags win over the config file.
"""

from __future__ import annotations

import argparse
import json
import sys

try:
    import tomllib
except ModuleNotFoundError:  # Python 3.10
    import tomli as tomllib

from . import asympt, convergence, exactz, ginibre_moments, model, reports, sampling
from .model import LemniscateParams
from .precision import DEFAULT_BITS, context, to_decimal


def _parse_int_list(text: str) -> list[int]:
    return [int(tok) for tok in text.replace(",", " ").split()]


def _add_global_flags(parser, default):
    parser.add_argument("--bits", type=int, default=default, help=f"working precision in bits (default {DEFAULT_BITS})")
    parser.add_argument("--seed", type=int, default=default, help="RNG seed (default 0)")
    parser.add_argument("--out", default=default, help="output path (default: stdout)")
    parser.add_argument("--format", choices=("csv", "json"), default=default, help="output format (default json)")
    parser.add_argument("--config", default=default, help="JSON or TOML file with default flag values")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="lemniscate-lab",
        description="Exact and asymptotic free energies of lemniscate Coulomb-gas ensembles.",
    )
    _add_global_flags(parser, default=None)
    # accepted after the subcommand as well; SUPPRESS keeps the sub-parse
    # from clobbering values given before it
    common = argparse.ArgumentParser(add_help=False)
    _add_global_flags(common, default=argparse.SUPPRESS)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=lambda **kw: argparse.ArgumentParser(parents=[common], **kw))

    def add_model_args(sp, with_n=True):
        sp.add_argument("--d", type=int, required=True, help="symmetry order")
        sp.add_argument("--t", type=float, required=True, help="deformation parameter")
        sp.add_argument("--c", type=float, default=0.0, help="point-charge exponent")
        if with_n:
            sp.add_argument("--n", type=int, required=True, help="particle number")

    sp = sub.add_parser("coeffs", help="expansion coefficients and free-energy functionals")
    add_model_args(sp)

    sp = sub.add_parser("exact", help="exact log Z by the decomposition route")
    add_model_args(sp)
    sp.add_argument("--check", choices=("gram", "radial"), default=None, help="also run a cross-check route")

    sp = sub.add_parser("moments", help="Ginibre characteristic-polynomial moments")
    sp.add_argument("--N", dest="n_list", type=str, required=True, help="matrix sizes, e.g. '10,20,40'")
    sp.add_argument("--a", type=float, required=True, help="radial position of the evaluation point")
    sp.add_argument("--gamma", type=float, required=True, help="moment exponent (> -2)")
    sp.add_argument("--corrections", type=int, default=0, help="number of 1/N correction terms in the bulk formula")

    sp = sub.add_parser("converge", help="exact-vs-asymptotic convergence study")
    add_model_args(sp, with_n=False)
    sp.add_argument("--n-grid", type=str, required=True, help="grid of particle numbers, e.g. '20,28,40,56,80'")

    sp = sub.add_parser("oscillation", help="residue-class O(1) residuals")
    add_model_args(sp, with_n=False)
    sp.add_argument("--n-min", type=int, required=True)
    sp.add_argument("--n-max", type=int, required=True)

    sp = sub.add_parser("sample", help="Metropolis sampling of the Gibbs measure")
    add_model_args(sp)
    sp.add_argument("--sweeps", type=int, default=2000, help="post-burn-in sweeps")
    sp.add_argument("--burn-in", type=int, default=sampling.DEFAULT_BURN_IN)
    sp.add_argument("--step", type=float, default=None, help="proposal step (default: auto-tuned)")

    sp = sub.add_parser("verify-identities", help="check coefficient identities against quadrature")
    add_model_args(sp, with_n=False)
    return parser


def _apply_config(args: argparse.Namespace, argv: list[str]) -> None:
    if not args.config:
        return
    path = args.config
    if path.endswith(".toml"):
        with open(path, "rb") as fh:
            cfg = tomllib.load(fh)
    else:
        with open(path) as fh:
            cfg = json.load(fh)
    explicit = set()
    for tok in argv:
        if tok.startswith("--"):
            explicit.add(tok.lstrip("-").split("=")[0].replace("-", "_"))
    for key, value in cfg.items():
        dest = key.replace("-", "_")
        if dest in explicit:
            continue  # flags win
        if hasattr(args, dest) and getattr(args, dest) is None:
            setattr(args, dest, value)


def _finalize_defaults(args: argparse.Namespace) -> None:
    if args.bits is None:
        args.bits = DEFAULT_BITS
    if args.seed is None:
        args.seed = 0
    if args.format is None:
        args.format = "json"


def _emit(args, kind, body, csv_rows=None, csv_header=None):
    if args.format == "csv" and csv_rows is not None:
        reports.write_text(reports.render_csv(csv_rows, csv_header), args.out)
    else:
        reports.write_text(reports.render_json(reports.report_payload(kind, body)), args.out)


def _cmd_coeffs(args) -> int:
    p = LemniscateParams(args.d, args.t, args.c)
    co = asympt.coefficients(p, args.n, bits=args.bits)
    body = {"params": p, "n": args.n, "coefficients": co}
    if p.c == 0.0:
        body["functionals"] = asympt.functionals(p, args.n, bits=args.bits)
    _emit(args, "coefficients", body)
    return 0


def _cmd_exact(args) -> int:
    p = LemniscateParams(args.d, args.t, args.c)
    val = exactz.log_Z_lemniscate(args.n, p, bits=args.bits)
    body = {"params": p, "n": args.n, "log_Z": to_decimal(val), "bits": args.bits}
    if args.check == "gram":
        other = exactz.log_Z_gram(args.n, p, bits=args.bits)
        with context(args.bits):
            body["check"] = {"route": "gram", "log_Z": to_decimal(other), "difference": float(val - other)}
    elif args.check == "radial":
        if p.t != 0.0:
            raise model.DomainError("the radial route applies only at t = 0")
        other = exactz.log_Z_radial(args.n, p.d, p.c, bits=args.bits)
        with context(args.bits):
            body["check"] = {"route": "radial", "log_Z": to_decimal(other), "difference": float(val - other)}
    _emit(args, "exact", body)
    return 0


def _cmd_moments(args) -> int:
    rows = []
    for N in _parse_int_list(args.n_list):
        q = ginibre_moments.MomentQuery(N, args.a, args.gamma)
        exact = ginibre_moments.log_moment_exact(q, bits=args.bits)
        if args.a > 1:
            asy = ginibre_moments.log_moment_asymptotic_outside(N, args.a, args.gamma, bits=args.bits)
        else:
            asy = ginibre_moments.log_moment_asymptotic_bulk(
                N, args.a, args.gamma, corrections=args.corrections, bits=args.bits
            )
        with context(args.bits):
            rows.append((N, args.a, args.gamma, float(exact), float(asy), float(exact - asy)))
    body = [
        {"N": r[0], "a": r[1], "gamma": r[2], "exact": r[3], "asymptotic": r[4], "residual": r[5]}
        for r in rows
    ]
    _emit(args, "moments", body, csv_rows=rows, csv_header=("N", "a", "gamma", "exact", "asymptotic", "residual"))
    return 0


def _cmd_converge(args) -> int:
    p = LemniscateParams(args.d, args.t, args.c)
    report = convergence.run_convergence(p, _parse_int_list(args.n_grid), bits=args.bits)
    rows = [(r.n, r.exact, r.asymptotic, r.remainder) for r in report.rows]
    _emit(args, "convergence", report, csv_rows=rows, csv_header=("n", "exact", "asymptotic", "remainder"))
    return 0


def _cmd_oscillation(args) -> int:
    p = LemniscateParams(args.d, args.t, args.c)
    report = convergence.extract_oscillation(p, range(args.n_min, args.n_max + 1), bits=args.bits)
    _emit(args, "oscillation", report)
    return 0


def _cmd_sample(args) -> int:
    p = LemniscateParams(args.d, args.t, args.c)
    cloud = sampling.sample_gas(
        p, args.n, sweeps=args.sweeps, step=args.step, seed=args.seed, burn_in=args.burn_in
    )
    if args.format == "csv":
        rows = [(z.real, z.imag) for z in cloud.points]
        reports.write_text(reports.render_csv(rows, ("re", "im")), args.out)
    else:
        _emit(args, "sample", cloud)
    return 0


def _cmd_verify_identities(args) -> int:
    p = LemniscateParams(args.d, args.t, args.c)
    co = asympt.coefficients(p, 1, bits=args.bits)
    rep = model.equilibrium_energy(p, model.QUADRATURE)
    checks = []
    checks.append(("C1 = -energy(quadrature)", float(abs(co.c1 + rep.energy)), 1e-8))
    if p.c == 0.0:
        import math

        target_c3 = math.log(2 * math.pi) / 2 - 1 - 0.5 * rep.entropy
        checks.append(("C3 = log(2pi)/2 - 1 - entropy/2", float(abs(co.c3 - target_c3)), 1e-8))
    checks.append(("C2 = 1/2", float(abs(co.c2 - 0.5)), 1e-15))
    chi = model.euler_characteristic(p)
    if p.c == 0.0:
        d_sing = 1 if chi == p.d else p.d
        conj = asympt.conjectured_log_coefficient(chi, d_sing)
        checks.append(("C4 matches conjectured log coefficient", float(abs(co.c4 - float(conj))), 1e-12))
    failures = 0
    lines = []
    for name, err, tol in checks:
        ok = err < tol
        failures += 0 if ok else 1
        lines.append({"check": name, "error": err, "tolerance": tol, "status": "PASS" if ok else "FAIL"})
        print(f"[{'PASS' if ok else 'FAIL'}] {name}: |error| = {err:.3e} (tol {tol:.0e})")
    if args.out:
        reports.write_text(
            reports.render_json(reports.report_payload("verify-identities", {"params": p, "checks": lines})),
            args.out,
        )
    return 1 if failures else 0


_COMMANDS = {
    "coeffs": _cmd_coeffs,
    "exact": _cmd_exact,
    "moments": _cmd_moments,
    "converge": _cmd_converge,
    "oscillation": _cmd_oscillation,
    "sample": _cmd_sample,
    "verify-identities": _cmd_verify_identities,
}


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    args = parser.parse_args(argv)
    _apply_config(args, argv)
    _finalize_defaults(args)
    return _COMMANDS[args.command](args)


if __name__ == "__main__":
    sys.exit(main())
