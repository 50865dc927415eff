"""Command-line front end: parameter ingestion, suite orchestration, and
machine-readable JSON reports.

Exit codes: 0 all checks passed, 1 check failure or runtime math error,
2 usage/configuration error.
"""

from __future__ import annotations

import argparse
import os
import sys
import time

import numpy as np

from . import dybe as dy
from . import kernels as ke
from . import rmatrix as rm
from . import series as se
from .exceptions import ConditioningError, DynellError, ParameterError
from .params import ModularParams
from .report import Report, REPORT_VERSION, SUITE_NAMES, TruncationOrders, VerificationConfig
from .verify import run_suite

REPORT_DIR_ENV = "DYNELL_REPORT_DIR"


def parse_complex(text: str) -> complex:
    """Parse shell-friendly complex literals like 0.75i, 0.3+0.1i, -2."""
    s = text.strip().replace(" ", "").replace("i", "j").replace("J", "j")
    try:
        return complex(s)
    except ValueError as e:
        raise ParameterError(f"cannot parse complex number from {text!r}") from e


def _add_modular_args(sp, tau_default="0.75i", gamma_default="0.05"):
    sp.add_argument("--tau", default=tau_default, help="modular parameter (Im > 0)")
    sp.add_argument("--gamma", default=gamma_default, help="dynamical step")


def _modular(args) -> ModularParams:
    return ModularParams(parse_complex(args.tau), parse_complex(args.gamma))


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="dynell",
        description="Verify elliptic dynamical R-matrix identities numerically.",
    )
    sub = ap.add_subparsers(dest="command", required=True)

    v = sub.add_parser("verify", help="run verification suites, emit a JSON report")
    _add_modular_args(v)
    v.add_argument(
        "--suite",
        action="append",
        default=None,
        choices=list(SUITE_NAMES) + ["all"],
        help="suite to run (repeatable; default all)",
    )
    v.add_argument("--samples", type=int, default=100)
    v.add_argument("--seed", type=int, default=42)
    v.add_argument(
        "--tol",
        type=float,
        default=1e-9,
        help="baseline tolerance; published per-check tolerances scale as tol/1e-9",
    )
    v.add_argument("--report", default=None, help="report path (default: stdout, or "
                   f"${REPORT_DIR_ENV}/dynell-report.json when that variable is set)")
    v.add_argument("--laurent-order", type=int, default=24)
    v.add_argument("--jet-order", type=int, default=8)
    v.add_argument("--kernel-n", type=int, default=12)

    e = sub.add_parser("eval", help="print one R-matrix at a point")
    _add_modular_args(e)
    e.add_argument("--kind", required=True,
                   choices=["rminus", "rplus", "rbar", "classical"])
    e.add_argument("--z", required=True)
    e.add_argument("--lambda", dest="lam", required=True)

    s = sub.add_parser("series", help="formal-series solvers and their residuals")
    ssub = s.add_subparsers(dest="series_command", required=True)

    sp = ssub.add_parser("phi", help="gauge-factor jet and functional equation")
    _add_modular_args(sp)
    sp.add_argument("--order", type=int, default=8)
    sp.add_argument("--lambda", dest="lam", default="0.31+0.21i")

    sf = ssub.add_parser("fk", help="closed form vs series solver")
    _add_modular_args(sf)
    sf.add_argument("--p", type=int, default=1, dest="p_int")
    sf.add_argument("--zeta", default="0.37+0.19i")
    sf.add_argument("--zeta-order", type=int, default=24)
    sf.add_argument("--hbar-order", type=int, default=8)

    sa = ssub.add_parser("a", help="scalar-prefactor jet and f_K consistency")
    _add_modular_args(sa)
    sa.add_argument("--x", default="0.24+0.11i")
    sa.add_argument("--order", type=int, default=8)

    si = ssub.add_parser("shift-identity", help="shift-operator exponential identity")
    _add_modular_args(si)
    si.add_argument("--x", default="0.27+0.13i")
    si.add_argument("--order", type=int, default=8)

    k = sub.add_parser("kernels", help="dual bases and kernel-sum residuals")
    _add_modular_args(k)
    k.add_argument("--lambda", dest="lam", default=None,
                   help="sector parameter (omit with --sector zero)")
    k.add_argument("--sector", choices=["lambda", "zero"], default="lambda")
    k.add_argument("--order", type=int, default=12, help="truncation order N")
    k.add_argument("--z", default="0.4+0.2i", help="evaluation point for the kernel sum")

    return ap


# -- verify ----------------------------------------------------------------


def cmd_verify(args) -> int:
    suites = tuple(args.suite) if args.suite else ("all",)
    config = VerificationConfig(
        tau=parse_complex(args.tau),
        gamma=parse_complex(args.gamma),
        suites=suites,
        samples=args.samples,
        seed=args.seed,
        tolerance=args.tol,
        truncation_orders=TruncationOrders(
            laurent=args.laurent_order, jet=args.jet_order, kernel_N=args.kernel_n
        ),
        report_path=args.report,
    )
    t0 = time.perf_counter()
    records = run_suite(config)
    wall = int((time.perf_counter() - t0) * 1000)
    report = Report(REPORT_VERSION, config, records, wall)

    path = args.report
    if path is None and os.environ.get(REPORT_DIR_ENV):
        path = os.path.join(os.environ[REPORT_DIR_ENV], "dynell-report.json")
    text = report.to_json()
    if path:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")
        _print_summary(report)
        print(f"report written to {path}")
    else:
        print(text)
    return 0 if report.all_passed else 1


def _print_summary(report: Report) -> None:
    by_name: dict = {}
    for r in report.records:
        agg = by_name.setdefault(
            r.check_name, {"n": 0, "failed": 0, "skipped": 0, "worst": 0.0}
        )
        agg["n"] += 1
        if r.skipped_singular:
            agg["skipped"] += 1
            continue
        if not r.passed:
            agg["failed"] += 1
        if np.isfinite(r.residual):
            agg["worst"] = max(agg["worst"], r.residual)
    for name in sorted(by_name):
        a = by_name[name]
        status = "ok" if a["failed"] == 0 else "FAIL"
        print(
            f"{status:4s} {name:45s} n={a['n']:<4d} worst={a['worst']:.3e} "
            f"failed={a['failed']} skipped={a['skipped']}"
        )
    s = report.summary
    print(
        f"summary: total={s['total']} passed={s['passed']} failed={s['failed']} "
        f"skipped={s['skipped']} wall_ms={report.wall_time_ms}"
    )


# -- eval ------------------------------------------------------------------


def cmd_eval(args) -> int:
    p = _modular(args)
    z = parse_complex(args.z)
    lam = parse_complex(args.lam)
    if args.kind == "classical":
        op = rm.classical_r(z, lam, p)
    else:
        op = rm.rmatrix(args.kind, z, lam, p)
    print(f"# {args.kind} at z={z} lambda={lam} tau={p.tau} gamma={p.gamma}")
    print("# row col re im")
    for r in range(4):
        for c in range(4):
            v = op.matrix[r, c]
            print(f"{r} {c} {v.real:+.16e} {v.imag:+.16e}")
    return 0


# -- series ----------------------------------------------------------------


def cmd_series(args) -> int:
    p = _modular(args)
    if args.series_command == "phi":
        lam = parse_complex(args.lam)
        jet = se.solve_phi(lam, args.order, p)
        res = se.phi_equation_residual(lam, args.order, p)
        print(f"# phi regular part at lambda={lam}, jet in gamma")
        for m, (c, r) in enumerate(zip(jet.coeffs, res)):
            print(f"order {m}: coeff {c.real:+.12e}{c.imag:+.12e}i  eq-residual {r:.3e}")
        return 0
    if args.series_command == "fk":
        zeta = parse_complex(args.zeta)
        eq = se.fk_equation_residual(args.p_int, zeta, p)
        coef = se.fk_series_vs_closed_residual(
            args.p_int, args.zeta_order, args.hbar_order, p
        )
        fks = se.solve_fk_series(-2 * args.p_int, args.zeta_order, args.hbar_order, p)
        jet = fks.f_jet_at(zeta)
        print(f"# f_K, K={-2*args.p_int}: closed form vs series solver")
        print(f"closed-form equation residual at zeta={zeta}: {eq:.3e}")
        print(f"series-vs-closed coefficient residual: {coef:.3e}")
        for m, c in enumerate(jet.coeffs):
            print(f"hbar^{m} coefficient at zeta: {c.real:+.12e}{c.imag:+.12e}i")
        return 0
    if args.series_command == "a":
        x = parse_complex(args.x)
        jet = se.solve_a_series(x, args.order, p)
        res = se.a_fk_consistency_residual(x, args.order, p)
        print(f"# log A jet in hbar at x={x}")
        for m, c in enumerate(jet.coeffs):
            print(f"order {m}: {c.real:+.12e}{c.imag:+.12e}i")
        print(f"f_K consistency residual (K=-2): {res:.3e}")
        return 0
    x = parse_complex(args.x)
    orders = se.shift_operator_identity_orders(x, args.order, p)
    print(f"# shift-operator identity at x={x}")
    for m, r in enumerate(orders):
        print(f"order {m}: residual {r:.3e}")
    return 0 if float(np.max(orders)) < 1e-9 else 1


# -- kernels -----------------------------------------------------------------


def cmd_kernels(args) -> int:
    p = _modular(args)
    z = parse_complex(args.z)
    lam = None
    if args.sector == "lambda":
        if args.lam is None:
            raise ParameterError("--lambda is required unless --sector zero")
        lam = parse_complex(args.lam)
    basis = ke.dual_basis(lam, args.order, p)
    dev = ke.duality_deviation(basis)
    res = ke.kernel_sum_residual(lam, z, args.order, p)
    sector = "zero" if lam is None else f"lambda={lam}"
    print(f"# kernel data, sector {sector}, N={args.order}")
    print(f"duality deviation from identity: {dev:.3e}")
    print(f"kernel-sum residual at z={z}: {res:.3e}")
    print(f"condition number of the dual solve: {basis.condition_number:.3e}")
    return 0


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    try:
        if args.command == "verify":
            return cmd_verify(args)
        if args.command == "eval":
            return cmd_eval(args)
        if args.command == "series":
            return cmd_series(args)
        if args.command == "kernels":
            return cmd_kernels(args)
        raise ParameterError(f"unknown command {args.command!r}")
    except ParameterError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    except ConditioningError as e:
        print(f"error: {e} (condition number {e.condition_number:.3e})",
              file=sys.stderr)
        return 1
    except DynellError as e:
        print(f"error: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
