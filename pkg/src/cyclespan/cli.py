"""Command line entry point: ``cyclespan <subcommand>`` or ``python -m cyclespan``.

Exit codes: 0 success, 1 a checked property failed, 2 bad usage.
"""

from __future__ import annotations

import argparse
import logging
import math
import sys
from dataclasses import asdict

from . import experiments as ex
from .bounds import spectrum
from .graph import read_graph
from .paths import sigma, tau

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def _floats(s: str) -> tuple[float, ...]:
    try:
        return tuple(float(x) for x in s.split(",") if x.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {s!r}")


def _ints(s: str) -> tuple[int, ...]:
    try:
        return tuple(int(x) for x in s.split(",") if x.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {s!r}")


def _emit(text: str, out: str | None) -> None:
    if out and out != "-":
        with open(out, "w", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _render(rows, header, fmt: str) -> str:
    if fmt == "json":
        return ex.to_json([r if isinstance(r, dict) else asdict(r) for r in rows]) + "\n"
    return ex.to_csv(rows, header)


def cmd_verify_kn(a) -> int:
    lib = ex.H_LIBRARY if a.h_lib else None
    rows = ex.verify_kn(a.nmax, a.kappas, lib)
    _emit(_render(rows, ex.header_of(ex.VerifyRow), a.format), a.out)
    bad = [r for r in rows if not r.passed]
    print(f"verify-kn: {len(rows) - len(bad)}/{len(rows)} PASS", file=sys.stderr)
    return EXIT_FAIL if bad else EXIT_OK


def cmd_sweep(a) -> int:
    spec = ex.SweepSpec(a.n, a.kappa, a.grid, a.trials, a.seed, a.mode)
    summ, recs = ex.run_sweep(spec, need_F=not a.no_F)
    _emit(_render(summ, ex.SWEEP_HEADER, a.format), a.out)
    if a.records:
        _emit(_render(recs, ex.TRIAL_HEADER, a.format), a.records)
    return EXIT_OK


def cmd_fit(a) -> int:
    with open(a.sweep_csv) as fh:
        x0, s = ex.fit_sweep_csv(fh.read())
    print(f"p_half_over_pstar,slope\n{x0!r},{s!r}")
    return EXIT_OK


def cmd_audit(a) -> int:
    rep = ex.audit_main_theorem(a.n_list, a.kappa, a.grid, a.trials, a.seed)
    rows = [{"n": n, **asdict(s)} for n, s in rep.points]
    _emit(_render(rows, ex.AUDIT_HEADER, a.format), a.out)
    ok = rep.passed(a.max_rate)
    print(
        f"audit: max Pr(Q and not T) = {rep.max_rate:.4f} at {rep.max_at} "
        f"CI {rep.max_rate_ci}; rare trials {rep.rare_trials}, witness failures {rep.witness_failures}, "
        f"errors {rep.errors} -> {'PASS' if ok else 'FAIL'}",
        file=sys.stderr,
    )
    return EXIT_OK if ok else EXIT_FAIL


def cmd_couple(a) -> int:
    try:
        recs = ex.run_coupling(a.n, a.kappa, a.p, a.theta, a.trials, a.seed, a.rule)
    except ex.AcceptanceError as exc:
        print(f"couple: FAIL: {exc}", file=sys.stderr)
        return EXIT_FAIL
    _emit(_render(recs, ex.COUPLE_HEADER, a.format), a.out)
    s = ex.summarise_coupling(recs, a.min_F)
    print(f"couple: {s}", file=sys.stderr)
    return EXIT_OK


def cmd_paths(a) -> int:
    G = read_graph(a.graph_file)
    t, trunc = tau(G, a.x, a.y, a.l)
    st = sigma(G, a.x, a.y, a.l)
    row = {"x": a.x, "y": a.y, "l": a.l, "tau": t, "tau_truncated": trunc,
           "sigma": st.sigma, "sigma_certified": st.sigma_certified}
    _emit(_render([row], list(row), a.format), a.out)
    return EXIT_OK


def cmd_spectrum(a) -> int:
    G = read_graph(a.graph_file)
    r = spectrum(G, a.tol, a.max_iter)
    row = {"n": G.n, "m": G.m, "lambda1": r.lambda1, "lambda2": r.lambda2, "lambda_n": r.lambda_n,
           "iterations": r.iterations, "residual1": r.residuals[0], "residual2": r.residuals[1],
           "residual_n": r.residuals[2], "converged": r.converged,
           "eigvec_ratio": r.eigvec_ratio if math.isfinite(r.eigvec_ratio) else "inf"}
    _emit(_render([row], list(row), a.format), a.out)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="cyclespan", description="Cycle-space thresholds in random graphs.")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="cmd", required=True, parser_class=_Parser)

    def common(sp, out=True):
        sp.add_argument("--format", choices=("csv", "json"), default="csv")
        if out:
            sp.add_argument("--out", default="-", help="output path, '-' for stdout")

    s = sub.add_parser("verify-kn", help="exact H-space dimensions of K_n")
    s.add_argument("--nmax", type=int, default=9)
    s.add_argument("--kappas", type=_ints, default=(3, 5, 7))
    s.add_argument("--h-lib", action="store_true", help="also check the small-pattern library")
    common(s)
    s.set_defaults(fn=cmd_verify_kn)

    s = sub.add_parser("sweep", help="Monte Carlo Q / T rates over a grid of p / p*")
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--kappa", type=int, default=3)
    s.add_argument("--grid", type=_floats, default=ex.DEFAULT_GRID)
    s.add_argument("--trials", type=int, default=200)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--mode", choices=("exact", "heuristic"), default="exact")
    s.add_argument("--no-F", action="store_true", help="skip the minimiser (Q / T rates only)")
    s.add_argument("--records", help="also write per-trial records here")
    common(s)
    s.set_defaults(fn=cmd_sweep)

    s = sub.add_parser("fit", help="logistic threshold fit of a sweep CSV")
    s.add_argument("sweep_csv")
    s.set_defaults(fn=cmd_fit)

    s = sub.add_parser("audit", help="rate of Q and not T, with witness checks")
    s.add_argument("--n-list", type=_ints, required=True)
    s.add_argument("--kappa", type=int, default=3)
    s.add_argument("--grid", type=_floats, default=ex.DEFAULT_GRID)
    s.add_argument("--trials", type=int, default=400)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--max-rate", type=float, default=0.05)
    common(s)
    s.set_defaults(fn=cmd_audit)

    s = sub.add_parser("couple", help="restrict F(G) to a coupled subgraph G0")
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--kappa", type=int, default=3)
    s.add_argument("--p", type=float, required=True)
    s.add_argument("--theta", type=_floats, default=(0.5,))
    s.add_argument("--trials", type=int, default=20)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--rule", choices=("minimizer", "half-cut"), default="minimizer")
    s.add_argument("--min-F", type=int, default=200)
    common(s)
    s.set_defaults(fn=cmd_couple)

    s = sub.add_parser("paths", help="tau and sigma for one vertex pair")
    s.add_argument("--graph-file", required=True)
    s.add_argument("--x", type=int, required=True)
    s.add_argument("--y", type=int, required=True)
    s.add_argument("--l", type=int, required=True)
    common(s)
    s.set_defaults(fn=cmd_paths)

    s = sub.add_parser("spectrum", help="top, second and bottom adjacency eigenvalues")
    s.add_argument("--graph-file", required=True)
    s.add_argument("--tol", type=float, default=1e-8)
    s.add_argument("--max-iter", type=int, default=10_000)
    common(s)
    s.set_defaults(fn=cmd_spectrum)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    a = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if a.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        return a.fn(a)
    except (ValueError, OSError) as exc:
        print(f"cyclespan: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    raise SystemExit(main())
