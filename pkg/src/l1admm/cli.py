"""Command-line front end: load CSV matrices, run a solver, write the
solution as ``<out>.csv`` and a JSON convergence report as
``<out>.report.json``.

Exit codes: 0 converged, 1 input error, 2 iteration limit reached.
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from .balancing import BalanceConfig
from .cbp import ProblemCbp, solve_cbp
from .common import SolverConfig
from .cslad import ProblemCslad, solve_cslad
from .io import MatrixFormatError, read_matrix, write_matrix
from .lad import ProblemLad, solve_lad
from .linalg import NotPositiveDefiniteError
from .lp import oracle_num_variables, oracle_objective

EXIT_OK = 0
EXIT_INPUT_ERROR = 1
EXIT_ITER_LIMIT = 2

# --verify refuses problems whose per-column LP exceeds this many variables
# rather than grinding through a huge dense simplex.
VERIFY_MAX_LP_VARIABLES = 60


def build_parser():
    shared = argparse.ArgumentParser(add_help=False)
    shared.add_argument("--h", required=True, metavar="FILE",
                        help="right-hand-side matrix H, one problem per column")
    shared.add_argument("--out", required=True, metavar="PATH",
                        help="output prefix; writes PATH.csv and PATH.report.json")
    shared.add_argument("--tol", type=float, default=1e-8,
                        help="per-entry tolerance, scaled by problem size (default 1e-8)")
    shared.add_argument("--max-iter", type=int, default=20000,
                        help="iteration cap (default 20000)")
    shared.add_argument("--tau", type=float, default=10.0,
                        help="balancing step factor (default 10)")
    shared.add_argument("--mu", type=float, default=2.0,
                        help="balancing trigger ratio (default 2)")
    shared.add_argument("--cadence", type=int, default=10,
                        help="iterations between balancing passes (default 10)")
    shared.add_argument("--no-balance", action="store_true",
                        help="keep the penalties fixed at their initial values")
    shared.add_argument("--rho0", type=float, default=1.0,
                        help="initial per-column penalty scalar (default 1)")
    shared.add_argument("--verify", action="store_true",
                        help="cross-check the objective against the LP oracle")

    parser = argparse.ArgumentParser(
        prog="l1admm",
        description="Batch L1 solvers (ADMM with diagonally weighted "
                    "penalties and residual balancing).",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_lad = sub.add_parser("lad", parents=[shared],
                           help="least absolute deviation: min ||H - AX||_1")
    p_lad.add_argument("--a", required=True, metavar="FILE", help="design matrix A")

    p_cbp = sub.add_parser("cbp", parents=[shared],
                           help="constrained basis pursuit: min ||C1.X||_1 "
                                "s.t. GX = H, X >= C2")
    p_cbp.add_argument("--g", required=True, metavar="FILE", help="constraint matrix G")
    p_cbp.add_argument("--c1", metavar="FILE", help="weight matrix (default: all ones)")
    p_cbp.add_argument("--c2", metavar="FILE",
                       help="lower bounds, -inf allowed (default: all zeros)")

    p_cslad = sub.add_parser("cslad", parents=[shared],
                             help="sparse LAD: min ||H - GX||_1 + ||Lam.X||_1 "
                                  "s.t. X >= Gamma")
    p_cslad.add_argument("--g", required=True, metavar="FILE", help="design matrix G")
    p_cslad.add_argument("--lam", metavar="FILE",
                         help="sparsity weights (default: all zeros)")
    p_cslad.add_argument("--gamma", metavar="FILE",
                         help="lower bounds, -inf allowed (default: unbounded)")

    return parser


def _solver_config(args):
    if args.no_balance:
        balance = None
    else:
        balance = BalanceConfig(tau=args.tau, mu=args.mu, cadence=args.cadence)
    return SolverConfig(
        eps_tol=args.tol,
        max_iter=args.max_iter,
        balance=balance,
        rho0=args.rho0,
    )


def _build_problem(args):
    h = read_matrix(args.h)
    if args.command == "lad":
        return ProblemLad(a=read_matrix(args.a), h=h), solve_lad
    if args.command == "cbp":
        c1 = read_matrix(args.c1) if args.c1 else 1.0
        c2 = read_matrix(args.c2, allow_inf=True) if args.c2 else 0.0
        return ProblemCbp(g=read_matrix(args.g), h=h, c1=c1, c2=c2), solve_cbp
    c1 = read_matrix(args.lam) if args.lam else 0.0
    c2 = read_matrix(args.gamma, allow_inf=True) if args.gamma else -np.inf
    return ProblemCslad(g=read_matrix(args.g), h=h, lam=c1, gamma=c2), solve_cslad


def run(argv=None):
    args = build_parser().parse_args(argv)
    try:
        problem, solver = _build_problem(args)
        if args.verify:
            n_vars = oracle_num_variables(problem)
            if n_vars > VERIFY_MAX_LP_VARIABLES:
                raise ValueError(
                    f"--verify refused: each column reduces to an LP with "
                    f"{n_vars} variables (> {VERIFY_MAX_LP_VARIABLES}); rerun "
                    f"without --verify"
                )
        config = _solver_config(args)
        report = solver(problem, config)
        oracle = oracle_objective(problem) if args.verify else None
    except (MatrixFormatError, NotPositiveDefiniteError, ValueError, OSError) as exc:
        print(f"l1admm: error: {exc}", file=sys.stderr)
        return EXIT_INPUT_ERROR

    write_matrix(f"{args.out}.csv", report.solution)
    payload = {
        "iterations": report.iterations,
        "converged": report.converged,
        "termination": report.termination,
        "primal_history": [float(v) for v in report.primal_history],
        "dual_history": [float(v) for v in report.dual_history],
        "rho_final": [float(v) for v in report.rho_final],
        "p_final": [float(v) for v in report.p_final],
        "objective": report.objective,
    }
    if oracle is not None:
        payload["oracle_objective"] = oracle
    with open(f"{args.out}.report.json", "w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=2)
        fh.write("\n")

    return EXIT_OK if report.converged else EXIT_ITER_LIMIT


def main(argv=None):
    return run(argv)


if __name__ == "__main__":
    sys.exit(main())
