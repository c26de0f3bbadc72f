"""Self-contained linear-programming oracle used to cross-check the ADMM
solvers (and the CLI's --verify mode).

Standard form: minimize c'x subject to A x = b, x >= 0. Dense two-phase
tableau simplex with Bland's rule, so it terminates on every input; slow,
which is fine at oracle sizes. Reductions map single columns of the three
L1 problems onto this form so their optima can be checked independently of
the iterative solvers.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

OPTIMAL = "optimal"
INFEASIBLE = "infeasible"
UNBOUNDED = "unbounded"

_TOL = 1e-9


@dataclass(frozen=True)
class StandardLp:
    """min c'x s.t. a_eq x = b_eq, x >= 0."""

    c: np.ndarray
    a_eq: np.ndarray
    b_eq: np.ndarray

    def __post_init__(self):
        c = np.asarray(self.c, dtype=float)
        a = np.asarray(self.a_eq, dtype=float)
        b = np.asarray(self.b_eq, dtype=float)
        if a.ndim != 2 or c.ndim != 1 or b.ndim != 1:
            raise ValueError("a_eq must be 2-D; c and b_eq must be 1-D")
        if a.shape != (b.shape[0], c.shape[0]):
            raise ValueError(
                f"inconsistent shapes: a_eq {a.shape}, c {c.shape}, b_eq {b.shape}"
            )
        if not (np.isfinite(a).all() and np.isfinite(b).all() and np.isfinite(c).all()):
            raise ValueError("LP data must be finite")
        object.__setattr__(self, "c", c)
        object.__setattr__(self, "a_eq", a)
        object.__setattr__(self, "b_eq", b)


@dataclass(frozen=True)
class LpSolution:
    """Simplex outcome. ``dual_eq`` holds the equality-row multipliers
    (zero on rows found redundant in phase one)."""

    status: str
    x: np.ndarray | None = None
    objective: float | None = None
    dual_eq: np.ndarray | None = None


def _pivot(t, basis, row, col):
    t[row] = t[row] / t[row, col]
    other = t[:, col].copy()
    other[row] = 0.0
    t -= other[:, None] * t[row][None, :]
    basis[row] = col


def _run_simplex(t, basis, cost, n_enterable):
    """Bland iterations in place; False means unbounded."""
    while True:
        reduced = cost[:n_enterable] - cost[basis] @ t[:, :n_enterable]
        entering = None
        for j in range(n_enterable):
            if reduced[j] < -_TOL:
                entering = j
                break
        if entering is None:
            return True
        col = t[:, entering]
        rows = np.nonzero(col > _TOL)[0]
        if rows.size == 0:
            return False
        ratios = t[rows, -1] / col[rows]
        best = ratios.min()
        # Bland tie-break: smallest basis index among the minimizing rows
        ties = rows[ratios <= best + _TOL * (1.0 + abs(best))]
        leaving = min(ties, key=lambda i: basis[i])
        _pivot(t, basis, leaving, entering)


def simplex_solve(lp):
    """Solve a standard-form LP; never raises on valid shapes.

    Phase one minimizes the sum of artificial variables; redundant rows
    discovered there are dropped (their duals are reported as zero).
    Phase two never lets artificial columns re-enter the basis.
    """
    a = lp.a_eq.copy()
    b = lp.b_eq.copy()
    c = lp.c
    k, q = a.shape

    flip = b < 0
    a[flip] *= -1.0
    b[flip] *= -1.0

    t = np.hstack([a, np.eye(k), b[:, None]])
    basis = list(range(q, q + k))

    cost1 = np.concatenate([np.zeros(q), np.ones(k)])
    _run_simplex(t, basis, cost1, n_enterable=q + k)
    if cost1[basis] @ t[:, -1] > _TOL:
        return LpSolution(status=INFEASIBLE)

    # Drive leftover artificials out of the basis; a row with no usable
    # real pivot is redundant and gets dropped.
    drop = []
    for i in range(len(basis)):
        if basis[i] < q:
            continue
        pivot_col = None
        for j in range(q):
            if abs(t[i, j]) > _TOL:
                pivot_col = j
                break
        if pivot_col is None:
            drop.append(i)
        else:
            _pivot(t, basis, i, pivot_col)
    if drop:
        keep = [i for i in range(len(basis)) if i not in drop]
        t = t[keep]
        basis = [basis[i] for i in keep]

    cost2 = np.concatenate([c, np.zeros(k)])
    if not _run_simplex(t, basis, cost2, n_enterable=q):
        return LpSolution(status=UNBOUNDED)

    x = np.zeros(q)
    for i, j in enumerate(basis):
        x[j] = t[i, -1]
    # Final artificial columns hold the basis inverse, so the equality
    # duals come out directly; columns of dropped rows are zero there.
    y = cost2[basis] @ t[:, q:q + k]
    y = np.where(flip, -y, y)
    return LpSolution(
        status=OPTIMAL,
        x=x,
        objective=float(c @ x),
        dual_eq=y,
    )


@dataclass(frozen=True)
class LpReduction:
    """A standard-form LP plus the map from its solution back to the
    original variables. The first ``n_core_rows`` equality rows are the
    original system rows, in order, so their duals line up."""

    lp: StandardLp
    recover: Callable[[np.ndarray], np.ndarray]
    n_core_rows: int


def lad_as_lp(a, h):
    """LAD column as an LP: x = x+ - x-, residual u - v, minimize sum(u+v).

    Produces q = 2n + 2m variables and k = m rows; the LP optimum equals
    ``min_x ||h - A x||_1``.
    """
    a = np.asarray(a, dtype=float)
    h = np.asarray(h, dtype=float).ravel()
    m, n = a.shape
    eye = np.eye(m)
    a_eq = np.hstack([a, -a, eye, -eye])
    c = np.concatenate([np.zeros(2 * n), np.ones(2 * m)])

    def recover(xlp):
        return xlp[:n] - xlp[n:2 * n]

    return LpReduction(
        lp=StandardLp(c=c, a_eq=a_eq, b_eq=h),
        recover=recover,
        n_core_rows=m,
    )


def cbp_as_lp(g, h, c1, c2):
    """Basis-pursuit column as an LP whose optimum equals the original one.

    Coordinates bounded at zero map to one nonnegative variable; free
    coordinates (bound -inf) split into a sign pair; other finite bounds
    add one slack row ``x_l - s = c2_l`` (splitting first when the bound is
    negative, so the objective still linearizes |x_l|).
    """
    g = np.asarray(g, dtype=float)
    h = np.asarray(h, dtype=float).ravel()
    c1 = np.asarray(c1, dtype=float).ravel()
    c2 = np.asarray(c2, dtype=float).ravel()
    m, n = g.shape
    if c1.shape != (n,) or c2.shape != (n,):
        raise ValueError("c1 and c2 must be single columns matching G")

    extra = [l for l in range(n) if np.isfinite(c2[l]) and c2[l] != 0.0]
    k = m + len(extra)
    row_of = {l: m + i for i, l in enumerate(extra)}

    columns = []
    costs = []
    plan = []

    def add_column(col, cost):
        columns.append(col)
        costs.append(cost)
        return len(columns) - 1

    for l in range(n):
        core = np.zeros(k)
        core[:m] = g[:, l]
        if np.isneginf(c2[l]):
            pos = add_column(core, c1[l])
            neg = add_column(-core, c1[l])
            plan.append(("split", pos, neg))
        elif c2[l] == 0.0:
            plan.append(("direct", add_column(core, c1[l])))
        elif c2[l] > 0.0:
            col = core.copy()
            col[row_of[l]] = 1.0
            j = add_column(col, c1[l])
            slack = np.zeros(k)
            slack[row_of[l]] = -1.0
            add_column(slack, 0.0)
            plan.append(("direct", j))
        else:
            col = core.copy()
            col[row_of[l]] = 1.0
            pos = add_column(col, c1[l])
            neg = add_column(-col, c1[l])
            slack = np.zeros(k)
            slack[row_of[l]] = -1.0
            add_column(slack, 0.0)
            plan.append(("split", pos, neg))

    b_eq = np.concatenate([h, c2[extra]]) if extra else h.copy()
    a_eq = np.column_stack(columns)

    def recover(xlp):
        x = np.empty(n)
        for l, entry in enumerate(plan):
            if entry[0] == "direct":
                x[l] = xlp[entry[1]]
            else:
                x[l] = xlp[entry[1]] - xlp[entry[2]]
        return x

    return LpReduction(
        lp=StandardLp(c=np.asarray(costs), a_eq=a_eq, b_eq=b_eq),
        recover=recover,
        n_core_rows=m,
    )


def oracle_objective(problem):
    """Exact optimum of a batch problem: sum of per-column LP optima.

    Accepts a ProblemLad, ProblemCbp or ProblemCslad. Raises ValueError if
    any column is infeasible or unbounded.
    """
    from .cbp import ProblemCbp
    from .cslad import ProblemCslad, cslad_to_cbp
    from .lad import ProblemLad

    if isinstance(problem, ProblemCslad):
        problem = cslad_to_cbp(problem)
    total = 0.0
    if isinstance(problem, ProblemLad):
        for i in range(problem.h.shape[1]):
            reduction = lad_as_lp(problem.a, problem.h[:, i])
            sol = simplex_solve(reduction.lp)
            if sol.status != OPTIMAL:
                raise ValueError(f"oracle: column {i} is {sol.status}")
            total += sol.objective
    elif isinstance(problem, ProblemCbp):
        for i in range(problem.h.shape[1]):
            reduction = cbp_as_lp(
                problem.g, problem.h[:, i], problem.c1[:, i], problem.c2[:, i]
            )
            sol = simplex_solve(reduction.lp)
            if sol.status != OPTIMAL:
                raise ValueError(f"oracle: column {i} is {sol.status}")
            total += sol.objective
    else:
        raise TypeError(f"unsupported problem type {type(problem).__name__}")
    return total


def oracle_num_variables(problem):
    """Number of LP variables one column reduces to (the --verify size cap
    is expressed in these)."""
    from .cbp import ProblemCbp
    from .cslad import ProblemCslad, cslad_to_cbp
    from .lad import ProblemLad

    if isinstance(problem, ProblemCslad):
        problem = cslad_to_cbp(problem)
    if isinstance(problem, ProblemLad):
        m, n = problem.a.shape
        return 2 * n + 2 * m
    if isinstance(problem, ProblemCbp):
        reduction = cbp_as_lp(
            problem.g, problem.h[:, 0], problem.c1[:, 0], problem.c2[:, 0]
        )
        return reduction.lp.c.shape[0]
    raise TypeError(f"unsupported problem type {type(problem).__name__}")
