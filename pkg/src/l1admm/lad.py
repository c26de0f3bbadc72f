"""Batch least-absolute-deviation solver.

Minimizes ``||H - A X||_{1,1}`` column by column with a shared design
matrix, via ADMM on the split ``A X - Z = H`` with a diagonally weighted
augmented term (row weights ``p_diag``, per-column scalars ``rho``).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .balancing import (
    ConstraintGeometry,
    ReversalLock,
    balance_all,
    make_penalty_state,
)
from .common import (
    CONVERGED,
    MAX_ITERATIONS,
    IterateState,
    PenaltySnapshot,
    SolveReport,
    SolverConfig,
)
from .linalg import colwise_matmul, soft_threshold, spd_factorize, spd_solve
from .validation import as_float_matrix, check_same_rows, check_shape


@dataclass
class ProblemLad:
    """Data of ``min ||h - A x||_1`` for every column ``h`` of ``H``.

    ``A`` must have full column rank so the weighted normal equations stay
    positive definite.
    """

    a: np.ndarray
    h: np.ndarray

    def __post_init__(self):
        self.a = as_float_matrix(self.a, "A")
        self.h = as_float_matrix(self.h, "H")
        check_same_rows("A", self.a, "H", self.h)

    @property
    def shape(self):
        m, n = self.a.shape
        return m, n, self.h.shape[1]


def lad_objective(a, x, h):
    """Sum of absolute residuals ``||H - A X||_{1,1}``."""
    return float(np.abs(h - colwise_matmul(a, x)).sum())


class LadWorkspace:
    """Penalty-dependent caches for the LAD iteration.

    Holds the normal-equation solve operator ``(A'PA)^{-1} A'P``, the
    shrinkage threshold matrix ``1/(P_l rho_i)`` and the dual-residual
    scale ``P_l rho_i``. ``refresh`` is cheap when only ``rho`` changed,
    since ``rho`` sits outside the matrix inversion.
    """

    def __init__(self, a, state):
        self.a = a
        self.state = state
        self.stamp = None
        self._p_cached = None
        self.solve_op = None
        self.threshold = None
        self.scale = None
        self.refresh()

    def refresh(self):
        state = self.state
        if self.stamp == state.version:
            return
        if self._p_cached is None or not np.array_equal(self._p_cached, state.p_diag):
            at_p = self.a.T * state.p_diag
            factorization = spd_factorize(colwise_matmul(at_p, self.a))
            self.solve_op = spd_solve(factorization, at_p)
            self._p_cached = state.p_diag.copy()
        self.threshold = np.outer(1.0 / state.p_diag, 1.0 / state.rho)
        self.scale = np.outer(state.p_diag, state.rho)
        self.stamp = state.version

    def require_current(self):
        if self.stamp != self.state.version:
            raise RuntimeError(
                "workspace caches are stale; refresh() must run after any "
                "penalty update"
            )


def lad_x_update(ws, h, z, d):
    """Weighted least-squares step ``X = (A'PA)^{-1} A'P (H + Z - D)``."""
    ws.require_current()
    return colwise_matmul(ws.solve_op, h + z - d)


def lad_z_update(ws, ax, h, d):
    """Shrinkage step ``Z = soft(AX - H + D, 1/(P rho))``."""
    ws.require_current()
    if not ax.shape == h.shape == d.shape:
        raise ValueError(
            f"shape mismatch: AX {ax.shape}, H {h.shape}, D {d.shape}"
        )
    return soft_threshold(ax - h + d, ws.threshold)


def lad_dual_update(d, ax, z, h):
    """Dual ascent on the constraint ``AX - Z = H``."""
    if not d.shape == ax.shape == z.shape == h.shape:
        raise ValueError(
            f"shape mismatch: D {d.shape}, AX {ax.shape}, Z {z.shape}, H {h.shape}"
        )
    return d + (ax - z - h)


def _dual_norm(a, scale, dz):
    return float(np.linalg.norm(colwise_matmul(a.T, scale * dz)))


def solve_lad(prob, cfg=None, init=None, callback=None):
    """Run the batch LAD solver.

    Parameters
    ----------
    prob : ProblemLad
        Problem data (design matrix and batch of right-hand sides).
    cfg : SolverConfig, optional
        Tolerance, iteration budget, penalty seeding and balancing.
    init : IterateState, optional
        Starting iterates; when omitted, X starts at the weighted
        least-squares fit, Z at the shrunk initial residual, and D at the
        resulting constraint violation.
    callback : callable, optional
        Called as ``callback(k, IterateState)`` after each iteration. The
        arrays are fresh per iteration and safe to keep.

    Returns
    -------
    SolveReport
        Solution (the last X iterate), objective, residual histories,
        penalty trace and termination reason.

    Raises
    ------
    NotPositiveDefiniteError
        If ``A' P A`` cannot be factorized, e.g. when A is column-rank
        deficient.
    """
    if cfg is None:
        cfg = SolverConfig()
    a, h = prob.a, prob.h
    m, n, n_cols = prob.shape
    state = make_penalty_state(m, n_cols, p0=cfg.p0, rho0=cfg.rho0)
    ws = LadWorkspace(a, state)
    geom = ConstraintGeometry.neg_identity((a * a).sum(axis=1))

    if init is None:
        x = colwise_matmul(ws.solve_op, h)
        ax = colwise_matmul(a, x)
        z = soft_threshold(ax - h, ws.threshold)
        d = ax - z - h
        z_prev = z
    else:
        x = np.array(init.x, dtype=float)
        z = np.array(init.z, dtype=float)
        d = np.array(init.d, dtype=float)
        z_prev = np.array(init.z_prev, dtype=float)
        check_shape(x, "init.x", (n, n_cols))
        for name, arr in (("init.z", z), ("init.d", d), ("init.z_prev", z_prev)):
            check_shape(arr, name, (m, n_cols))
        ax = colwise_matmul(a, x)

    primal_history = [float(np.linalg.norm(ax - z - h))]
    dual_history = [_dual_norm(a, ws.scale, z - z_prev)]
    trace = [PenaltySnapshot(0, state.rho.copy(), state.p_diag.copy())]

    eps = n_cols * n * cfg.eps_tol
    balance_cfg = cfg.effective_balance(eps)
    guard = None
    if balance_cfg is not None and cfg.lock_on_reversal:
        guard = ReversalLock(state.rho, state.p_diag)
    r_norm = s_norm = math.inf
    k = 0
    while k < cfg.max_iter and (r_norm > eps or s_norm > eps):
        x = lad_x_update(ws, h, z, d)
        ax = colwise_matmul(a, x)
        z_prev = z
        z = lad_z_update(ws, ax, h, d)
        d = lad_dual_update(d, ax, z, h)
        r_mat = ax - z - h
        dz = z - z_prev
        r_norm = float(np.linalg.norm(r_mat))
        s_norm = _dual_norm(a, ws.scale, dz)
        primal_history.append(r_norm)
        dual_history.append(s_norm)
        if cfg.balance_due(k):
            before = state.version
            rho_before = state.rho
            p_before = state.p_diag
            balance_all(state, r_mat, dz, geom, balance_cfg)
            if guard is not None:
                guard.apply(state, rho_before, p_before)
            if state.version != before:
                ws.refresh()
                if not (np.array_equal(state.rho, rho_before)
                        and np.array_equal(state.p_diag, p_before)):
                    trace.append(
                        PenaltySnapshot(k + 1, state.rho.copy(), state.p_diag.copy())
                    )
        if callback is not None:
            callback(k, IterateState(x=x, z=z, d=d, z_prev=z_prev))
        k += 1

    converged = r_norm <= eps and s_norm <= eps
    return SolveReport(
        solution=x,
        objective=float(np.abs(h - ax).sum()),
        iterations=k,
        converged=converged,
        termination=CONVERGED if converged else MAX_ITERATIONS,
        primal_history=np.asarray(primal_history),
        dual_history=np.asarray(dual_history),
        rho_final=state.rho.copy(),
        p_final=state.p_diag.copy(),
        penalty_trace=trace,
    )
