"""Batch constrained basis pursuit solver.

Minimizes ``||C1 . X||_{1,1}`` subject to ``G X = H`` and ``X >= C2``
(columnwise), via ADMM on the split ``X - Z = 0``. The x-step is an affine
projection weighted by the diagonal penalty; the z-step is an exact
bound-constrained shrinkage.
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
from .validation import as_float_matrix, check_same_rows, check_shape, expand_columns


@dataclass
class ProblemCbp:
    """Data of ``min ||c1 . x||_1 s.t. G x = h, x >= c2`` per column of H.

    ``c1``/``c2`` accept scalars, per-row vectors, or full matrices matching
    the solution shape; ``c2`` entries may be ``-inf`` to leave a coordinate
    unbounded below. ``G`` must have full row rank. The defaults give plain
    basis pursuit with nonnegative coefficients.
    """

    g: np.ndarray
    h: np.ndarray
    c1: object = 1.0
    c2: object = 0.0

    def __post_init__(self):
        self.g = as_float_matrix(self.g, "G")
        self.h = as_float_matrix(self.h, "H")
        check_same_rows("G", self.g, "H", self.h)
        n = self.g.shape[1]
        n_cols = self.h.shape[1]
        self.c1 = expand_columns(self.c1, n, n_cols, "C1")
        if np.any(self.c1 < 0):
            raise ValueError("C1 weights must be nonnegative")
        self.c2 = expand_columns(self.c2, n, n_cols, "C2", allow_neg_inf=True)

    @property
    def shape(self):
        m, n = self.g.shape
        return m, n, self.h.shape[1]


def cbp_objective(c1, x):
    """Weighted L1 value ``||C1 . X||_{1,1}``."""
    return float(np.abs(c1 * x).sum())


class CbpProjectors:
    """Penalty-dependent caches for the basis-pursuit iteration.

    ``null_proj`` annihilates G (the P-weighted projector onto the
    nullspace of G), ``feasible_point`` satisfies ``G @ feasible_point = H``
    and is reused as the default starting iterate, ``threshold`` is
    ``C1_{l,i} / (P_l rho_i)``. A rho-only change refreshes just the
    threshold and scale since rho sits outside the matrix inversion.
    """

    def __init__(self, g, h, c1, state):
        self.g = g
        self.h = h
        self.c1 = c1
        self.state = state
        self.stamp = None
        self._p_cached = None
        self.null_proj = None
        self.feasible_point = None
        self.threshold = None
        self.scale = None
        self.refresh()

    def refresh(self):
        state = self.state
        if self.stamp == state.version:
            return
        if self._p_cached is None or not np.array_equal(self._p_cached, state.p_diag):
            n = self.g.shape[1]
            pinv_gt = self.g.T / state.p_diag[:, None]
            factorization = spd_factorize(colwise_matmul(self.g, pinv_gt))
            self.null_proj = np.eye(n) - colwise_matmul(
                pinv_gt, spd_solve(factorization, self.g)
            )
            self.feasible_point = colwise_matmul(
                pinv_gt, spd_solve(factorization, self.h)
            )
            self._p_cached = state.p_diag.copy()
        self.threshold = self.c1 * np.outer(1.0 / state.p_diag, 1.0 / state.rho)
        self.scale = np.outer(state.p_diag, state.rho)
        self.stamp = state.version

    def require_current(self):
        if self.stamp != self.state.version:
            raise RuntimeError(
                "projector caches are stale; refresh() must run after any "
                "penalty update"
            )


def cbp_x_update(proj, z, d):
    """Affine projection step ``X = null_proj (Z - D) + feasible_point``."""
    proj.require_current()
    return colwise_matmul(proj.null_proj, z - d) + proj.feasible_point


def cbp_z_update(proj, x, d, c2, paper_order=False):
    """Bound-constrained shrinkage ``Z = max(soft(X + D, T), C2)``.

    The default is the exact proximal step of the weighted L1 norm plus the
    bound indicator, so the output always satisfies ``Z >= C2``. With
    ``paper_order`` the clamp is applied before the shrinkage instead,
    which can land below positive bounds.
    """
    proj.require_current()
    if not x.shape == d.shape == c2.shape:
        raise ValueError(
            f"shape mismatch: X {x.shape}, D {d.shape}, C2 {c2.shape}"
        )
    v = x + d
    if paper_order:
        return soft_threshold(np.maximum(v, c2), proj.threshold)
    return np.maximum(soft_threshold(v, proj.threshold), c2)


def cbp_dual_update(d, x, z):
    """Dual ascent on the split constraint ``X - Z = 0``."""
    if not d.shape == x.shape == z.shape:
        raise ValueError(f"shape mismatch: D {d.shape}, X {x.shape}, Z {z.shape}")
    return d + (x - z)


def solve_cbp(prob, cfg=None, init=None, callback=None):
    """Run the batch constrained basis pursuit solver.

    Parameters
    ----------
    prob : ProblemCbp
    cfg : SolverConfig, optional
    init : IterateState, optional
        Starting iterates; by default X starts at the penalty-weighted
        feasible point, Z at its bound-constrained shrinkage, and
        D = X - Z.
    callback : callable, optional
        Called as ``callback(k, IterateState)`` after each iteration.

    Returns
    -------
    SolveReport
        The reported solution is the final Z iterate, which satisfies the
        bounds by construction.

    Raises
    ------
    NotPositiveDefiniteError
        If ``G P^{-1} G'`` cannot be factorized, e.g. when G is
        row-rank deficient.
    """
    if cfg is None:
        cfg = SolverConfig()
    m, n, n_cols = prob.shape
    state = make_penalty_state(n, n_cols, p0=cfg.p0, rho0=cfg.rho0)
    proj = CbpProjectors(prob.g, prob.h, prob.c1, state)
    geom = ConstraintGeometry.neg_identity(np.ones(n))

    if init is None:
        x = proj.feasible_point.copy()
        z = cbp_z_update(proj, x, np.zeros_like(x), prob.c2,
                         paper_order=cfg.paper_prox_order)
        d = x - z
        z_prev = z
    else:
        x = np.array(init.x, dtype=float)
        z = np.array(init.z, dtype=float)
        d = np.array(init.d, dtype=float)
        z_prev = np.array(init.z_prev, dtype=float)
        for name, arr in (("init.x", x), ("init.z", z), ("init.d", d),
                          ("init.z_prev", z_prev)):
            check_shape(arr, name, (n, n_cols))

    primal_history = [float(np.linalg.norm(x - z))]
    dual_history = [float(np.linalg.norm(proj.scale * (z - z_prev)))]
    trace = [PenaltySnapshot(0, state.rho.copy(), state.p_diag.copy())]

    eps = n_cols * m * cfg.eps_tol
    balance_cfg = cfg.effective_balance(eps)
    guard = None
    if balance_cfg is not None and cfg.lock_on_reversal:
        guard = ReversalLock(state.rho, state.p_diag)
    r_norm = s_norm = math.inf
    k = 0
    while k < cfg.max_iter and (r_norm > eps or s_norm > eps):
        x = cbp_x_update(proj, z, d)
        z_prev = z
        z = cbp_z_update(proj, x, d, prob.c2, paper_order=cfg.paper_prox_order)
        d = cbp_dual_update(d, x, z)
        r_mat = x - z
        dz = z - z_prev
        r_norm = float(np.linalg.norm(r_mat))
        s_norm = float(np.linalg.norm(proj.scale * dz))
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
                proj.refresh()
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
        solution=z,
        objective=cbp_objective(prob.c1, z),
        iterations=k,
        converged=converged,
        termination=CONVERGED if converged else MAX_ITERATIONS,
        primal_history=np.asarray(primal_history),
        dual_history=np.asarray(dual_history),
        rho_final=state.rho.copy(),
        p_final=state.p_diag.copy(),
        penalty_trace=trace,
    )
