"""Shared solver plumbing: configuration, iterate container, and reports."""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass, field

import numpy as np

from .balancing import BalanceConfig

CONVERGED = "converged"
MAX_ITERATIONS = "max_iterations"


@dataclass
class SolverConfig:
    """Iteration budget, tolerance, penalty seeding, and balancing.

    ``eps_tol`` is scaled by problem size inside each solver (N*n for the
    LAD solver, N*m for the basis-pursuit solver) to form the stopping
    threshold applied to both residual norms. ``balance=None`` disables
    penalty adaptation entirely; otherwise adaptation stops after
    ``freeze_balance_after`` iterations (default ``max_iter // 2``) so the
    final phase runs with fixed penalties. ``rho0``/``p0`` seed the penalty
    state (scalars, or per-column / per-row arrays).

    ``lock_on_reversal`` enables the anti-cycling guard: a penalty entry
    whose adjustment direction reverses more than once stops adapting (see
    :class:`l1admm.balancing.ReversalLock`). Without it, the aggressive
    default step (tau=10 triggered at mu=2) sustains limit cycles on many
    problems and the solve only finishes after the balance freeze.

    ``paper_prox_order`` switches the bound-constrained shrinkage to
    clamp-then-shrink for replication studies; it can violate the lower
    bounds, so the default keeps the exact proximal step.
    """

    eps_tol: float = 1e-8
    max_iter: int = 20000
    balance: BalanceConfig | None = field(default_factory=BalanceConfig)
    freeze_balance_after: int | None = None
    rho0: float | np.ndarray = 1.0
    p0: float | np.ndarray = 1.0
    lock_on_reversal: bool = True
    paper_prox_order: bool = False

    def __post_init__(self):
        if not self.eps_tol > 0:
            raise ValueError("eps_tol must be positive")
        if self.max_iter < 1:
            raise ValueError("max_iter must be >= 1")
        if self.freeze_balance_after is not None and self.freeze_balance_after < 0:
            raise ValueError("freeze_balance_after must be >= 0")

    def balance_due(self, k):
        """Whether iteration ``k`` (0-based) ends with a balancing pass."""
        if self.balance is None:
            return False
        freeze = self.freeze_balance_after
        if freeze is None:
            freeze = self.max_iter // 2
        if k >= freeze:
            return False
        return k % self.balance.cadence == 0 or k == 1

    def effective_balance(self, eps):
        """Balance config with the dead zone widened to the stopping scale.

        Entries whose primal and dual magnitudes are both below the solver's
        residual threshold have converged at that granularity; adjusting
        them only chases roundoff (a magnitude of exactly 0 against one of
        1e-8 would otherwise look like an infinite imbalance and drive the
        penalty to its clamp).
        """
        if self.balance is None:
            return None
        if self.balance.dead_zone >= eps:
            return self.balance
        return dataclasses.replace(self.balance, dead_zone=eps)


@dataclass
class IterateState:
    """One ADMM iterate: primal block ``x``, split variable ``z``, scaled
    multipliers ``d``, and the previous ``z`` (needed for the dual residual).
    """

    x: np.ndarray
    z: np.ndarray
    d: np.ndarray
    z_prev: np.ndarray


@dataclass(frozen=True)
class PenaltySnapshot:
    """Penalty values in effect from iteration ``iteration`` onward."""

    iteration: int
    rho: np.ndarray
    p_diag: np.ndarray


@dataclass
class SolveReport:
    """Outcome of a batch solve.

    ``primal_history``/``dual_history`` have one entry per iteration plus a
    leading entry for the initial iterates (the initial dual entry measures
    the distance from ``z_prev``, which is 0 for the default start).
    ``penalty_trace`` records the penalty values at start and after every
    balancing change. ``residual`` is populated only by the sparse-LAD
    wrapper, which reports the fitted residual block alongside the solution.
    """

    solution: np.ndarray
    objective: float
    iterations: int
    converged: bool
    termination: str
    primal_history: np.ndarray
    dual_history: np.ndarray
    rho_final: np.ndarray
    p_final: np.ndarray
    penalty_trace: list[PenaltySnapshot]
    residual: np.ndarray | None = None
