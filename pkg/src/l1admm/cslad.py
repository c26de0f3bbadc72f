"""Constrained sparse least-absolute-deviation solver.

Minimizes ``||H - G X||_{1,1} + ||Lambda . X||_{1,1}`` subject to
``X >= Gamma``. Stacking the fit residual as extra variables turns this
into a constrained basis pursuit problem over ``[X; R]`` with the block
design ``[G | I]``, unit weights and no bounds on the residual block, so
the basis-pursuit solver does the work.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass

import numpy as np

from .cbp import ProblemCbp, solve_cbp
from .validation import as_float_matrix, check_same_rows, expand_columns


@dataclass
class ProblemCslad:
    """Data of ``min ||h - G x||_1 + ||lam . x||_1 s.t. x >= gamma``.

    ``lam``/``gamma`` broadcast like the basis-pursuit weights; ``gamma``
    entries may be ``-inf``. No rank condition on G is needed because the
    stacked design ``[G | I]`` always has full row rank.
    """

    g: np.ndarray
    h: np.ndarray
    lam: object = 0.0
    gamma: object = -np.inf

    def __post_init__(self):
        self.g = as_float_matrix(self.g, "G")
        self.h = as_float_matrix(self.h, "H")
        check_same_rows("G", self.g, "H", self.h)
        n = self.g.shape[1]
        n_cols = self.h.shape[1]
        self.lam = expand_columns(self.lam, n, n_cols, "Lambda")
        if np.any(self.lam < 0):
            raise ValueError("Lambda weights must be nonnegative")
        self.gamma = expand_columns(self.gamma, n, n_cols, "Gamma",
                                    allow_neg_inf=True)

    @property
    def shape(self):
        m, n = self.g.shape
        return m, n, self.h.shape[1]


def cslad_objective(prob, x):
    """Direct objective ``||H - G X||_{1,1} + ||Lambda . X||_{1,1}``."""
    return float(
        np.abs(prob.h - prob.g @ x).sum() + np.abs(prob.lam * x).sum()
    )


def cslad_to_cbp(prob):
    """Stack the residual block: variables ``[X; R]`` with ``R = H - G X``.

    The converted problem uses design ``[G | I_m]``, weight 1 and bound
    ``-inf`` on every residual row; those values define the reduction and
    are not configurable.
    """
    m, n, n_cols = prob.shape
    g_hat = np.hstack([prob.g, np.eye(m)])
    c1_hat = np.vstack([prob.lam, np.ones((m, n_cols))])
    c2_hat = np.vstack([prob.gamma, np.full((m, n_cols), -np.inf)])
    return ProblemCbp(g=g_hat, h=prob.h, c1=c1_hat, c2=c2_hat)


def solve_cslad(prob, cfg=None, callback=None):
    """Solve via the basis-pursuit reduction.

    Returns a :class:`SolveReport` whose ``solution`` is the top block
    (the coefficients) and whose ``residual`` field carries the bottom
    block (the fitted residuals); the objective is re-evaluated in the
    original variables.
    """
    report = solve_cbp(cslad_to_cbp(prob), cfg, callback=callback)
    n = prob.g.shape[1]
    x = report.solution[:n]
    resid = report.solution[n:]
    objective = float(np.abs(resid).sum() + np.abs(prob.lam * x).sum())
    return dataclasses.replace(
        report, solution=x, residual=resid, objective=objective
    )
