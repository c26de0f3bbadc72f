"""Batch L1 solvers built on ADMM with diagonally weighted augmented terms.

Three problems share the machinery: least absolute deviation, constrained
basis pursuit, and their combination (sparse LAD with lower bounds), each
solved for a batch of right-hand-side columns at once. A residual-balancing
heuristic adapts one penalty weight per constraint row and one scalar per
column; an independent simplex oracle cross-checks the optima.
"""

from .balancing import (
    BalanceConfig,
    ConstraintGeometry,
    PenaltyState,
    ResidualMagnitudes,
    apply_balance_rule,
    balance_all,
    make_penalty_state,
    residual_magnitudes,
)
from .cbp import (
    CbpProjectors,
    ProblemCbp,
    cbp_dual_update,
    cbp_objective,
    cbp_x_update,
    cbp_z_update,
    solve_cbp,
)
from .common import (
    CONVERGED,
    MAX_ITERATIONS,
    IterateState,
    PenaltySnapshot,
    SolveReport,
    SolverConfig,
)
from .cslad import (
    ProblemCslad,
    cslad_objective,
    cslad_to_cbp,
    solve_cslad,
)
from .estimators import ConstrainedBasisPursuit, LADRegression, SparseLADRegression
from .io import MatrixFormatError, read_matrix, write_matrix
from .lad import (
    LadWorkspace,
    ProblemLad,
    lad_dual_update,
    lad_objective,
    lad_x_update,
    lad_z_update,
    solve_lad,
)
from .linalg import (
    NotPositiveDefiniteError,
    SpdFactorization,
    colwise_matmul,
    soft_threshold,
    spd_factorize,
    spd_solve,
)
from .lp import (
    INFEASIBLE,
    OPTIMAL,
    UNBOUNDED,
    LpReduction,
    LpSolution,
    StandardLp,
    cbp_as_lp,
    lad_as_lp,
    oracle_objective,
    simplex_solve,
)

__version__ = "0.1.0"

__all__ = [
    "BalanceConfig",
    "CONVERGED",
    "CbpProjectors",
    "ConstrainedBasisPursuit",
    "ConstraintGeometry",
    "INFEASIBLE",
    "IterateState",
    "LADRegression",
    "LadWorkspace",
    "LpReduction",
    "LpSolution",
    "MAX_ITERATIONS",
    "MatrixFormatError",
    "NotPositiveDefiniteError",
    "OPTIMAL",
    "PenaltySnapshot",
    "PenaltyState",
    "ProblemCbp",
    "ProblemCslad",
    "ProblemLad",
    "ResidualMagnitudes",
    "SolveReport",
    "SolverConfig",
    "SparseLADRegression",
    "SpdFactorization",
    "StandardLp",
    "UNBOUNDED",
    "apply_balance_rule",
    "balance_all",
    "cbp_as_lp",
    "cbp_dual_update",
    "cbp_objective",
    "cbp_x_update",
    "cbp_z_update",
    "colwise_matmul",
    "cslad_objective",
    "cslad_to_cbp",
    "lad_as_lp",
    "lad_dual_update",
    "lad_objective",
    "lad_x_update",
    "lad_z_update",
    "make_penalty_state",
    "oracle_objective",
    "read_matrix",
    "residual_magnitudes",
    "simplex_solve",
    "soft_threshold",
    "solve_cbp",
    "solve_cslad",
    "solve_lad",
    "spd_factorize",
    "spd_solve",
    "write_matrix",
]
