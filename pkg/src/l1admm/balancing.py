"""Penalty state for the diagonally weighted augmented term (one weight per
constraint row plus one scalar per problem column) and the residual-balancing
rules that adapt it during a solve.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .validation import check_shape


@dataclass
class BalanceConfig:
    """Hyperparameters of the residual-balancing heuristic.

    ``tau`` is the multiplicative step applied to a penalty entry whenever
    one residual magnitude exceeds ``mu`` times the other. ``mu = inf``
    keeps the bookkeeping but never changes anything. Updated entries are
    clamped to ``[clamp_lo, clamp_hi]`` so the cached factorizations stay
    well conditioned. When both magnitudes of an entry are at or below
    ``dead_zone`` the entry is left alone (at exactly (0, 0) both trigger
    conditions would otherwise fire at once).
    """

    tau: float = 10.0
    mu: float = 2.0
    clamp_lo: float = 1e-6
    clamp_hi: float = 1e6
    cadence: int = 10
    dead_zone: float = 1e-12

    def __post_init__(self):
        if not self.tau > 1:
            raise ValueError("tau must be > 1")
        if not self.mu > 1:
            raise ValueError("mu must be > 1")
        if not (0 < self.clamp_lo <= 1 <= self.clamp_hi):
            raise ValueError("clamps must satisfy 0 < clamp_lo <= 1 <= clamp_hi")
        if self.cadence < 1:
            raise ValueError("cadence must be >= 1")
        if self.dead_zone < 0:
            raise ValueError("dead_zone must be >= 0")


@dataclass
class PenaltyState:
    """Diagonal penalty weights ``p_diag`` (one per constraint row) and
    per-column scalars ``rho``. ``version`` increments on every change so
    solver caches know when to refresh.
    """

    p_diag: np.ndarray
    rho: np.ndarray
    version: int = 0

    def __post_init__(self):
        self.p_diag = np.asarray(self.p_diag, dtype=float)
        self.rho = np.asarray(self.rho, dtype=float)
        for name, arr in (("p_diag", self.p_diag), ("rho", self.rho)):
            if arr.ndim != 1 or arr.size == 0:
                raise ValueError(f"{name} must be a nonempty 1-D array")
            if not np.isfinite(arr).all() or np.any(arr <= 0):
                raise ValueError(f"{name} entries must be finite and positive")


def make_penalty_state(n_rows, n_cols, p0=1.0, rho0=1.0):
    """Build a PenaltyState from scalar or per-entry initial values."""
    p = np.broadcast_to(np.asarray(p0, dtype=float), (n_rows,)).copy()
    rho = np.broadcast_to(np.asarray(rho0, dtype=float), (n_cols,)).copy()
    return PenaltyState(p_diag=p, rho=rho)


@dataclass(frozen=True)
class ConstraintGeometry:
    """Row data of the constraint pair (A, B) entering the balance formulas.

    ``row_weight_a[l]`` is the sum of squared entries of the l-th row of A.
    ``b_rowsq`` holds the squared entries of B's rows; ``None`` means
    B = -I (the form both bundled solvers use), which requires the number
    of constraint rows to equal the split-variable dimension.
    """

    row_weight_a: np.ndarray
    b_rowsq: np.ndarray | None = None

    def __post_init__(self):
        object.__setattr__(
            self, "row_weight_a", np.asarray(self.row_weight_a, dtype=float)
        )
        if self.row_weight_a.ndim != 1 or np.any(self.row_weight_a < 0):
            raise ValueError("row_weight_a must be a 1-D nonnegative array")
        if self.b_rowsq is not None:
            b = np.asarray(self.b_rowsq, dtype=float)
            if b.ndim != 2 or b.shape[0] != self.row_weight_a.shape[0]:
                raise ValueError(
                    f"b_rowsq must have {self.row_weight_a.shape[0]} rows, "
                    f"got shape {b.shape}"
                )
            if np.any(b < 0):
                raise ValueError("b_rowsq entries must be nonnegative")
            object.__setattr__(self, "b_rowsq", b)

    @classmethod
    def neg_identity(cls, row_weight_a):
        return cls(row_weight_a=row_weight_a, b_rowsq=None)

    @classmethod
    def from_matrices(cls, a, b):
        a = np.asarray(a, dtype=float)
        b = np.asarray(b, dtype=float)
        return cls(row_weight_a=(a * a).sum(axis=1), b_rowsq=b * b)


@dataclass(frozen=True)
class ResidualMagnitudes:
    """Per-column (r_rho, s_rho) and per-row (r_p, s_p) residual magnitudes."""

    r_rho: np.ndarray
    s_rho: np.ndarray
    r_p: np.ndarray
    s_p: np.ndarray


def _squared_inner(dz, geom):
    # inner[l, i] = |b^l|^2 . |dz_i|^2; with B = -I this collapses to dz^2
    dzsq = dz * dz
    if geom.b_rowsq is None:
        return dzsq
    return geom.b_rowsq @ dzsq


def _dual_p_magnitude(inner, rho, p_diag, row_weight_a):
    return p_diag * np.sqrt(row_weight_a * (inner @ (rho * rho)))


def residual_magnitudes(r_mat, dz, geom, state):
    """Evaluate the four residual-magnitude families from the current state.

    ``r_mat`` is the primal residual matrix (one constraint row per line),
    ``dz`` the change of the split variable over the last iteration. The
    dual magnitudes scale linearly in the corresponding penalty entry.
    """
    r_mat = np.asarray(r_mat, dtype=float)
    dz = np.asarray(dz, dtype=float)
    p = state.p_diag.shape[0]
    n_cols = state.rho.shape[0]
    check_shape(r_mat, "primal residual", (p, n_cols))
    if dz.ndim != 2 or dz.shape[1] != n_cols:
        raise ValueError(
            f"dz must have shape (*, {n_cols}), got {dz.shape}"
        )
    if geom.b_rowsq is None:
        if dz.shape[0] != p:
            raise ValueError(
                f"with B = -I the split dimension must equal the number of "
                f"constraint rows {p}, got dz shape {dz.shape}"
            )
    elif geom.b_rowsq.shape[1] != dz.shape[0]:
        raise ValueError(
            f"b_rowsq shape {geom.b_rowsq.shape} does not match dz shape {dz.shape}"
        )
    check_shape(geom.row_weight_a, "row_weight_a", (p,))

    inner = _squared_inner(dz, geom)
    psq_w = state.p_diag * state.p_diag * geom.row_weight_a
    return ResidualMagnitudes(
        r_rho=np.sqrt((r_mat * r_mat).sum(axis=0)),
        s_rho=state.rho * np.sqrt(psq_w @ inner),
        r_p=np.sqrt((r_mat * r_mat).sum(axis=1)),
        s_p=_dual_p_magnitude(inner, state.rho, state.p_diag, geom.row_weight_a),
    )


def _apply_rule(values, r, s, cfg):
    values = np.asarray(values, dtype=float)
    r = np.asarray(r, dtype=float)
    s = np.asarray(s, dtype=float)
    # mu = inf with a zero residual yields inf * 0 = nan; comparisons with
    # nan are False, which matches the "leave it alone" branch.
    with np.errstate(invalid="ignore"):
        grow = r >= cfg.mu * s
        shrink = ~grow & (s >= cfg.mu * r)
    asleep = (r <= cfg.dead_zone) & (s <= cfg.dead_zone)
    out = np.where(
        grow & ~asleep,
        values * cfg.tau,
        np.where(shrink & ~asleep, values / cfg.tau, values),
    )
    return np.clip(out, cfg.clamp_lo, cfg.clamp_hi)


def apply_balance_rule(value, r, s, cfg):
    """Rebalance one penalty entry against its residual magnitudes.

    Multiplies by ``cfg.tau`` when the primal magnitude ``r`` is at least
    ``cfg.mu`` times the dual magnitude ``s``, divides in the mirrored case,
    and otherwise leaves the value alone; the result is clamped to the
    configured bounds.
    """
    if not value > 0:
        raise ValueError("value must be positive")
    return float(_apply_rule(np.asarray([value]), [r], [s], cfg)[0])


class ReversalLock:
    """Anti-cycling guard for repeated balancing passes.

    With a fixed multiplicative step, an entry whose adjustment direction
    keeps reversing cannot bracket its balance point; further +-tau moves
    only oscillate between the same values (and, on degenerate problems,
    lock the iterates into a limit cycle). One direction change is allowed,
    since the magnitudes right after initialization are noisy and a single
    correction is common; an entry that reverses a second time is deemed
    un-balanceable, reverted to its seed value, and pinned for the rest of
    the solve. Entries marching monotonically (the ones compensating a
    genuinely ill-scaled problem) are never touched.
    """

    def __init__(self, rho_seed, p_seed, allowed_reversals=1):
        self.allowed_reversals = allowed_reversals
        self._seed_rho = np.array(rho_seed, dtype=float)
        self._seed_p = np.array(p_seed, dtype=float)
        self._dir_p = np.zeros(self._seed_p.shape, dtype=np.int8)
        self._dir_rho = np.zeros(self._seed_rho.shape, dtype=np.int8)
        self._rev_p = np.zeros(self._seed_p.shape, dtype=np.int16)
        self._rev_rho = np.zeros(self._seed_rho.shape, dtype=np.int16)
        self._locked_p = np.zeros(self._seed_p.shape, dtype=bool)
        self._locked_rho = np.zeros(self._seed_rho.shape, dtype=bool)

    def _filter(self, before, after, seed, direction, reversals, locked):
        new_dir = np.sign(after - before).astype(np.int8)
        moved = new_dir != 0
        reversing = moved & (direction != 0) & (new_dir != direction)
        reversals[reversing] += 1
        lock_now = reversing & ~locked & (reversals > self.allowed_reversals)
        result = np.where(locked & moved, before, after)
        result = np.where(lock_now, seed, result)
        locked |= lock_now
        accepted = moved & ~locked
        direction[accepted] = new_dir[accepted]
        return result

    def apply(self, state, rho_before, p_before):
        """Filter the moves made by the last balance pass, in place."""
        state.rho = self._filter(
            rho_before, state.rho, self._seed_rho,
            self._dir_rho, self._rev_rho, self._locked_rho,
        )
        state.p_diag = self._filter(
            p_before, state.p_diag, self._seed_p,
            self._dir_p, self._rev_p, self._locked_p,
        )
        return state


def balance_all(state, r_mat, dz, geom, cfg):
    """Run one two-stage balancing pass, mutating ``state`` in place.

    The per-column scalars are updated first; the per-row dual magnitudes
    are then recomputed with the updated scalars before the row weights are
    updated. ``state.version`` increments only if some entry changed.
    """
    mags = residual_magnitudes(r_mat, dz, geom, state)
    rho_new = _apply_rule(state.rho, mags.r_rho, mags.s_rho, cfg)
    s_p = _dual_p_magnitude(_squared_inner(np.asarray(dz, dtype=float), geom),
                            rho_new, state.p_diag, geom.row_weight_a)
    p_new = _apply_rule(state.p_diag, mags.r_p, s_p, cfg)
    if not (np.array_equal(rho_new, state.rho) and np.array_equal(p_new, state.p_diag)):
        state.rho = rho_new
        state.p_diag = p_new
        state.version += 1
    return state
