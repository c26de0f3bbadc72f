"""scikit-learn estimators wrapping the batch solvers.

The estimators follow sklearn conventions (rows are samples, ``get_params``
round-trips, fitted attributes carry a trailing underscore) so the solvers
compose with pipelines and model selection. The functional API in
:mod:`l1admm.lad` / :mod:`l1admm.cbp` / :mod:`l1admm.cslad` remains the
way to get full solve reports and custom penalty setups.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, RegressorMixin, TransformerMixin
from sklearn.utils.validation import check_array, check_is_fitted, check_X_y

from .balancing import BalanceConfig
from .cbp import ProblemCbp, solve_cbp
from .common import SolverConfig
from .cslad import ProblemCslad, solve_cslad
from .lad import ProblemLad, solve_lad


def _solver_config(tol, max_iter, balance, tau, mu, balance_every):
    cfg = BalanceConfig(tau=tau, mu=mu, cadence=balance_every) if balance else None
    return SolverConfig(eps_tol=tol, max_iter=max_iter, balance=cfg)


class LADRegression(RegressorMixin, BaseEstimator):
    """Linear regression under the least-absolute-deviation loss.

    Fits ``min_w ||y - X w||_1`` (per target column for multi-output y),
    which is robust to outliers compared to the squared loss. With the
    default ``fit_intercept=False`` the model solves exactly that problem;
    enabling it augments X with a constant column.

    Attributes after fit: ``coef_``, ``intercept_``, ``n_iter_``,
    ``converged_`` and the full ``report_`` from the underlying solver.
    """

    def __init__(self, *, fit_intercept=False, tol=1e-8, max_iter=20000,
                 balance=True, tau=10.0, mu=2.0, balance_every=10):
        self.fit_intercept = fit_intercept
        self.tol = tol
        self.max_iter = max_iter
        self.balance = balance
        self.tau = tau
        self.mu = mu
        self.balance_every = balance_every

    def fit(self, X, y):
        X, y = check_X_y(X, y, y_numeric=True, multi_output=True)
        single_target = y.ndim == 1
        targets = y.reshape(-1, 1) if single_target else y
        design = X
        if self.fit_intercept:
            design = np.hstack([X, np.ones((X.shape[0], 1))])
        config = _solver_config(self.tol, self.max_iter, self.balance,
                                self.tau, self.mu, self.balance_every)
        report = solve_lad(ProblemLad(a=design, h=targets), config)
        weights = report.solution
        n_features = X.shape[1]
        if self.fit_intercept:
            intercept = weights[n_features]
            weights = weights[:n_features]
        else:
            intercept = np.zeros(targets.shape[1])
        self.coef_ = weights[:, 0] if single_target else weights.T
        self.intercept_ = float(intercept[0]) if single_target else intercept
        self.n_iter_ = report.iterations
        self.converged_ = report.converged
        self.report_ = report
        self.n_features_in_ = n_features
        return self

    def predict(self, X):
        check_is_fitted(self, "coef_")
        X = check_array(X)
        return X @ np.transpose(self.coef_) + self.intercept_


class ConstrainedBasisPursuit(TransformerMixin, BaseEstimator):
    """Sparse coder against a fixed dictionary, with lower-bounded codes.

    ``transform`` maps each sample (row of X) to the code minimizing
    ``||weights . code||_1`` subject to exact reconstruction
    ``code @ dictionary = sample`` and ``code >= lower_bound``. The
    dictionary has shape (n_components, n_features) and its atoms must
    span the feature space so exact reconstruction is feasible.
    ``lower_bound=None`` removes the bound; the default 0 gives
    nonnegative codes.
    """

    def __init__(self, dictionary=None, *, weights=1.0, lower_bound=0.0,
                 tol=1e-8, max_iter=20000, balance=True, tau=10.0, mu=2.0,
                 balance_every=10):
        self.dictionary = dictionary
        self.weights = weights
        self.lower_bound = lower_bound
        self.tol = tol
        self.max_iter = max_iter
        self.balance = balance
        self.tau = tau
        self.mu = mu
        self.balance_every = balance_every

    def fit(self, X=None, y=None):
        if self.dictionary is None:
            raise ValueError("a dictionary of shape (n_components, n_features) is required")
        self.dictionary_ = check_array(self.dictionary)
        self.n_features_in_ = self.dictionary_.shape[1]
        return self

    def transform(self, X):
        check_is_fitted(self, "dictionary_")
        X = check_array(X)
        if X.shape[1] != self.n_features_in_:
            raise ValueError(
                f"X has {X.shape[1]} features, dictionary has "
                f"{self.n_features_in_}"
            )
        bound = -np.inf if self.lower_bound is None else self.lower_bound
        problem = ProblemCbp(
            g=self.dictionary_.T,
            h=X.T,
            c1=self.weights,
            c2=bound,
        )
        config = _solver_config(self.tol, self.max_iter, self.balance,
                                self.tau, self.mu, self.balance_every)
        report = solve_cbp(problem, config)
        self.n_iter_ = report.iterations
        self.converged_ = report.converged
        return report.solution.T


class SparseLADRegression(RegressorMixin, BaseEstimator):
    """LAD regression with elementwise L1 coefficient penalties and optional
    coefficient lower bounds (e.g. nonnegativity).

    Fits ``min_w ||y - X w||_1 + ||penalty . w||_1`` subject to
    ``w >= lower_bound``. ``penalty`` is a scalar or per-feature array;
    ``lower_bound`` is None (unbounded), a scalar, or per-feature. An
    intercept, when requested, is neither penalized nor bounded.
    """

    def __init__(self, *, penalty=1.0, lower_bound=None, fit_intercept=False,
                 tol=1e-8, max_iter=20000, balance=True, tau=10.0, mu=2.0,
                 balance_every=10):
        self.penalty = penalty
        self.lower_bound = lower_bound
        self.fit_intercept = fit_intercept
        self.tol = tol
        self.max_iter = max_iter
        self.balance = balance
        self.tau = tau
        self.mu = mu
        self.balance_every = balance_every

    def fit(self, X, y):
        X, y = check_X_y(X, y, y_numeric=True, multi_output=True)
        single_target = y.ndim == 1
        targets = y.reshape(-1, 1) if single_target else y
        n_features = X.shape[1]

        lam = np.broadcast_to(np.asarray(self.penalty, dtype=float),
                              (n_features,)).copy()
        if self.lower_bound is None:
            gamma = np.full(n_features, -np.inf)
        else:
            gamma = np.broadcast_to(np.asarray(self.lower_bound, dtype=float),
                                    (n_features,)).copy()
        design = X
        if self.fit_intercept:
            design = np.hstack([X, np.ones((X.shape[0], 1))])
            lam = np.append(lam, 0.0)
            gamma = np.append(gamma, -np.inf)

        config = _solver_config(self.tol, self.max_iter, self.balance,
                                self.tau, self.mu, self.balance_every)
        report = solve_cslad(
            ProblemCslad(g=design, h=targets, lam=lam, gamma=gamma), config
        )
        weights = report.solution
        if self.fit_intercept:
            intercept = weights[n_features]
            weights = weights[:n_features]
        else:
            intercept = np.zeros(targets.shape[1])
        self.coef_ = weights[:, 0] if single_target else weights.T
        self.intercept_ = float(intercept[0]) if single_target else intercept
        self.n_iter_ = report.iterations
        self.converged_ = report.converged
        self.report_ = report
        self.n_features_in_ = n_features
        return self

    def predict(self, X):
        check_is_fitted(self, "coef_")
        X = check_array(X)
        return X @ np.transpose(self.coef_) + self.intercept_
