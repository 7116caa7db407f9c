"""scikit-learn style front end to the gradient MaxSAT search."""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_is_fitted

from .encoding import build_incidence
from .engine import SolveConfig, portfolio_solve
from .formula import evaluate, preprocess
from .validation import bits_to_literals, check_formula, check_positive_int


class GradientMaxSAT(BaseEstimator):
    """Approximate unweighted MaxSAT by Adam descent on a tanh relaxation.

    ``fit`` takes the formula (a :class:`~gradsat.formula.Formula`, a DIMACS
    path or text, or a list of clauses) and runs the anytime search. After
    fitting, ``assignment_`` holds the best Boolean assignment found and
    ``cost_`` the number of clauses it falsifies.

    Parameters
    ----------
    time_limit : float
        Wall-clock budget in seconds.
    max_iter : int or None
        Optional cap on loop iterations.
    learning_rate, beta1, beta2, epsilon : float
        Adam settings.
    random_state : int
        Seed of the random initialization; worker ``w`` of a portfolio uses
        ``random_state + w``.
    target_cost : int or None
        Stop as soon as an assignment at or below this cost is found.
    restart_after : int or None
        Re-randomize after this many iterations without improvement.
    n_jobs : int
        Number of independent searches run in parallel processes.
    dtype : {"float64", "float32"}
    """

    def __init__(self, time_limit=60.0, max_iter=None, learning_rate=1e-4, beta1=0.9,
                 beta2=0.999, epsilon=1e-8, random_state=0, target_cost=None,
                 restart_after=None, n_jobs=1, dtype="float64"):
        self.time_limit = time_limit
        self.max_iter = max_iter
        self.learning_rate = learning_rate
        self.beta1 = beta1
        self.beta2 = beta2
        self.epsilon = epsilon
        self.random_state = random_state
        self.target_cost = target_cost
        self.restart_after = restart_after
        self.n_jobs = n_jobs
        self.dtype = dtype

    def _config(self) -> SolveConfig:
        return SolveConfig(
            time_limit=self.time_limit,
            max_iters=self.max_iter,
            learning_rate=self.learning_rate,
            adam_beta1=self.beta1,
            adam_beta2=self.beta2,
            adam_eps=self.epsilon,
            seed=0 if self.random_state is None else int(self.random_state),
            target_cost=self.target_cost,
            restart_after=self.restart_after,
            dtype=self.dtype,
        )

    def fit(self, X, y=None, callback=None):
        formula = check_formula(X)
        cfg = self._config()
        n_jobs = check_positive_int(self.n_jobs, "n_jobs")
        cf = preprocess(formula)
        W = build_incidence(cf, np.dtype(cfg.dtype))
        report = portfolio_solve(cf, W, cfg, n_jobs, callback)

        self.formula_ = formula
        self.report_ = report
        self.assignment_ = report.best_assignment
        self.cost_ = report.best_cost
        self.n_iter_ = report.iterations
        self.trace_ = list(report.trace)
        self.n_features_in_ = formula.num_vars
        return self

    def predict(self, X=None):
        """The fitted Boolean assignment; ``X``, if given, must have the same variable count."""
        check_is_fitted(self, "assignment_")
        if X is not None:
            f = check_formula(X)
            if f.num_vars != self.n_features_in_:
                raise ValueError(
                    f"formula has {f.num_vars} variables, solver was fitted on {self.n_features_in_}"
                )
        return self.assignment_.copy()

    def fit_predict(self, X, y=None):
        return self.fit(X).predict()

    def score(self, X, y=None):
        """Negated cost of the fitted assignment on ``X`` (higher is better)."""
        check_is_fitted(self, "assignment_")
        return -evaluate(check_formula(X), self.assignment_)

    def literals(self) -> list[int]:
        """The fitted assignment as signed DIMACS literals."""
        check_is_fitted(self, "assignment_")
        return bits_to_literals(self.assignment_)
