"""Estimator-style wrappers around the two choice models.

Both classes follow the fit/predict convention: hyperparameters in
__init__, learned state in trailing-underscore attributes, numeric
(n_samples, 1) feature matrices holding the announced disturbance
level, and binary labels where 1 means the compensating action.

Single-class targets are accepted (an all-compensate participant is a
meaningful dataset here, and the intercept cap exists exactly for that
case), so ``classes_`` is always [0, 1] regardless of which labels
appear in y.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, ClassifierMixin
from sklearn.utils.validation import check_array, check_is_fitted, check_X_y

from .actions import PayoffSpec
from .bayes import blr_map, blr_posterior
from .fitting import fit_cpt
from .likelihood import ChoiceDataset, ChoiceLevel
from .models import blr_choice_prob, cpt_choice_prob


def _levels_from_xy(X, y) -> ChoiceDataset:
    levels = []
    for p_r in np.unique(X[:, 0]):
        mask = X[:, 0] == p_r
        n2 = int(y[mask].sum())
        levels.append(ChoiceLevel(float(p_r), int(mask.sum()) - n2, n2))
    return ChoiceDataset(tuple(levels))


def _validate_choice_xy(X, y):
    X, y = check_X_y(X, y, ensure_2d=True, dtype=float)
    if X.shape[1] != 1:
        raise ValueError(f"expected a single level column, got {X.shape[1]} features")
    if np.any((X[:, 0] < 0) | (X[:, 0] > 1)):
        raise ValueError("levels must lie in [0, 1]")
    y = np.asarray(y)
    if not np.all(np.isin(y, (0, 1))):
        raise ValueError("labels must be binary: 0 relax, 1 compensate")
    return X, y.astype(int)


class CptChoiceModel(ClassifierMixin, BaseEstimator):
    """Weighted-utility choice model as a binary classifier.

    fit() runs the multi-start bounded maximum-likelihood fit on the
    per-level action counts; predict_proba() evaluates the fitted
    choice curve.
    """

    def __init__(self, n_starts: int = 16, random_state: int = 0,
                 max_iter: int = 500, reward: float = 1.0, loss: float = 1.0):
        self.n_starts = n_starts
        self.random_state = random_state
        self.max_iter = max_iter
        self.reward = reward
        self.loss = loss

    def fit(self, X, y):
        X, y = _validate_choice_xy(X, y)
        payoff = PayoffSpec(reward=self.reward, loss=self.loss)
        self.result_ = fit_cpt(_levels_from_xy(X, y), payoff=payoff,
                               n_starts=self.n_starts, seed=self.random_state,
                               max_iter=self.max_iter)
        self.params_ = self.result_.params
        self.payoff_ = payoff
        self.classes_ = np.array([0, 1])
        self.n_features_in_ = 1
        return self

    def predict_proba(self, X):
        check_is_fitted(self, "params_")
        X = check_array(X, ensure_2d=True, dtype=float)
        if X.shape[1] != 1:
            raise ValueError(f"expected a single level column, got {X.shape[1]} features")
        p2 = np.asarray(cpt_choice_prob(X[:, 0], self.params_, self.payoff_))
        p2 = np.atleast_1d(p2)
        return np.column_stack([1.0 - p2, p2])

    def predict(self, X):
        return (self.predict_proba(X)[:, 1] >= 0.5).astype(int)


class BayesianLogisticChoice(ClassifierMixin, BaseEstimator):
    """Capped-intercept Bayesian logistic choice curve.

    fit() computes the penalized MAP estimate; with posterior=True it
    also samples the posterior and stores the summary.
    """

    def __init__(self, prior_sd: float = 5.0, posterior: bool = False,
                 chains: int = 4, warmup: int = 500, samples: int = 1000,
                 random_state: int = 0):
        self.prior_sd = prior_sd
        self.posterior = posterior
        self.chains = chains
        self.warmup = warmup
        self.samples = samples
        self.random_state = random_state

    def fit(self, X, y):
        X, y = _validate_choice_xy(X, y)
        dataset = _levels_from_xy(X, y)
        self.map_params_ = blr_map(dataset, prior_sd=self.prior_sd)
        self.posterior_ = None
        if self.posterior:
            self.posterior_ = blr_posterior(
                dataset, prior_sd=self.prior_sd, chains=self.chains,
                warmup=self.warmup, samples=self.samples,
                seed=self.random_state)
        self.classes_ = np.array([0, 1])
        self.n_features_in_ = 1
        return self

    def predict_proba(self, X):
        check_is_fitted(self, "map_params_")
        X = check_array(X, ensure_2d=True, dtype=float)
        if X.shape[1] != 1:
            raise ValueError(f"expected a single level column, got {X.shape[1]} features")
        p2 = np.atleast_1d(np.asarray(blr_choice_prob(X[:, 0], self.map_params_)))
        return np.column_stack([1.0 - p2, p2])

    def predict(self, X):
        return (self.predict_proba(X)[:, 1] >= 0.5).astype(int)
