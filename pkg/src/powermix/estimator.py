"""scikit-learn compatible wrappers.

Feature matrices use the dataset CSV layout: for ``n`` phases, columns
``a1..an`` (fractions) followed by ``s1..sn`` (phase values), one mixture per
row. Both estimators therefore drop straight into pipelines and
``GridSearchCV``.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, RegressorMixin, TransformerMixin
from sklearn.utils.validation import check_array, check_is_fitted, check_X_y

from .base import Composition
from .errors import InvalidComposition
from .fitting import DEFAULT_BRACKET, Sample, fit_p_global
from .mean_core import power_mean


def _split_features(X):
    """Validate a fractions+values matrix and split it into its two halves."""
    if X.shape[1] < 2 or X.shape[1] % 2:
        raise ValueError(f"expected 2n columns (fractions then values), got {X.shape[1]}")
    n = X.shape[1] // 2
    comps, vals = X[:, :n], X[:, n:]
    if np.any(comps < 0) or np.any(vals < 0):
        raise ValueError("fractions and phase values must be nonnegative")
    if np.any(np.abs(comps.sum(axis=1) - 1.0) > 1e-9):
        raise InvalidComposition("every row's fractions must sum to 1")
    return comps, vals


def _mix_rows(p, X):
    comps, vals = _split_features(X)
    return np.array([power_mean(p, Composition(c), v).value for c, v in zip(comps, vals)])


class PowerMeanRegressor(RegressorMixin, BaseEstimator):
    """Fit the exponent of a power-mean mixing law by least squares.

    Parameters
    ----------
    bracket : tuple of float, default=(-64, 64)
        Search interval for the exponent.

    Attributes
    ----------
    p_ : float
        Estimated exponent.
    rss_ : float
        Residual sum of squares at ``p_``.
    n_iter_ : int
        Refinement iterations after the initial grid scan.
    n_phases_ : int
    """

    def __init__(self, bracket=DEFAULT_BRACKET):
        self.bracket = bracket

    def fit(self, X, y):
        X, y = check_X_y(X, y, dtype=np.float64)
        comps, vals = _split_features(X)
        samples = [Sample(c, v, m) for c, v, m in zip(comps, vals, y)]
        report = fit_p_global(samples, bracket=self.bracket)
        self.p_ = report.p_hat
        self.rss_ = report.rss
        self.n_iter_ = report.iterations
        self.n_phases_ = comps.shape[1]
        self.n_features_in_ = X.shape[1]
        return self

    def predict(self, X):
        check_is_fitted(self, "p_")
        X = check_array(X, dtype=np.float64)
        if X.shape[1] != self.n_features_in_:
            raise ValueError(f"X has {X.shape[1]} features, expected {self.n_features_in_}")
        return _mix_rows(self.p_, X)


class PowerMeanMixer(TransformerMixin, BaseEstimator):
    """Stateless transformer mapping each row to its mixture value.

    ``p=0`` is the geometric mean and ``p=inf``/``-inf`` the max/min limits.
    """

    def __init__(self, p=1.0):
        self.p = p

    def fit(self, X, y=None):
        X = check_array(X, dtype=np.float64)
        _split_features(X)
        self.n_features_in_ = X.shape[1]
        return self

    def transform(self, X):
        check_is_fitted(self, "n_features_in_")
        X = check_array(X, dtype=np.float64)
        return _mix_rows(self.p, X).reshape(-1, 1)
