"""Scikit-learn style wrappers around the box-counting fit."""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_is_fitted

from ._validation import check_points
from .dimest import count_scales, fit_dimension


class BoxCountingDimension(BaseEstimator):
    """Box-counting dimension of a sampled graph.

    Parameters
    ----------
    scales : sequence of float
        Cell widths ``delta`` in ``(0, 1)``; at least three.
    mode : {"euclidean", "parabolic"}
        Square cells, or ``delta x delta^hurst`` cells.
    hurst : float
        Height exponent for the parabolic mode.
    connect : bool
        Count cells met by the piecewise-linear interpolant of the samples
        rather than cells holding a sample.

    Attributes
    ----------
    dimension_ : float
    stderr_ : float
    r2_ : float
    intercept_ : float
    counts_ : ndarray of int
    report_ : DimReport

    Examples
    --------
    >>> t = np.linspace(0, 1, 4097)
    >>> est = BoxCountingDimension(scales=[2**-k for k in range(3, 9)])
    >>> round(est.fit(np.column_stack([t, t])).dimension_, 6)
    1.0
    """

    def __init__(self, scales=(2**-3, 2**-4, 2**-5, 2**-6, 2**-7), mode="euclidean",
                 hurst=0.5, connect=True):
        self.scales = scales
        self.mode = mode
        self.hurst = hurst
        self.connect = connect

    def fit(self, X, y=None):
        X = check_points(X)
        sc = count_scales(X, list(self.scales), self.hurst, self.mode, self.connect)
        report = fit_dimension(sc)
        self.report_ = report
        self.dimension_ = report.estimate
        self.stderr_ = report.stderr
        self.r2_ = report.r_squared
        self.intercept_ = report.intercept
        self.counts_ = sc.counts
        self.n_features_in_ = 2
        return self

    def predict(self, deltas):
        """Counts implied by the fitted power law at the given scales."""
        check_is_fitted(self, "dimension_")
        deltas = np.asarray(deltas, dtype=float)
        return np.exp(self.intercept_) * deltas ** (-self.dimension_)

    def score(self, X, y=None):
        """R^2 of the log-log fit on ``X``."""
        return self.fit(X).r2_
