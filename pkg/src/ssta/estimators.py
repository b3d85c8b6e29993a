"""Estimator-style wrappers so the fitting pieces compose with sklearn.

``CombDecomposer`` is a fixed-basis density fitter (fit on sample points
and density values, predict densities); ``GakedaAnalyzer`` wraps the
graph propagation with get_params/set_params for parameter sweeps.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.exceptions import NotFittedError
from sklearn.utils import check_array, column_or_1d

from .gmm import (
    CombConfig,
    assemble_lp,
    build_comb,
    decompose_least_squares,
    mixture_pdf,
    _mixture_from_weights,
)
from .simplex import lp_solve
from .timing_graph import TimingGraph, gakeda_run


class CombDecomposer(BaseEstimator):
    """Fit a Gaussian comb to density samples.

    Parameters
    ----------
    m : number of comb components.
    width_factor : shared component sigma as a multiple of the spacing.
    objective : "linf" (minimax LP) or "ls" (nonnegative least squares).

    Attributes (after fit)
    ----------------------
    mixture_ : the normalized GaussianMixture.
    weights_ : raw (pre-normalization) component weights.
    residual_ : LP optimum t* or the 2-norm residual, per objective.
    """

    def __init__(self, m: int = 32, width_factor: float = 1.0, objective: str = "linf"):
        self.m = m
        self.width_factor = width_factor
        self.objective = objective

    def fit(self, X, y):
        X = check_array(X, ensure_2d=False, dtype=float)
        x = column_or_1d(X)
        y = column_or_1d(check_array(y, ensure_2d=False, dtype=float))
        if x.shape != y.shape:
            raise ValueError("X and y must have matching lengths")
        if self.objective not in ("linf", "ls"):
            raise ValueError(f"unknown objective {self.objective!r}")
        cfg = CombConfig(
            m=self.m,
            support=(float(x.min()), float(x.max())),
            width_factor=self.width_factor,
        )
        comb = build_comb(cfg)
        if self.objective == "linf":
            solution = lp_solve(assemble_lp(x, np.maximum(y, 0.0), comb))
            self.weights_ = solution.x[:-1]
            self.residual_ = float(solution.x[-1])
            self.mixture_ = _mixture_from_weights(self.weights_, comb)
        else:
            self.mixture_, self.residual_ = decompose_least_squares(x, y, comb)
            self.weights_ = self.mixture_.weights
        self.comb_ = comb
        return self

    def predict(self, X):
        """Evaluate the fitted mixture density at the given points."""
        if not hasattr(self, "mixture_"):
            raise NotFittedError("CombDecomposer is not fitted")
        x = column_or_1d(check_array(X, ensure_2d=False, dtype=float))
        return mixture_pdf(x, self.mixture_)


class GakedaAnalyzer(BaseEstimator):
    """Graph-level delay propagation with estimator ergonomics."""

    def __init__(
        self,
        comb_size: int = 32,
        width_factor: float = 1.0,
        n_samples: int | None = None,
        weak_corr: bool = False,
        max_workers: int = 1,
    ):
        self.comb_size = comb_size
        self.width_factor = width_factor
        self.n_samples = n_samples
        self.weak_corr = weak_corr
        self.max_workers = max_workers

    def fit(self, graph: TimingGraph, y=None):
        if not isinstance(graph, TimingGraph):
            raise TypeError("GakedaAnalyzer.fit expects a TimingGraph")
        self.result_ = gakeda_run(
            graph,
            comb_size=self.comb_size,
            width_factor=self.width_factor,
            n_samples=self.n_samples,
            weak_corr=self.weak_corr,
            max_workers=self.max_workers,
        )
        self.sink_moments_ = {sid: self.result_.moments[sid] for sid in graph.sinks}
        return self

    def predict(self, node_ids=None):
        """Mean arrival time per node id (default: all visited nodes)."""
        if not hasattr(self, "result_"):
            raise NotFittedError("GakedaAnalyzer is not fitted")
        if node_ids is None:
            node_ids = self.result_.visit_order
        return np.array([self.result_.moments[n]["mean"] for n in node_ids])
