"""scikit-learn compatible wrappers around the functional API."""

from dataclasses import replace

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from .pipeline import (
    ReductionConfig,
    difference_range,
    measure_distortion,
    reduce_lp,
)
from .snowflake import audit_snowflake, build_snowflake_map, eval_snowflake
from .sparsifier import RANK_TOL, bss_sparsify
from .utils.validation import check_exponent, check_matrix


class SnowflakeEmbedding(TransformerMixin, BaseEstimator):
    """Coordinate-wise helix lift of points in ``l_p^m`` into ``l_2^(m*s)``.

    ``fit`` sizes the helix on the range of coordinate differences seen in
    ``X`` (or ``u_range``); ``transform`` returns blocks of ``s`` helix
    coordinates per input coordinate, so that squared Euclidean distances
    approximate ``l_p`` distances raised to the ``p``.
    """

    def __init__(self, p=1.0, eps=0.1, u_range=None):
        self.p = p
        self.eps = eps
        self.u_range = u_range

    def fit(self, X, y=None):
        X = check_matrix(X)
        p = check_exponent(self.p)
        if self.u_range is not None:
            u_min, u_max = self.u_range
        else:
            found = difference_range(X)
            if found is None:
                raise ValueError("all points are identical; no range to fit")
            u_min, u_max = found
            if u_min == u_max:
                u_min, u_max = u_min / 2.0, u_max * 2.0
        self.map_ = build_snowflake_map(p / 2.0, self.eps, u_min, u_max)
        self.audit_ = audit_snowflake(self.map_)
        self.n_features_in_ = X.shape[1]
        return self

    def transform(self, X):
        check_is_fitted(self, "map_")
        X = check_matrix(X)
        lifted = eval_snowflake(self.map_, X)
        return lifted.reshape(X.shape[0], -1)


class SpectralSparsifier(BaseEstimator):
    """Barrier-method reweighting of the rows of ``V``.

    After ``fit``, ``weights_`` has one entry per row and
    ``sum_i weights_[i] v_i v_i^T`` sandwiches ``V^T V`` within
    ``kappa_**(+-1/2)``.
    """

    def __init__(self, d=4.0, rank_tol=RANK_TOL):
        self.d = d
        self.rank_tol = rank_tol

    def fit(self, V, y=None):
        self.result_ = bss_sparsify(V, self.d, rank_tol=self.rank_tol)
        self.weights_ = self.result_.weights
        self.support_ = self.result_.support
        self.kappa_ = self.result_.kappa
        self.rank_ = self.result_.rank_used
        return self

    def transform(self, V):
        """Rows on the support scaled by ``sqrt(weight)``; their Gram is the sparsified sum."""
        check_is_fitted(self, "result_")
        V = check_matrix(V, "vectors")
        return V[self.support_] * np.sqrt(self.weights_[self.support_])[:, None]

    def fit_transform(self, V, y=None):
        return self.fit(V).transform(V)


class LpReducer(TransformerMixin, BaseEstimator):
    """Reduce points in ``l_p^m`` to ``n`` weighted coordinates.

    Parameters
    ----------
    p : float
        Exponent in (0, 2).
    eps_total : float, optional
        Overall budget; overrides ``eps_snow`` and ``d_bss`` when set.
    eps_snow, d_bss : float
        Helix accuracy and sparsifier oversampling.
    normalization : {"balanced", "certified", "none"}
    u_range : (float, float), optional
        Explicit difference range instead of the one found in the data.

    Attributes
    ----------
    result_ : ReducedPointSet
    support_ : ndarray
        Selected coordinate indices (0-based).
    weights_ : ndarray
        Normalized coordinate weights on ``support_``.
    """

    def __init__(self, p=1.0, eps_total=None, eps_snow=0.1, d_bss=9.0,
                 normalization="balanced", u_range=None):
        self.p = p
        self.eps_total = eps_total
        self.eps_snow = eps_snow
        self.d_bss = d_bss
        self.normalization = normalization
        self.u_range = u_range

    def _config(self):
        if self.eps_total is not None:
            return ReductionConfig(eps_total=self.eps_total, normalization=self.normalization,
                                   u_range=self.u_range)
        return ReductionConfig(eps_snow=self.eps_snow, d_bss=self.d_bss,
                               normalization=self.normalization, u_range=self.u_range)

    def fit(self, X, y=None):
        X = check_matrix(X)
        self.result_ = reduce_lp(X, self.p, self._config())
        self.support_ = self.result_.sigma
        self.weights_ = self.result_.effective_weights
        self.n_components_ = self.result_.n
        self.certified_factor_ = self.result_.certified_factor
        self.n_features_in_ = X.shape[1]
        return self

    def transform(self, X):
        check_is_fitted(self, "result_")
        X = check_matrix(X)
        if X.shape[1] != self.n_features_in_:
            raise ValueError(
                f"X has {X.shape[1]} features, but LpReducer was fitted with {self.n_features_in_}"
            )
        return self.result_.transform(X)

    def fit_transform(self, X, y=None):
        self.fit(X)
        return self.result_.points

    def distortion(self, X):
        """Pairwise audit of ``transform(X)`` against ``X``."""
        check_is_fitted(self, "result_")
        X = check_matrix(X)
        reduced = self.result_
        probe = replace(reduced, points=self.transform(X))
        return measure_distortion(X, probe)
