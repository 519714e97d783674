"""End-to-end reduction of ``k`` points in ``l_p^m`` to weighted coordinates.

Every coordinate is lifted through a snowflake helix with exponent ``p / 2``,
which turns ``|a - b|**p`` into a squared Euclidean distance. Slot ``l`` of the
helix, read across all ``m`` coordinates, gives one vector per point. The
``s`` spans of those vectors are then preserved simultaneously by a sparse
coordinate weighting, and the same weights reduce the original points:
``w_u(i) = s_i**(1/p) * z_u(i)`` for ``i`` in ``sigma``.

Pre-normalization, every pairwise ratio of ``p``-th powers lies in
``[1/F, F]`` with ``F = (1 + eps_snow)**4 * kappa**0.5``.
"""

from dataclasses import dataclass, field
import math
import time

import numpy as np

from .exceptions import ValidationError
from .snowflake import build_snowflake_map, eval_snowflake
from .sparsifier import RANK_TOL, d_for_eps
from .subspace import (
    BASIS_TOL,
    CoordinateSelection,
    orthonormal_basis,
    simultaneous_sparsify,
    verify_selection,
)
from .utils.validation import check_exponent, check_oversampling, check_points, check_real

NORMALIZATIONS = ("balanced", "certified", "none")


@dataclass
class ReductionConfig:
    """Error budget and knobs for :func:`reduce_lp`.

    Give either ``eps_total`` (the budget is split so the certified distance
    distortion per side is ``1 + eps_total``) or ``eps_snow`` and ``d_bss``
    directly. With neither, ``eps_snow=0.1`` and ``d_bss=9`` are used.
    """

    eps_total: float = None
    eps_snow: float = None
    d_bss: float = None
    normalization: str = "balanced"
    u_range: tuple = None
    rank_tol: float = RANK_TOL
    basis_tol: float = BASIS_TOL

    def resolved(self, p):
        """Return ``(eps_snow, d_bss)`` for exponent ``p``."""
        if self.normalization not in NORMALIZATIONS:
            raise ValidationError(
                f"normalization must be one of {NORMALIZATIONS}, got {self.normalization!r}"
            )
        if self.eps_total is not None:
            if self.eps_snow is not None or self.d_bss is not None:
                raise ValidationError("give either eps_total or (eps_snow, d_bss), not both")
            eps_total = check_real(self.eps_total, "eps_total", low=0.0)
            eps = (1.0 + eps_total) ** (p / 6.0) - 1.0
            return eps, d_for_eps(min(eps, 1.0))
        eps_snow = 0.1 if self.eps_snow is None else check_real(self.eps_snow, "eps_snow", low=0.0)
        d_bss = 9.0 if self.d_bss is None else check_oversampling(self.d_bss)
        return eps_snow, d_bss

    def as_dict(self):
        return {
            "eps_total": self.eps_total,
            "eps_snow": self.eps_snow,
            "d_bss": self.d_bss,
            "normalization": self.normalization,
            "u_range": list(self.u_range) if self.u_range is not None else None,
            "rank_tol": self.rank_tol,
            "basis_tol": self.basis_tol,
        }


@dataclass
class ReducedPointSet:
    """Output of :func:`reduce_lp`.

    ``weights`` are the raw sparsifier weights on ``sigma``;
    ``normalization_scale`` multiplies them (it acts on ``p``-th powers) to
    give the reduced points.
    """

    p: float
    sigma: np.ndarray
    weights: np.ndarray
    normalization_scale: float
    points: np.ndarray
    certified_factor: float
    kappa: float
    eps_snow: float
    d_bss: float
    subspace_dims: list
    snowflake: object = None
    degenerate: bool = False
    per_subspace_bounds: list = field(default_factory=list, repr=False)
    timings: dict = field(default_factory=dict, repr=False)

    @property
    def n(self):
        return int(self.sigma.shape[0])

    @property
    def effective_weights(self):
        return self.weights * self.normalization_scale

    def transform(self, X):
        """Apply the same weighted coordinate restriction to other points."""
        X = np.asarray(X, dtype=np.float64)
        return X[:, self.sigma] * self.effective_weights ** (1.0 / self.p)

    def to_dict(self):
        return {
            "schema_version": 1,
            "p": self.p,
            "n": self.n,
            "sigma": [int(i) for i in self.sigma],
            "weights": [float(w) for w in self.weights],
            "normalization_scale": self.normalization_scale,
            "certified_factor": self.certified_factor,
            "kappa": self.kappa,
            "eps_snow": self.eps_snow,
            "d_bss": self.d_bss,
            "subspace_dims": [int(k) for k in self.subspace_dims],
            "degenerate": self.degenerate,
            "snowflake": self.snowflake.summary() if self.snowflake is not None else None,
            "points": self.points.tolist(),
        }


@dataclass
class DistortionReport:
    """Brute-force audit over all pairs of distinct input points.

    Ratios compare reduced to original distances; ``pth_*`` fields compare
    ``p``-th powers, which is where the certificate lives.
    """

    min_ratio: float
    max_ratio: float
    argmin_pair: tuple
    argmax_pair: tuple
    pth_min_ratio: float
    pth_max_ratio: float
    certified_factor: float
    certified_ratio_bound: float
    n_pairs: int
    n_duplicate_pairs: int
    n_violations: int

    @property
    def spread(self):
        return self.max_ratio / self.min_ratio

    def as_dict(self):
        return {
            "min_ratio": self.min_ratio,
            "max_ratio": self.max_ratio,
            "argmin_pair": list(self.argmin_pair),
            "argmax_pair": list(self.argmax_pair),
            "pth_min_ratio": self.pth_min_ratio,
            "pth_max_ratio": self.pth_max_ratio,
            "spread": self.spread,
            "certified_factor": self.certified_factor,
            "certified_ratio_bound": self.certified_ratio_bound,
            "n_pairs": self.n_pairs,
            "n_duplicate_pairs": self.n_duplicate_pairs,
            "n_violations": self.n_violations,
        }


def pairwise_pth_powers(X, p):
    """Matrix of ``sum_i |x_u(i) - x_v(i)|**p`` over all pairs of rows."""
    k = X.shape[0]
    out = np.zeros((k, k))
    for u in range(k - 1):
        out[u, u + 1:] = np.sum(np.abs(X[u + 1:] - X[u]) ** p, axis=1)
    return out + out.T


def difference_range(X):
    """Smallest and largest nonzero ``|z_u(i) - z_v(i)|`` over pairs and coordinates.

    Returns ``None`` when every coordinate is constant across the points.
    """
    S = np.sort(X, axis=0)
    span = S[-1] - S[0]
    u_max = float(span.max()) if span.size else 0.0
    if u_max == 0.0:
        return None
    gaps = np.diff(S, axis=0)
    u_min = float(gaps[gaps > 0].min())
    return u_min, u_max


def certified_factor(eps_snow, kappa):
    """Two-sided bound ``F = (1 + eps_snow)**4 * kappa**0.5`` on ``p``-th-power ratios."""
    return (1.0 + eps_snow) ** 4 * math.sqrt(kappa)


def lift_blocks(smap, X):
    """Per-slot spanning sets: array of shape ``(s, k, m)``.

    Entry ``[l, j, i]`` is slot ``l`` of ``phi(z_j(i) - a_i) - phi(0)`` where
    ``a_i`` is the column minimum. The shift keeps constant columns exactly
    zero and leaves every chord ``phi(z_u(i)) - phi(z_v(i))`` the same length.
    """
    Z = X - X.min(axis=0)
    lifted = eval_snowflake(smap, Z) - eval_snowflake(smap, 0.0)
    return np.moveaxis(lifted, -1, 0)


def _degenerate(X, p, eps_snow, d_bss):
    k, _ = X.shape
    return ReducedPointSet(
        p=p,
        sigma=np.array([0], dtype=np.intp),
        weights=np.ones(1),
        normalization_scale=1.0,
        points=np.zeros((k, 1)),
        certified_factor=1.0,
        kappa=1.0,
        eps_snow=eps_snow,
        d_bss=d_bss,
        subspace_dims=[],
        degenerate=True,
    )


def reduce_lp(X, p, config=None):
    """Reduce the rows of ``X`` (points in ``l_p^m``) to weighted coordinates.

    Parameters
    ----------
    X : array of shape (k, m)
    p : float in (0, 2)
    config : ReductionConfig, optional

    Returns
    -------
    ReducedPointSet
    """
    X, p = check_points(X, p)
    config = config or ReductionConfig()
    eps_snow, d_bss = config.resolved(p)
    timings = {}

    found = difference_range(X)
    if found is None:
        return _degenerate(X, p, eps_snow, d_bss)
    if config.u_range is not None:
        u_min, u_max = (float(v) for v in config.u_range)
        if not (u_min <= found[0] and found[1] <= u_max):
            raise ValidationError(
                f"explicit range [{u_min}, {u_max}] does not cover the data differences "
                f"[{found[0]}, {found[1]}]"
            )
    else:
        u_min, u_max = found
    if u_min == u_max:
        # a single distinct difference; any range containing it works
        u_min, u_max = u_min / 2.0, u_max * 2.0

    tic = time.perf_counter()
    smap = build_snowflake_map(p / 2.0, eps_snow, u_min, u_max)
    timings["snowflake"] = time.perf_counter() - tic

    tic = time.perf_counter()
    blocks = lift_blocks(smap, X)
    bases = []
    for span in blocks:
        if np.any(span != 0.0):
            bases.append(orthonormal_basis(span, config.basis_tol))
    timings["basis"] = time.perf_counter() - tic

    tic = time.perf_counter()
    selection = simultaneous_sparsify(None, d_bss, rank_tol=config.rank_tol, bases=bases)
    timings["sparsify"] = time.perf_counter() - tic

    F = certified_factor(eps_snow, selection.kappa)
    sigma = selection.sigma
    weights = selection.weights
    if config.normalization == "balanced":
        raw = pairwise_pth_powers(X[:, sigma] * weights ** (1.0 / p), p)
        orig = pairwise_pth_powers(X, p)
        mask = orig > 0
        ratios = raw[mask] / orig[mask]
        scale = 1.0 / math.sqrt(ratios.min() * ratios.max())
    elif config.normalization == "certified":
        scale = F
    else:
        scale = 1.0
    points = X[:, sigma] * (weights * scale) ** (1.0 / p)

    return ReducedPointSet(
        p=p,
        sigma=sigma,
        weights=weights,
        normalization_scale=float(scale),
        points=points,
        certified_factor=F,
        kappa=selection.kappa,
        eps_snow=eps_snow,
        d_bss=d_bss,
        subspace_dims=selection.dims,
        snowflake=smap,
        per_subspace_bounds=selection.per_subspace_bounds,
        timings=timings,
    )


def verify_reduction_bases(X, reduced, basis_tol=BASIS_TOL):
    """Rebuild the slot subspaces of ``X`` and check them against ``reduced``'s raw weights."""
    blocks = lift_blocks(reduced.snowflake, X)
    bases = [orthonormal_basis(b, basis_tol) for b in blocks if np.any(b != 0.0)]
    selection = CoordinateSelection(
        sigma=reduced.sigma, weights=reduced.weights, per_subspace_bounds=[],
        kappa=reduced.kappa, dims=[B.shape[1] for B in bases], m=X.shape[1],
    )
    return verify_selection(bases, selection)


def measure_distortion(X, reduced, p=None):
    """Exhaustive pairwise comparison of ``X`` with ``reduced.points``.

    Pairs of identical input points are excluded from the ratios and counted;
    such a pair mapped to distinct reduced points counts as a violation.
    """
    X = np.asarray(X, dtype=np.float64)
    p = reduced.p if p is None else check_exponent(p)
    if p != reduced.p:
        raise ValidationError(f"p={p} does not match the reduction's p={reduced.p}")
    W = reduced.points
    if X.shape[0] != W.shape[0]:
        raise ValidationError(f"point counts differ: {X.shape[0]} vs {W.shape[0]}")
    k = X.shape[0]
    orig = pairwise_pth_powers(X, p)
    red = pairwise_pth_powers(W, p)
    iu, ju = np.triu_indices(k, 1)
    o = orig[iu, ju]
    r = red[iu, ju]
    dup = o == 0.0
    n_dup = int(dup.sum())
    n_viol = int(np.sum(dup & (r != 0.0)))
    F = reduced.certified_factor
    if not np.any(~dup):
        return DistortionReport(1.0, 1.0, (-1, -1), (-1, -1), 1.0, 1.0, F, F ** (1.0 / p),
                                0, n_dup, n_viol)
    live = ~dup
    pth = r[live] / o[live]
    imin = int(np.argmin(pth))
    imax = int(np.argmax(pth))
    pairs = np.column_stack([iu[live], ju[live]])
    return DistortionReport(
        min_ratio=float(pth[imin] ** (1.0 / p)),
        max_ratio=float(pth[imax] ** (1.0 / p)),
        argmin_pair=(int(pairs[imin, 0]), int(pairs[imin, 1])),
        argmax_pair=(int(pairs[imax, 0]), int(pairs[imax, 1])),
        pth_min_ratio=float(pth[imin]),
        pth_max_ratio=float(pth[imax]),
        certified_factor=F,
        certified_ratio_bound=F ** (1.0 / p),
        n_pairs=int(live.sum()),
        n_duplicate_pairs=n_dup,
        n_violations=n_viol,
    )


@dataclass
class PredictedSize:
    n_bound: int
    k: int
    s: int
    d_bss: float
    asymptotic_shape: float

    def as_dict(self):
        return {"n_bound": self.n_bound, "k": self.k, "s": self.s, "d_bss": self.d_bss,
                "asymptotic_shape": self.asymptotic_shape}


def construction_bound(k, s, d_bss):
    """``ceil(d_bss * k * s)``: coordinates the construction may keep."""
    return math.ceil(d_bss * k * s)


def predicted_n(k, p, config=None, range_ratio=1e4):
    """Concrete size bound for ``k`` points whose differences span ``range_ratio``.

    The helix dimension only depends on the ratio ``u_max / u_min``, so it is
    built on ``[1, range_ratio]``. ``asymptotic_shape`` is ``k / eps**(2 + 2/p)``
    for comparison; its constant factor is unknown.
    """
    if isinstance(k, bool) or not isinstance(k, (int, np.integer)) or k < 1:
        raise ValidationError(f"k must be a positive integer, got {k!r}")
    p = check_exponent(p)
    range_ratio = check_real(range_ratio, "range_ratio", low=1.0)
    config = config or ReductionConfig()
    eps_snow, d_bss = config.resolved(p)
    smap = build_snowflake_map(p / 2.0, eps_snow, 1.0, range_ratio)
    eps = config.eps_total if config.eps_total is not None else eps_snow
    return PredictedSize(
        n_bound=construction_bound(int(k), smap.dim, d_bss),
        k=int(k),
        s=smap.dim,
        d_bss=d_bss,
        asymptotic_shape=k / eps ** (2.0 + 2.0 / p),
    )
