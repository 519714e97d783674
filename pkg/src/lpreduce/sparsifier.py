"""Deterministic barrier-potential spectral sparsification.

Given vectors ``v_1 .. v_m`` (rows of ``V``) with ``A = sum_i v_i v_i^T``, find
nonnegative weights ``s_i`` supported on at most ``ceil(d * rank(A))`` indices
such that ``A_s = sum_i s_i v_i v_i^T`` satisfies

    kappa**-0.5 * x^T A x <= x^T A_s x <= kappa**0.5 * x^T A x

on the range of ``A``, with ``kappa <= ((sqrt(d) + 1) / (sqrt(d) - 1))**2``.

The procedure whitens the vectors so that ``A`` becomes the identity, then adds
one rank-one term per step while an upper and a lower barrier move right. The
potentials ``tr(uI - M)^-1`` and ``tr(M - lI)^-1`` never increase, which keeps
every eigenvalue of the partial sum ``M`` strictly between the barriers.
"""

from dataclasses import dataclass, field
import math

import numpy as np

from .exceptions import SparsifierBreakdown, ValidationError
from .utils.validation import check_matrix, check_oversampling, check_real

RANK_TOL = 1e-10


@dataclass
class BarrierStep:
    step: int
    lower: float
    upper: float
    eig_min: float
    eig_max: float
    upper_potential: float
    lower_potential: float
    index: int
    increment: float


@dataclass
class SparseWeights:
    """Result of :func:`bss_sparsify`.

    ``weights`` has one entry per input vector and is exactly zero off
    ``support``. ``kappa = u_T / l_T`` certifies the sandwich; ``scale`` is the
    factor ``1 / sqrt(u_T * l_T)`` already folded into ``weights``.
    """

    weights: np.ndarray
    support: np.ndarray
    rank_used: int
    d_used: float
    kappa: float
    scale: float
    history: list = field(default_factory=list, repr=False)

    @property
    def lower_bound(self):
        return self.kappa**-0.5

    @property
    def upper_bound(self):
        return self.kappa**0.5

    def to_dict(self):
        return {
            "d": self.d_used,
            "rank": self.rank_used,
            "m": int(self.weights.shape[0]),
            "support": [
                {"index": int(i), "weight": float(self.weights[i])} for i in self.support
            ],
            "kappa": self.kappa,
            "scale": self.scale,
        }

    @classmethod
    def from_dict(cls, data):
        weights = np.zeros(int(data["m"]))
        for entry in data["support"]:
            weights[int(entry["index"])] = float(entry["weight"])
        support = np.array([int(e["index"]) for e in data["support"]], dtype=np.intp)
        return cls(
            weights=weights,
            support=np.sort(support),
            rank_used=int(data["rank"]),
            d_used=float(data["d"]),
            kappa=float(data["kappa"]),
            scale=float(data["scale"]),
        )


def kappa_bound(d):
    """Worst-case condition ratio ``((sqrt(d) + 1) / (sqrt(d) - 1))**2``."""
    sd = math.sqrt(d)
    return ((sd + 1.0) / (sd - 1.0)) ** 2


def d_for_eps(eps):
    """Smallest ``d`` whose sandwich sides ``kappa**(+-1/2)`` are within ``(1 + eps)**(+-2)``."""
    eps = check_real(eps, "eps", low=0.0, high=1.0, high_open=False)
    g = (1.0 + eps) ** 2
    return ((g + 1.0) / (g - 1.0)) ** 2


def whiten(V, rank_tol=RANK_TOL):
    """Map rows ``v_i`` to ``w_i = Lambda_r^-1/2 Q_r^T v_i`` so that ``sum w_i w_i^T = I_r``.

    Uses the eigendecomposition of ``V^T V`` or, when that is larger, of the
    Gram matrix ``V V^T`` (whose eigenvectors give the whitened rows directly).
    Rows that are exactly zero stay exactly zero.
    """
    m, k = V.shape
    if k <= m:
        evals, evecs = np.linalg.eigh(V.T @ V)
    else:
        evals, evecs = np.linalg.eigh(V @ V.T)
    top = evals[-1]
    if not top > 0:
        raise ValidationError("the vector family is identically zero")
    keep = evals > rank_tol * top
    evals = evals[keep]
    evecs = evecs[:, keep]
    if k <= m:
        W = (V @ evecs) / np.sqrt(evals)
    else:
        W = evecs.copy()
    W[~np.any(V != 0.0, axis=1)] = 0.0
    return W


def bss_sparsify(V, d, *, rank_tol=RANK_TOL, record_history=False):
    """Sparsify the outer-product sum of the rows of ``V`` with oversampling ``d``.

    Parameters
    ----------
    V : array of shape (m, k)
        One vector per row.
    d : float
        Oversampling parameter, ``d > 1``. At most ``ceil(d * r)`` weights are
        nonzero where ``r`` is the numerical rank of ``V``.
    rank_tol : float
        Eigenvalues of ``A`` below ``rank_tol * lambda_max`` are discarded.
    record_history : bool
        Keep a :class:`BarrierStep` per iteration in ``result.history``.

    Returns
    -------
    SparseWeights
    """
    V = check_matrix(V, "vectors")
    d = check_oversampling(d)
    W = whiten(V, rank_tol)
    m, r = W.shape

    sd = math.sqrt(d)
    delta_upper = (sd + 1.0) / (sd - 1.0)
    delta_lower = 1.0
    lower = -r * sd
    upper = r * (d + sd) / (sd - 1.0)
    n_steps = math.ceil(d * r)

    M = np.zeros((r, r))
    weights = np.zeros(m)
    history = []
    for step in range(n_steps):
        mu, Q = np.linalg.eigh(M)
        if not (lower < mu[0] and mu[-1] < upper):
            raise SparsifierBreakdown(
                f"barrier violated at step {step}: eigenvalues [{mu[0]:.6g}, {mu[-1]:.6g}] "
                f"outside ({lower:.6g}, {upper:.6g})",
                step=step, lower=lower, upper=upper,
            )
        gap_u = 1.0 / (upper - mu)
        gap_l = 1.0 / (mu - lower)
        new_upper = upper + delta_upper
        new_lower = lower + delta_lower
        res_u = 1.0 / (new_upper - mu)
        res_l = 1.0 / (mu - new_lower)
        drop_u = gap_u.sum() - res_u.sum()
        drop_l = res_l.sum() - gap_l.sum()

        Y2 = W @ Q
        Y2 *= Y2
        scores_u = Y2 @ (res_u * res_u / drop_u + res_u)
        scores_l = Y2 @ (res_l * res_l / drop_l - res_l)
        ok = (scores_u <= scores_l) & (scores_l > 0.0)
        if not ok.any():
            raise SparsifierBreakdown(
                f"no vector satisfies the barrier condition at step {step}",
                step=step, lower=lower, upper=upper,
            )
        i = int(np.argmax(ok))
        t = 2.0 / (scores_u[i] + scores_l[i])
        if record_history:
            history.append(BarrierStep(
                step=step, lower=lower, upper=upper,
                eig_min=float(mu[0]), eig_max=float(mu[-1]),
                upper_potential=float(gap_u.sum()), lower_potential=float(gap_l.sum()),
                index=i, increment=float(t),
            ))
        weights[i] += t
        M += t * np.outer(W[i], W[i])
        M = 0.5 * (M + M.T)
        upper, lower = new_upper, new_lower

    mu = np.linalg.eigvalsh(M)
    if not (lower < mu[0] and mu[-1] < upper):
        raise SparsifierBreakdown(
            f"final eigenvalues [{mu[0]:.6g}, {mu[-1]:.6g}] outside ({lower:.6g}, {upper:.6g})",
            step=n_steps, lower=lower, upper=upper,
        )
    if record_history:
        history.append(BarrierStep(
            step=n_steps, lower=lower, upper=upper,
            eig_min=float(mu[0]), eig_max=float(mu[-1]),
            upper_potential=float(np.sum(1.0 / (upper - mu))),
            lower_potential=float(np.sum(1.0 / (mu - lower))),
            index=-1, increment=0.0,
        ))
    scale = 1.0 / math.sqrt(upper * lower)
    weights *= scale
    return SparseWeights(
        weights=weights,
        support=np.flatnonzero(weights > 0.0),
        rank_used=r,
        d_used=d,
        kappa=upper / lower,
        scale=scale,
        history=history,
    )


def verify_sandwich(V, weights, *, rank_tol=RANK_TOL):
    """Extreme eigenvalues of the whitened weighted sum ``Lambda^-1/2 Q^T A_s Q Lambda^-1/2``.

    Independent of the sparsifier: ``A`` is factored directly when its side is
    small, otherwise through a thin SVD of ``V``.
    """
    V = check_matrix(V, "vectors")
    w = weights.weights if isinstance(weights, SparseWeights) else np.asarray(weights, float)
    if w.shape != (V.shape[0],):
        raise ValidationError(
            f"weights have shape {w.shape}, expected ({V.shape[0]},) for this family"
        )
    m, k = V.shape
    if k <= 512:
        evals, Q = np.linalg.eigh(V.T @ V)
        keep = evals > rank_tol * evals[-1]
        T = Q[:, keep] / np.sqrt(evals[keep])
        B = V @ T
    else:
        U, sv, _ = np.linalg.svd(V, full_matrices=False)
        keep = sv**2 > rank_tol * sv[0] ** 2
        B = U[:, keep]
    evals = np.linalg.eigvalsh(B.T @ (w[:, None] * B))
    return float(evals[0]), float(evals[-1])
