"""Weighted coordinate selection that preserves norms on several subspaces at once.

For subspaces ``X_1 .. X_s`` of ``R^m`` with orthonormal bases ``B_l``, the
row ``i`` of the horizontally stacked bases ``[B_1 | ... | B_s]`` is the
vector ``v_i``. Sparsifying ``sum_i v_i v_i^T`` and restricting the resulting
quadratic form to block ``l`` gives ``B_l^T D B_l``, where ``D`` holds the
coordinate weights. Its eigenvalues bound ``sum_i s_i x(i)**2 / |x|**2`` for
every ``x`` in ``X_l``.
"""

from dataclasses import dataclass

import numpy as np

from .exceptions import ValidationError
from .sparsifier import RANK_TOL, SparseWeights, bss_sparsify
from .utils.validation import check_matrix, check_oversampling

BASIS_TOL = 1e-10


def orthonormal_basis(spanning, tol=BASIS_TOL):
    """Orthonormal basis of the span of the rows of ``spanning``.

    Modified Gram-Schmidt with a second orthogonalization pass, processing the
    vectors in the given order. A vector whose residual norm falls below
    ``tol`` times the largest input norm is dropped as dependent.

    Returns an array of shape ``(m, k_l)`` with orthonormal columns.
    """
    S = check_matrix(np.atleast_2d(spanning), "spanning")
    if not 0.0 < tol < 1.0:
        raise ValidationError(f"tol must lie in (0, 1), got {tol}")
    ref = float(np.max(np.linalg.norm(S, axis=1)))
    if ref == 0.0:
        raise ValidationError("empty subspace: every spanning vector is zero")
    basis = []
    for v in S:
        v = v.copy()
        for _ in range(2):
            for q in basis:
                v -= (q @ v) * q
        nrm = np.linalg.norm(v)
        if nrm > tol * ref:
            basis.append(v / nrm)
    if not basis:
        raise ValidationError("empty subspace: all spanning vectors are below tolerance")
    return np.column_stack(basis)


@dataclass
class CoordinateSelection:
    """Selected coordinates ``sigma`` (0-based, sorted) and their positive weights."""

    sigma: np.ndarray
    weights: np.ndarray
    per_subspace_bounds: list
    kappa: float
    dims: list
    sparse: SparseWeights = None
    m: int = None

    @property
    def n(self):
        return int(self.sigma.shape[0])

    def dense_weights(self, m):
        out = np.zeros(m)
        out[self.sigma] = self.weights
        return out


def stack_bases(bases):
    """Rows of ``[B_1 | ... | B_s]``: the concatenated per-coordinate vectors."""
    if not bases:
        raise ValidationError("empty subspace family")
    m = bases[0].shape[0]
    for B in bases:
        if B.shape[0] != m:
            raise ValidationError("all subspaces must live in the same ambient dimension")
    return np.hstack(bases)


def _block_bounds(bases, dense):
    bounds = []
    for B in bases:
        ev = np.linalg.eigvalsh(B.T @ (dense[:, None] * B))
        bounds.append((float(ev[0]), float(ev[-1])))
    return bounds


def simultaneous_sparsify(subspaces, d, *, tol=BASIS_TOL, rank_tol=RANK_TOL, bases=None):
    """Select weighted coordinates preserving every subspace in ``subspaces``.

    Parameters
    ----------
    subspaces : sequence of arrays, each of shape (n_l, m)
        Spanning vectors (rows) of each subspace. Ignored when ``bases`` is given.
    d : float
        Sparsifier oversampling; ``|sigma| <= ceil(d * sum_l k_l)``.
    bases : sequence of arrays of shape (m, k_l), optional
        Precomputed orthonormal bases.
    """
    d = check_oversampling(d)
    if bases is None:
        if len(subspaces) == 0:
            raise ValidationError("empty subspace family")
        bases = [orthonormal_basis(S, tol) for S in subspaces]
    V = stack_bases(bases)
    sw = bss_sparsify(V, d, rank_tol=rank_tol)
    sigma = sw.support
    return CoordinateSelection(
        sigma=sigma,
        weights=sw.weights[sigma].copy(),
        per_subspace_bounds=_block_bounds(bases, sw.weights),
        kappa=sw.kappa,
        dims=[int(B.shape[1]) for B in bases],
        sparse=sw,
        m=int(V.shape[0]),
    )


def verify_selection(bases, selection):
    """Per-subspace ``(lambda_min, lambda_max)`` of ``B_l^T D B_l``.

    ``bases`` are orthonormal ``(m, k_l)`` matrices; the check is independent
    of how the selection was produced.
    """
    if not bases:
        raise ValidationError("empty subspace family")
    m = bases[0].shape[0]
    if selection.m is not None and selection.m != m:
        raise ValidationError(f"selection was built for m={selection.m}, bases have m={m}")
    sigma = np.asarray(selection.sigma)
    if sigma.size and (sigma.min() < 0 or sigma.max() >= m):
        raise ValidationError(f"selection indexes outside the ambient dimension {m}")
    if any(B.shape[0] != m for B in bases):
        raise ValidationError("all subspaces must live in the same ambient dimension")
    return _block_bounds(bases, selection.dense_weights(m))
