"""Synthetic point sets for experiments."""

import numpy as np

from .exceptions import ValidationError

KINDS = ("gaussian", "simplex", "clustered")


def make_points(kind, k, m, *, scale=1.0, seed=0, n_clusters=3, spread=0.05):
    """Generate ``k`` points in ``R^m``.

    ``gaussian``: i.i.d. normal entries times ``scale``.
    ``simplex``: ``scale * e_u`` for ``u = 1..k`` (needs ``k <= m``); every
    pairwise ``l_p`` distance is ``2**(1/p) * scale``.
    ``clustered``: ``n_clusters`` normal centres times ``scale`` plus normal
    noise of size ``spread * scale``.
    """
    if kind not in KINDS:
        raise ValidationError(f"unknown kind {kind!r}; choose from {', '.join(KINDS)}")
    if k < 1 or m < 1:
        raise ValidationError(f"need k >= 1 and m >= 1, got k={k}, m={m}")
    rng = np.random.default_rng(seed)
    if kind == "gaussian":
        return scale * rng.standard_normal((k, m))
    if kind == "simplex":
        if k > m:
            raise ValidationError(f"simplex needs k <= m, got k={k}, m={m}")
        X = np.zeros((k, m))
        X[np.arange(k), np.arange(k)] = scale
        return X
    centres = scale * rng.standard_normal((n_clusters, m))
    labels = np.arange(k) % n_clusters
    return centres[labels] + spread * scale * rng.standard_normal((k, m))
