import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from lpreduce import SparseWeights, ValidationError, bss_sparsify, d_for_eps, verify_sandwich
from lpreduce.sparsifier import kappa_bound, whiten

SLACK = 1e-8


def _whitened_oracle(V, w):
    # full eigendecomposition, no rank truncation beyond exact zeros
    A = V.T @ V
    lam, Q = np.linalg.eigh(A)
    keep = lam > 1e-12 * lam[-1]
    T = Q[:, keep] / np.sqrt(lam[keep])
    At = (V * w[:, None]).T @ V
    return np.linalg.eigvalsh(T.T @ At @ T)


def _check(V, res):
    ev = _whitened_oracle(V, res.weights)
    assert ev[0] >= res.kappa**-0.5 - SLACK
    assert ev[-1] <= res.kappa**0.5 + SLACK
    assert res.kappa <= kappa_bound(res.d_used) * (1 + 1e-12)
    assert res.support.size <= math.ceil(res.d_used * res.rank_used)
    off = np.setdiff1d(np.arange(V.shape[0]), res.support)
    assert np.all(res.weights[off] == 0.0)
    assert np.all(res.weights[res.support] > 0.0)


@pytest.mark.parametrize("d", [1.5, 4.0, 9.0])
def test_standard_basis_gets_every_index(d):
    V = np.eye(5)
    res = bss_sparsify(V, d)
    assert res.support.tolist() == list(range(5))
    _check(V, res)


def test_repeated_scalar_vector():
    V = np.full((20, 1), 3.0)
    res = bss_sparsify(V, 4.0)
    assert res.support.size == 1
    assert res.kappa <= 9.0
    # 1x1 sandwich of sum_i s_i * 9 against A = 20 * 9
    total = res.weights.sum()
    assert 20 * res.kappa**-0.5 <= total <= 20 * res.kappa**0.5


def test_random_family_in_r4():
    V = np.random.default_rng(0).standard_normal((50, 4))
    res = bss_sparsify(V, 9.0)
    assert res.support.size <= 36
    assert res.kappa <= 4.0
    _check(V, res)
    lo, hi = verify_sandwich(V, res)
    ev = _whitened_oracle(V, res.weights)
    assert lo == pytest.approx(ev[0], rel=1e-10)
    assert hi == pytest.approx(ev[-1], rel=1e-10)


def test_kappa_is_barrier_ratio():
    V = np.random.default_rng(1).standard_normal((30, 3))
    d = 4.0
    res = bss_sparsify(V, d)
    r = res.rank_used
    sd = math.sqrt(d)
    T = math.ceil(d * r)
    u_T = r * (d + sd) / (sd - 1) + T * (sd + 1) / (sd - 1)
    l_T = -r * sd + T
    assert res.kappa == pytest.approx(u_T / l_T, rel=1e-14)
    assert res.scale == pytest.approx(1 / math.sqrt(u_T * l_T), rel=1e-14)


def test_d_for_eps_values():
    assert d_for_eps(1.0) == pytest.approx(25 / 9, rel=1e-14)
    assert d_for_eps(0.5) == pytest.approx(6.76, rel=1e-14)
    assert d_for_eps(0.1) > d_for_eps(0.5)
    for eps in (0.05, 0.3, 1.0):
        assert math.sqrt(kappa_bound(d_for_eps(eps))) == pytest.approx((1 + eps) ** 2, rel=1e-12)


@pytest.mark.parametrize("eps", [0.0, -0.1, 1.5])
def test_d_for_eps_range(eps):
    with pytest.raises(ValidationError):
        d_for_eps(eps)


def test_verify_sandwich_trivial_weights():
    V = np.random.default_rng(2).standard_normal((40, 6))
    lo, hi = verify_sandwich(V, np.ones(40))
    assert lo == pytest.approx(1.0, abs=1e-12) and hi == pytest.approx(1.0, abs=1e-12)
    lo, hi = verify_sandwich(V, np.full(40, 2.0))
    assert lo == pytest.approx(2.0, abs=1e-12) and hi == pytest.approx(2.0, abs=1e-12)


def test_verify_sandwich_dimension_mismatch():
    with pytest.raises(ValidationError):
        verify_sandwich(np.ones((4, 2)), np.ones(5))


@pytest.mark.parametrize("d", [1.0, 0.5])
def test_rejects_small_d(d):
    with pytest.raises(ValidationError):
        bss_sparsify(np.eye(3), d)


def test_rejects_zero_family():
    with pytest.raises(ValidationError):
        bss_sparsify(np.zeros((4, 3)), 4.0)


def test_zero_rows_are_never_selected():
    rng = np.random.default_rng(4)
    V = rng.standard_normal((30, 5))
    V[::3] = 0.0
    res = bss_sparsify(V, 4.0)
    assert not np.intersect1d(res.support, np.arange(0, 30, 3)).size
    W = whiten(V)
    assert np.all(W[::3] == 0.0)


def test_rank_deficient_family_uses_rank():
    rng = np.random.default_rng(5)
    V = rng.standard_normal((60, 2)) @ rng.standard_normal((2, 7))
    res = bss_sparsify(V, 4.0)
    assert res.rank_used == 2
    assert res.support.size <= 8
    _check(V, res)


def test_wide_family_uses_gram_route():
    rng = np.random.default_rng(6)
    V = rng.standard_normal((20, 600))
    res = bss_sparsify(V, 2.0)
    assert res.rank_used == 20
    lo, hi = verify_sandwich(V, res)
    assert res.kappa**-0.5 - SLACK <= lo <= hi <= res.kappa**0.5 + SLACK


def test_barrier_history():
    V = np.random.default_rng(7).standard_normal((40, 4))
    d = 4.0
    res = bss_sparsify(V, d, record_history=True)
    sd = math.sqrt(d)
    assert len(res.history) == math.ceil(d * 4) + 1
    for h in res.history:
        assert h.lower < h.eig_min <= h.eig_max < h.upper
        assert h.upper_potential <= (sd - 1) / (d + sd) + 1e-9
        assert h.lower_potential <= 1 / sd + 1e-9


def test_deterministic():
    V = np.random.default_rng(8).standard_normal((80, 6))
    a = bss_sparsify(V, 4.0)
    b = bss_sparsify(V.copy(), 4.0)
    assert a.weights.tobytes() == b.weights.tobytes()


def test_json_round_trip():
    V = np.random.default_rng(9).standard_normal((25, 3))
    res = bss_sparsify(V, 4.0)
    back = SparseWeights.from_dict(res.to_dict())
    assert np.array_equal(back.weights, res.weights)
    assert np.array_equal(back.support, res.support)
    assert back.kappa == res.kappa and back.rank_used == res.rank_used


@settings(max_examples=40, deadline=None)
@given(
    seed=st.integers(0, 2**31 - 1),
    r=st.integers(1, 6),
    m=st.integers(1, 40),
    d=st.floats(1.2, 12.0),
)
def test_sandwich_property(seed, r, m, d):
    V = np.random.default_rng(seed).standard_normal((m, r))
    res = bss_sparsify(V, d)
    _check(V, res)
