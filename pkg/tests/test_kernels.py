"""Compiled kernels against their own uncompiled Python source."""

import numpy as np
import pytest

from rzstrata import _latkern as K_
from rzstrata import hermitian as hm
from rzstrata import padlat as P
from rzstrata._accel import HAVE_NUMBA, py_version

pytestmark = pytest.mark.skipif(not HAVE_NUMBA, reason="numba disabled")


def _sample_generators(kind, m=2, n=40, seed=0):
    V = P.VertexLat(P.context(3, 1, 1).standard(), "1") if kind == "1" else P.reference_type3(3)
    S = P.stratum_model(V, m)
    X = hm.enumerate_isotropic_vectors(3, m)
    idx = np.random.default_rng(seed).choice(len(X), n, replace=False)
    G, E = P.stratum_generators(S, X[idx])
    return S.big, G, E


def _hnf_args(big):
    R = big.R
    return (big.p, big.K, R.red, R.M, big.digits, big.inv_t, big.pw)


@pytest.mark.parametrize("kind", ["1", "3"])
def test_hnf_batch_matches_python(kind):
    big, G, _ = _sample_generators(kind)
    fast = K_.hnf_batch(G, *_hnf_args(big))
    slow = py_version(K_.hnf_batch)(G, *_hnf_args(big))
    assert np.array_equal(fast[0], slow[0])
    assert np.array_equal(fast[1], slow[1])


@pytest.mark.parametrize("kind", ["1", "3"])
def test_profile_batch_matches_python(kind):
    big, G, E = _sample_generators(kind, n=12, seed=1)
    Rw = big.ring(4 * big.K)
    args = (G, E, kind == "1", big.p, big.K, big.R.red, big.R.M, big.digits, big.inv_t, big.pw,
            big.sig[1], big.sig[2], Rw.red, Rw.M)
    fast = K_.inert_profile_batch(*args)
    slow = py_version(K_.inert_profile_batch)(*args)
    for a, b in zip(fast, slow):
        assert np.array_equal(a, b)


def test_rz_batch_matches_python():
    big, G, _ = _sample_generators("3", n=12, seed=2)
    Rw = big.ring(4 * big.K)
    args = (G, big.p, big.K, big.R.red, big.R.M, big.digits, big.inv_t, big.pw,
            big.sig[1], big.sig[2], Rw.red, Rw.M)
    fast = K_.inert_rz_batch(*args)
    slow = py_version(K_.inert_rz_batch)(*args)
    for a, b in zip(fast, slow):
        assert np.array_equal(a, b)


def test_gmul_matches_ring_mul():
    R = P.context(3, 2, 1).R
    rng = np.random.default_rng(4)
    for _ in range(50):
        a, b = rng.integers(0, R.M, size=(2, R.n))
        assert np.array_equal(K_.gmul(a, b, R.red, R.M), R.mul(a, b))
        assert np.array_equal(py_version(K_.gmul)(a, b, R.red, R.M), R.mul(a, b))


@pytest.mark.parametrize("m", [1, 2])
def test_classify_kernel_matches_python(m):
    X = hm.enumerate_isotropic_vectors(3, m)
    F = hm.field(3, m)
    tau_t = F.frob_t[F.frob_t]
    args = (X, tau_t, F.add_table, F.mul_table, F.neg, F.inv_t)
    assert np.array_equal(hm._classify_kernel(*args), py_version(hm._classify_kernel)(*args))
