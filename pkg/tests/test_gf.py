import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from rzstrata import gf
from rzstrata.gf import field, galois_ring, subring_generator

FIELDS = [(3, 1), (3, 2), (3, 3), (5, 1), (5, 2), (5, 3)]


def test_defining_polynomial_is_least_irreducible():
    # F_9 = F_3[i]/(i^2 + 1)
    assert tuple(field(3, 1).poly) == (1, 0, 1)
    F = field(3, 1)
    i = F.elem(3)
    assert (i * i).value == F.neg[1]


def test_f9_frobenius_negates_i():
    F = field(3, 1)
    i = 3
    assert F.frob(i) == F.neg[i]


@pytest.mark.parametrize("p,m", FIELDS)
def test_field_axioms_random(p, m):
    F = field(p, m)
    rng = np.random.default_rng(p * 10 + m)
    a, b, c = rng.integers(0, F.q, size=(3, 10 ** 4))
    assert np.array_equal(F.mul(a, F.add(b, c)), F.add(F.mul(a, b), F.mul(a, c)))
    assert np.array_equal(F.mul(F.mul(a, b), c), F.mul(a, F.mul(b, c)))
    assert np.array_equal(F.add(a, F.neg[a]), np.zeros_like(a))
    nz = a[a != 0]
    assert np.all(F.mul(nz, F.inv(nz)) == 1)
    # Frobenius is a ring map
    assert np.array_equal(F.frob(F.add(a, b)), F.add(F.frob(a), F.frob(b)))
    assert np.array_equal(F.frob(F.mul(a, b)), F.mul(F.frob(a), F.frob(b)))


@pytest.mark.parametrize("p,m", FIELDS)
def test_frobenius_order(p, m):
    F = field(p, m)
    x = np.arange(F.q)
    assert np.array_equal(F.frob(x, 2 * m), x)
    if m > 1:
        assert not np.array_equal(F.frob(x, 2), x)


def test_frobenius_matches_power_map():
    F = field(5, 1)
    for a in range(F.q):
        assert F.frob(a) == F.pow(a, 5)


def test_z9_inverse_of_two():
    R = galois_ring(3, 1, 2)
    assert np.array_equal(R.inv(R.scalar(2)), R.scalar(5))
    assert np.array_equal(R.inv(R.one()), R.one())


def test_ring_elem_interface():
    R = galois_ring(3, 1, 2)
    two = R.elem([2])
    assert gf.ring_arith(two, two, "mul").coeffs == (4, 0)
    assert gf.ring_arith(two, R.elem([7]), "add").coeffs == (0, 0)
    assert gf.ring_arith(two, None, "inv").coeffs == (5, 0)
    with pytest.raises(ValueError):
        gf.ring_arith(two, two, "pow")


@given(st.integers(0, 8), st.integers(1, 8), st.integers(0, 1))
def test_valuation_of_p_times_unit(r0, r1, k):
    R = galois_ring(3, 1, 3)
    u = R.add(R.lift(r1), R.scalar(3 * r0))
    assert R.valuation(R.mul(R.scalar(3 ** (k + 1)), u)) == k + 1


def test_teichmuller_examples():
    R = galois_ring(3, 1, 2)
    assert R.teichmuller_decompose(R.zero()) == [0, 0]
    assert R.teichmuller_decompose(R.scalar(3)) == [0, 1]
    assert R.teichmuller_decompose(R.scalar(4)) == [1, 1]


@settings(max_examples=200, deadline=None)
@given(st.lists(st.integers(0, 26), min_size=2, max_size=2))
def test_teichmuller_roundtrip(coeffs):
    R = galois_ring(3, 1, 3)
    x = R.reduce(np.array(coeffs))
    assert np.array_equal(R.teichmuller_compose(R.teichmuller_decompose(x)), x)


def test_teichmuller_lifts_are_roots_of_unity():
    R = galois_ring(3, 2, 3)
    T = R.teich
    assert np.array_equal(R.pow(T, R.F.q), T)


@pytest.mark.parametrize("p,m,N", [(3, 1, 2), (3, 2, 3), (3, 3, 2), (5, 1, 3)])
def test_sigma_is_ring_automorphism(p, m, N):
    R = galois_ring(p, m, N)
    rng = np.random.default_rng(7)
    a = rng.integers(0, R.M, size=(200, R.n))
    b = rng.integers(0, R.M, size=(200, R.n))
    assert np.array_equal(R.sigma(R.mul(a, b)), R.mul(R.sigma(a), R.sigma(b)))
    assert np.array_equal(R.sigma(R.add(a, b)), R.add(R.sigma(a), R.sigma(b)))
    assert np.array_equal(R.sigma(a, R.n), a)
    # agrees with the Teichmueller-digit Frobenius
    for x in a[:20]:
        assert np.array_equal(R.sigma(x), R.frobenius(x))


def test_sigma_fixes_prime_subring():
    R = galois_ring(3, 1, 2)
    for c in range(9):
        assert np.array_equal(R.sigma(R.scalar(c)), R.scalar(c))


def test_sigma_commutes_with_reduction():
    R = galois_ring(3, 2, 3)
    rng = np.random.default_rng(3)
    for x in rng.integers(0, R.M, size=(100, R.n)):
        assert R.residue(R.sigma(x)) == R.F.frob(R.residue(x))


def test_sigma_squared_fixed_points_m3():
    # for odd m the fixed ring of sigma^2 is exactly GR(p^N, 2)
    R = galois_ring(3, 3, 1)
    x = np.array(R.F.digits, dtype=np.int64)
    fixed = np.all(R.sigma(x, 2) == x, axis=1)
    assert fixed.sum() == 9
    g = subring_generator(R)
    sub = {R.residue(R.add(R.scalar(a), R.mul(R.scalar(b), g))) for a in range(3) for b in range(3)}
    assert sub == set(np.flatnonzero(fixed).tolist())


@pytest.mark.parametrize("m", [1, 2, 3])
def test_subring_generator_satisfies_small_polynomial(m):
    R = galois_ring(3, m, 4)
    g = subring_generator(R)
    f = gf.conway_like_poly(3, 2)
    acc = R.zero()
    for c in reversed(f):
        acc = R.add(R.mul(acc, g), R.scalar(c))
    assert not np.any(acc)


def test_overflow_guard():
    with pytest.raises(OverflowError):
        galois_ring(3, 1, 40)


def test_bad_parameters():
    with pytest.raises(ValueError):
        field(4, 1)
    with pytest.raises(ValueError):
        field(3, 0)
