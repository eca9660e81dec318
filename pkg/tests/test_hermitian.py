import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from rzstrata import hermitian as H
from rzstrata.hermitian import (
    HermSpace, StratumLabel, classify_line_direct, classify_minus, classify_plus,
    classify_vectors, count_isotropic_bruteforce, enumerate_isotropic_lines,
    enumerate_isotropic_vectors, hermitian_surface_count, meet, perp, perp_first, tau,
)

# frozen stratum counts for p = 3 (unit, w1, w2)
COUNTS = {
    1: (280, 0, 0),
    2: (280, 8064, 0),
    3: (280, 80640, 466560),
}


@pytest.mark.parametrize("m,expected", [(1, 280), (2, 8344)])
def test_isotropic_line_count_p3(m, expected):
    assert count_isotropic_bruteforce(3, m) == expected
    assert hermitian_surface_count(3, m) == expected


def test_surface_counts_small():
    # the two values quoted for the desk-scale check
    assert count_isotropic_bruteforce(3, 1) == 280
    assert count_isotropic_bruteforce(5, 1) == 3276
    assert hermitian_surface_count(5, 1) == 3276


def test_surface_formula_p3_m3():
    assert hermitian_surface_count(3, 3) == sum(COUNTS[3])


@pytest.mark.parametrize("m", [1, 2, 3])
def test_stratum_counts_frozen(m):
    c = H.stratum_counts(3, m)
    assert (c["unit"], c["w1"], c["w2"]) == COUNTS[m]


def test_stratum_counts_closed_form():
    # w1 points are the non-rational points on the 112 rational isotropic lines,
    # and each such line is a P^1 with p^2 + 1 rational points
    for m in (2, 3):
        assert COUNTS[m][1] == 112 * ((3 ** (2 * m) + 1) - (3 ** 2 + 1))


@pytest.mark.parametrize("m", [1, 2])
def test_enumeration_matches_bruteforce(m):
    X = enumerate_isotropic_vectors(3, m)
    assert len(X) == count_isotropic_bruteforce(3, m)
    F = H.field(3, m)
    # every row is isotropic and canonical
    acc = np.zeros(len(X), dtype=np.int64)
    for j in range(4):
        acc = F.add(acc, F.norm_t[X[:, j]])
    assert not np.any(acc)
    lead = X[np.arange(len(X)), np.argmax(X != 0, axis=1)]
    assert np.all(lead == 1)
    assert len({tuple(r) for r in X.tolist()}) == len(X)


@pytest.mark.parametrize("m", [1, 2, 3])
def test_kernel_and_numpy_enumeration_agree(m):
    a = enumerate_isotropic_vectors(3, m, use_kernel=True)
    b = enumerate_isotropic_vectors(3, m, use_kernel=False)
    assert np.array_equal(a, b)


@pytest.mark.parametrize("m", [1, 2, 3])
def test_classify_vectors_kernel_vs_numpy(m):
    X = enumerate_isotropic_vectors(3, m)
    assert np.array_equal(classify_vectors(3, m, X, use_kernel=True),
                          classify_vectors(3, m, X, use_kernel=False))


def test_desk_bound():
    with pytest.raises(ValueError):
        enumerate_isotropic_vectors(3, 4)


def _labels(m, sample=None, seed=0):
    lines = enumerate_isotropic_lines(3, m)
    if sample is not None:
        rng = np.random.default_rng(seed)
        lines = [lines[i] for i in rng.choice(len(lines), sample, replace=False)]
    return lines


@pytest.mark.parametrize("m", [1, 2])
def test_plus_minus_direct_agree_exhaustive(m):
    lines = _labels(m)
    if m == 2:
        lines = lines[::7]
    X = np.array([U.rows[0] for U in lines])
    codes = classify_vectors(3, m, X)
    for U, c in zip(lines, codes):
        lab = H.LABELS[c]
        assert classify_plus(U) is lab
        assert classify_line_direct(U) is lab


def test_plus_minus_direct_agree_sampled_m3():
    # a random sample, topped up with rational points since those are rare
    X_all = enumerate_isotropic_vectors(3, 3)
    codes_all = classify_vectors(3, 3, X_all)
    rng = np.random.default_rng(1)
    idx = np.concatenate([rng.choice(len(X_all), 300, replace=False),
                          np.flatnonzero(codes_all == 0)[::14]])
    S = HermSpace(3, 3)
    lines = [S.span([X_all[i]]) for i in idx]
    codes = codes_all[idx]
    seen = set()
    for U, c in zip(lines, codes):
        lab = H.LABELS[c]
        assert classify_plus(U) is lab
        assert classify_line_direct(U) is lab
        seen.add(lab)
    assert seen == set(H.LABELS)


def test_perp_is_in_y_minus():
    for U in _labels(2, sample=50):
        W = perp(U)
        assert W.dim == 3
        assert H.in_y_minus(W)
        assert perp(W) == U or U <= W


def test_perp_of_hyperplane_matches_line():
    S = HermSpace(3, 2)
    for U in _labels(2, sample=40, seed=4):
        W = perp(U)
        # U is the radical of W restricted to itself
        assert U <= W
        # the first-slot orthogonal of sigma(U) is the same hyperplane
        assert perp_first(H.sigma(U)) == W or perp_first(U).dim == 3


def test_meet_with_tau_translate_is_tau_equivariant():
    for U in _labels(3, sample=40, seed=2):
        W = perp(U)
        assert tau(meet(W, tau(W))) == meet(tau(W), tau(W, 2))


def test_tau_equivariance_of_labels():
    for U in _labels(3, sample=60, seed=5):
        assert classify_plus(tau(U)) is classify_plus(U)


def test_w1_pieces_lie_in_rational_planes():
    planes = H.rational_isotropic_planes(3, 2)
    for U in _labels(2, sample=200, seed=3):
        if classify_plus(U) is not StratumLabel.W1:
            continue
        J = H.join(U, tau(U))
        assert J in planes


def test_rational_plane_count():
    assert len(H.rational_isotropic_planes(3, 1)) == 112
    assert len(H.rational_isotropic_planes(3, 2)) == 112
    planes = H.rational_isotropic_planes(3, 2)
    for W in planes:
        assert tau(W) == W


def test_projective_line_points():
    pts = H.p1_points(3, 2)
    assert len(pts) == 82
    assert sum(pt.tau_fixed for pt in pts) == 10
    pts = H.p1_points(3, 1)
    assert len(pts) == 10
    assert all(pt.tau_fixed for pt in pts)


def test_classify_minus_rejects_non_member():
    S = HermSpace(3, 1)
    with pytest.raises(ValueError):
        classify_minus(S.span([[1, 0, 0, 0]]))
    with pytest.raises(ValueError):
        classify_plus(S.span([[1, 0, 0, 0]]))


def test_subspace_algebra():
    S = HermSpace(3, 2)
    U = S.span([[1, 0, 0, 0], [0, 1, 0, 0]])
    W = S.span([[0, 1, 0, 0], [0, 0, 1, 0]])
    assert meet(U, W) == S.span([[0, 1, 0, 0]])
    assert H.join(U, W).dim == 3
    assert S.zero() <= U
    assert U <= S.whole()
    with pytest.raises(ValueError):
        meet(U, HermSpace(3, 1).whole())


@settings(max_examples=60, deadline=None)
@given(st.lists(st.lists(st.integers(0, 80), min_size=4, max_size=4), min_size=1, max_size=3))
def test_perp_duality(rows):
    S = HermSpace(3, 2)
    U = S.span(rows)
    P = perp(U)
    assert U.dim + P.dim == 4
    assert perp_first(P) == U
    for x in U.rows:
        for y in P.rows:
            assert S.form(x, y) == 0


@settings(max_examples=60, deadline=None)
@given(st.lists(st.integers(0, 80), min_size=4, max_size=4),
       st.lists(st.integers(0, 80), min_size=4, max_size=4),
       st.integers(0, 80))
def test_form_sesquilinear(x, y, c):
    S = HermSpace(3, 2)
    o = S.ops
    cx = [o.mul(c, a) for a in x]
    cy = [o.mul(c, a) for a in y]
    assert S.form(cx, y) == o.mul(c, S.form(x, y))
    assert S.form(x, cy) == o.mul(o.frob[c], S.form(x, y))


@settings(max_examples=60, deadline=None)
@given(st.lists(st.integers(0, 8), min_size=4, max_size=4),
       st.lists(st.integers(0, 8), min_size=4, max_size=4))
def test_form_hermitian_over_base_field(x, y):
    S = HermSpace(3, 1)
    assert S.form(y, x) == S.ops.frob[S.form(x, y)]


def test_hermitian_frame_is_orthonormal():
    o = H.ops(3, 1)
    # the Gram of span(e1 + e2, e2) under the standard form
    G = [[2, 1], [1, 1]]
    C = H.hermitian_frame(G, 3)
    for i, x in enumerate(C):
        for j, y in enumerate(C):
            acc = 0
            for a in range(2):
                for b in range(2):
                    acc = o.add(acc, o.mul(o.mul(x[a], G[a][b]), o.frob[y[b]]))
            assert acc == (1 if i == j else 0)


def test_form_example_f9():
    F = H.field(3, 1)
    g = next(x for x in range(1, 9) if all(F.pow(x, k) != 1 for k in (1, 2, 4)))
    assert F.pow(g, 4) == F.neg[1]
    S = HermSpace(3, 1)
    assert S.form([1, g, 0, 0], [1, g, 0, 0]) == 0
    assert S.form([1, 0, 0, 0], [1, 0, 0, 0]) == 1
    assert S.form([1, 0, 0, 0], [0, 1, 0, 0]) == 0


def test_perp_examples():
    S = HermSpace(3, 2)
    assert perp(S.whole()) == S.zero()
    assert perp(S.span([[1, 0, 0, 0]])) == S.span([[0, 1, 0, 0], [0, 0, 1, 0], [0, 0, 0, 1]])


@settings(max_examples=60, deadline=None)
@given(st.lists(st.lists(st.integers(0, 728), min_size=4, max_size=4), min_size=1, max_size=3))
def test_double_perp_is_tau_inverse(rows):
    S = HermSpace(3, 3)
    U = S.span(rows)
    assert perp(perp(U)) == tau(U, -1 % 3)
    assert tau(U, 3) == U


def test_meet_join_dimensions_random_pairs():
    S = HermSpace(3, 1)
    rng = np.random.default_rng(11)
    for _ in range(10 ** 4 // 4):
        U = S.span(rng.integers(0, 9, size=(rng.integers(1, 4), 4)).tolist())
        W = S.span(rng.integers(0, 9, size=(rng.integers(1, 4), 4)).tolist())
        assert U.dim + W.dim == meet(U, W).dim + H.join(U, W).dim
        assert meet(U, U) == U


def test_tau_regression_vector_m3():
    # a non-rational 3-space over F_{3^6} with tau U != U and tau^2 U != U
    S = HermSpace(3, 3)
    U = S.span([[1, 0, 0, 5], [0, 1, 0, 17], [0, 0, 1, 400]])
    assert tau(U) != U and tau(U, 2) != U
    assert tau(U, 3) == U


def test_w1_example_from_rational_hyperbolic_plane():
    # with g^(p+1) = -1 in F_9, W = span(e1 + g e2, e3 + g e4) is rational and totally
    # isotropic; U = perp(x) for a non-rational x in W contains W and lies in the w1 stratum
    S = HermSpace(3, 2)
    F9 = H.field(3, 1)
    g = next(x for x in range(1, 9) if F9.mul(x, F9.frob(x)) == F9.neg[1])
    i = int(H.embed_subfield_table(3, 2)[g])
    o = S.ops
    W = S.span([[1, i, 0, 0], [0, 0, 1, i]])
    assert perp(W) == W
    F = H.field(3, 2)
    t = next(a for a in range(F.q) if F.frob(F.frob(a)) != a)
    x = [1, i, t, o.mul(t, i)]
    U = perp(S.span([x]))
    assert W <= U
    assert classify_minus(U) is StratumLabel.W1


def _in_plane(F, W, X):
    # x in W iff form(w, x) = 0 for both basis vectors (W is its own perp)
    ok = np.ones(len(X), dtype=bool)
    for w in W.rows:
        acc = np.zeros(len(X), dtype=np.int64)
        for j in range(4):
            acc = F.add(acc, F.mul(np.full(len(X), w[j]), F.frob(X[:, j])))
        ok &= acc == 0
    return ok


@pytest.mark.parametrize("m", [2, 3])
def test_w1_closure_components_are_projective_lines(m):
    F = H.field(3, m)
    X = enumerate_isotropic_vectors(3, m)
    codes = classify_vectors(3, m, X)
    covered = np.zeros(len(X), dtype=np.int64)
    for W in H.rational_isotropic_planes(3, m):
        inside = _in_plane(F, W, X)
        assert inside.sum() == 3 ** (2 * m) + 1
        assert (codes[inside] == 0).sum() == 3 ** 2 + 1
        assert set(codes[inside].tolist()) <= {0, 1}
        covered += inside & (codes == 1)
    # every w1 point lies on exactly one component
    assert np.all(covered[codes == 1] == 1)


def test_w1_meet_is_self_perp_m3():
    X = enumerate_isotropic_vectors(3, 3)
    codes = classify_vectors(3, 3, X)
    F = H.field(3, 3)
    W1 = X[codes == 1]
    tX = F.frob(F.frob(W1))
    # U meet tau U = perp(span(x, tau x)); it is self-perp iff the span is totally isotropic
    for a, b in ((W1, tX), (tX, W1)):
        acc = np.zeros(len(W1), dtype=np.int64)
        for j in range(4):
            acc = F.add(acc, F.mul(a[:, j], F.frob(b[:, j])))
        assert not np.any(acc)
    # object-level check on a sample
    S = HermSpace(3, 3)
    for x in W1[:: len(W1) // 60]:
        U = perp(S.span([x]))
        M = meet(U, tau(U))
        assert M == perp(M)
