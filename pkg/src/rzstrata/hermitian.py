"""Hermitian 4-space over F_{p^2}, base-changed to F_{p^{2m}}.

The form is (x, y) = sum_i x_i * y_i^p (identity Gram, Frobenius twist on the
second argument).  tau is the p^2-power map on coordinates.  Subspaces are
stored as reduced row-echelon bases, so equality of subspaces is equality of
the stored tuples.
"""

from dataclasses import dataclass
from enum import Enum
from functools import lru_cache

import numpy as np

from ._accel import HAVE_NUMBA, njit
from .gf import field

DESK_BOUND = 10 ** 9


class StratumLabel(str, Enum):
    UNIT = "unit"
    W1 = "w1"
    W2 = "w2"


LABELS = (StratumLabel.UNIT, StratumLabel.W1, StratumLabel.W2)


class _Ops:
    """Python-list copies of the field tables for fast scalar work."""

    def __init__(self, F):
        self.F = F
        self.q = F.q
        self.p = F.p
        self.m = F.m
        if F.add_table is not None:
            self.add_t = F.add_table.tolist()
            self.mul_t = F.mul_table.tolist()
        else:
            self.add_t = None
            self.mul_t = None
        self.neg = F.neg.tolist()
        self.inv = F.inv_t.tolist()
        self.frob = F.frob_t.tolist()
        self.frob_inv = F.frob_t.tolist()
        for _ in range(F.n - 2):
            self.frob_inv = [F.frob_t[x] for x in self.frob_inv]
        self.frob_inv = [int(x) for x in self.frob_inv]
        self.tau = [self.frob[self.frob[x]] for x in range(F.q)]

    def add(self, a, b):
        if self.add_t is not None:
            return self.add_t[a][b]
        return int(self.F.add(a, b))

    def mul(self, a, b):
        if self.mul_t is not None:
            return self.mul_t[a][b]
        return int(self.F.mul(a, b))

    def sub(self, a, b):
        return self.add(a, self.neg[b])


@lru_cache(maxsize=None)
def ops(p, m):
    return _Ops(field(p, m))


# ---------------------------------------------------------------------------
# linear algebra over F_q


def rref(rows, o):
    """Reduced row-echelon form; returns a tuple of row tuples (zero rows dropped)."""
    rows = [list(r) for r in rows]
    if not rows:
        return ()
    d = len(rows[0])
    out = []
    col = 0
    while rows and col < d:
        piv = None
        for i, r in enumerate(rows):
            if r[col]:
                piv = i
                break
        if piv is None:
            col += 1
            continue
        r = rows.pop(piv)
        s = o.inv[r[col]]
        r = [o.mul(s, x) for x in r]
        for k in range(len(rows)):
            c = rows[k][col]
            if c:
                rows[k] = [o.sub(x, o.mul(c, y)) for x, y in zip(rows[k], r)]
        for k in range(len(out)):
            c = out[k][col]
            if c:
                out[k] = [o.sub(x, o.mul(c, y)) for x, y in zip(out[k], r)]
        out.append(r)
        rows = [x for x in rows if any(x)]
        col += 1
    out.sort(key=lambda r: next(i for i, x in enumerate(r) if x))
    return tuple(tuple(r) for r in out)


def nullspace(rows, d, o):
    """Basis (in rref) of {z : r . z = 0 for every row r} (plain dot product)."""
    R = rref(rows, o)
    pivots = [next(i for i, x in enumerate(r) if x) for r in R]
    free = [j for j in range(d) if j not in pivots]
    basis = []
    for f in free:
        z = [0] * d
        z[f] = 1
        for r, pc in zip(R, pivots):
            z[pc] = o.neg[r[f]]
        basis.append(z)
    return rref(basis, o) if basis else ()


def rank(rows, o):
    return len(rref(rows, o))


# ---------------------------------------------------------------------------
# the hermitian space and its subspaces


@dataclass(frozen=True)
class HermSpace:
    """Hermitian space of dimension d with identity Gram over F_{p^{2m}}."""

    p: int
    m: int
    d: int = 4

    @property
    def F(self):
        return field(self.p, self.m)

    @property
    def ops(self):
        return ops(self.p, self.m)

    def form(self, x, y):
        if len(x) != self.d or len(y) != self.d:
            raise ValueError("dimension mismatch")
        o = self.ops
        acc = 0
        for a, b in zip(x, y):
            acc = o.add(acc, o.mul(int(a), o.frob[int(b)]))
        return acc

    def span(self, rows):
        return Subspace(self, rref([[int(x) for x in r] for r in rows], self.ops) if len(rows) else ())

    def whole(self):
        return self.span([[1 if i == j else 0 for j in range(self.d)] for i in range(self.d)])

    def zero(self):
        return Subspace(self, ())


@dataclass(frozen=True)
class Subspace:
    space: HermSpace
    rows: tuple

    @property
    def dim(self):
        return len(self.rows)

    def contains(self, other):
        o = self.space.ops
        return rank(list(self.rows) + list(other.rows), o) == self.dim

    def __le__(self, other):
        return other.contains(self)

    def __repr__(self):
        return f"Subspace(dim={self.dim}, rows={self.rows})"


def _check_same(U, W):
    if U.space != W.space:
        raise ValueError("subspaces live in different ambient spaces")


def form(space, x, y):
    return space.form(x, y)


def apply_coords(U, table):
    return U.space.span([[table[x] for x in r] for r in U.rows]) if U.rows else U


def tau(U, k=1):
    """Coordinatewise p^{2k}-power map."""
    o = U.space.ops
    V = U
    for _ in range(k % U.space.m if U.space.m else 0):
        V = apply_coords(V, o.tau)
    return V


def sigma(U, k=1):
    o = U.space.ops
    table = o.frob if k >= 0 else o.frob_inv
    V = U
    for _ in range(abs(k)):
        V = apply_coords(V, table)
    return V


def perp(U):
    """{y : form(u, y) = 0 for all u in U}."""
    S = U.space
    o = S.ops
    N = nullspace(list(U.rows), S.d, o) if U.rows else S.whole().rows
    return sigma(Subspace(S, N), -1)


def perp_first(U):
    """{x : form(x, u) = 0 for all u in U} (orthogonal in the first slot)."""
    S = U.space
    o = S.ops
    twisted = [[o.frob[x] for x in r] for r in U.rows]
    N = nullspace(twisted, S.d, o) if twisted else S.whole().rows
    return Subspace(S, N)


def meet(U, W):
    _check_same(U, W)
    S = U.space
    o = S.ops
    nu = nullspace(list(U.rows), S.d, o) if U.rows else S.whole().rows
    nw = nullspace(list(W.rows), S.d, o) if W.rows else S.whole().rows
    both = list(nu) + list(nw)
    if not both:
        return S.whole()
    return Subspace(S, nullspace(both, S.d, o))


def join(U, W):
    _check_same(U, W)
    return U.space.span(list(U.rows) + list(W.rows))


def is_isotropic_line(U):
    return U.dim == 1 and U.space.form(U.rows[0], U.rows[0]) == 0


def in_y_minus(U):
    return U.dim == 3 and U.contains(perp(U))


def classify_minus(U):
    """Stratum of a point of Y^(-) computed from meets with tau-translates."""
    if not in_y_minus(U):
        raise ValueError("classify_minus needs dim U = 3 and perp(U) inside U")
    tU = tau(U)
    if tU == U:
        return StratumLabel.UNIT
    W = meet(U, tU)
    if W.dim == 2 and tau(W) == W:
        return StratumLabel.W1
    if meet(W, tau(tU)).dim != 1:
        raise ArithmeticError("triple intersection is not a line")
    return StratumLabel.W2


def classify_plus(U):
    if not is_isotropic_line(U):
        raise ValueError("classify_plus needs an isotropic line")
    return classify_minus(perp(U))


def classify_line_direct(U):
    """Label of an isotropic line from U, tau U, tau^2 U without passing to perp."""
    tU = tau(U)
    if tU == U:
        return StratumLabel.UNIT
    J = join(U, tU)
    return StratumLabel.W1 if tau(J) == J else StratumLabel.W2


# ---------------------------------------------------------------------------
# batch enumeration and labelling


def _norm_preimages(F):
    """Sorted preimage lists of x -> x^{p+1}: (order, start) arrays."""
    P = F.norm_t
    order = np.argsort(P, kind="stable").astype(np.int64)
    start = np.searchsorted(P[order], np.arange(F.q + 1)).astype(np.int64)
    return order, start


@njit
def _enum_isotropic_kernel(P, neg, add, order, start, q):
    # first pass: count
    count = 0
    t = neg[1]
    count += start[t + 1] - start[t]
    for b in range(q):
        t = neg[add[1, P[b]]]
        count += start[t + 1] - start[t]
    for a in range(q):
        for b in range(q):
            t = neg[add[1, add[P[a], P[b]]]]
            count += start[t + 1] - start[t]
    out = np.empty((count, 4), dtype=np.int64)
    k = 0
    t = neg[1]
    for j in range(start[t], start[t + 1]):
        out[k, 0] = 0
        out[k, 1] = 0
        out[k, 2] = 1
        out[k, 3] = order[j]
        k += 1
    for b in range(q):
        t = neg[add[1, P[b]]]
        for j in range(start[t], start[t + 1]):
            out[k, 0] = 0
            out[k, 1] = 1
            out[k, 2] = b
            out[k, 3] = order[j]
            k += 1
    for a in range(q):
        for b in range(q):
            t = neg[add[1, add[P[a], P[b]]]]
            for j in range(start[t], start[t + 1]):
                out[k, 0] = 1
                out[k, 1] = a
                out[k, 2] = b
                out[k, 3] = order[j]
                k += 1
    return out


def _enum_isotropic_numpy(F):
    q = F.q
    P = F.norm_t
    order, start = _norm_preimages(F)
    blocks = []

    def emit(prefix, targets):
        # prefix: (k, j) array of leading coordinates; targets: required c^{p+1}
        cnt = start[targets + 1] - start[targets]
        rep = np.repeat(np.arange(len(targets)), cnt)
        first = np.repeat(start[targets], cnt)
        offs = np.arange(cnt.sum()) - np.repeat(np.cumsum(cnt) - cnt, cnt)
        c = order[first + offs]
        blocks.append(np.column_stack([prefix[rep], c]))

    emit(np.array([[0, 0, 1]]), np.array([F.neg[1]]))
    b = np.arange(q)
    emit(np.column_stack([np.zeros(q, int), np.ones(q, int), b]), F.neg[F.add(np.ones(q, int), P[b])])
    a, bb = np.divmod(np.arange(q * q), q)
    t = F.neg[F.add(np.ones(q * q, int), F.add(P[a], P[bb]))]
    emit(np.column_stack([np.ones(q * q, int), a, bb]), t)
    return np.vstack(blocks).astype(np.int64)


@lru_cache(maxsize=None)
def _isotropic_cached(p, m, use_kernel):
    F = field(p, m)
    if use_kernel and F.add_table is not None:
        order, start = _norm_preimages(F)
        X = _enum_isotropic_kernel(F.norm_t, F.neg, F.add_table, order, start, F.q)
    else:
        X = _enum_isotropic_numpy(F)
    X.setflags(write=False)
    return X


def enumerate_isotropic_vectors(p, m, use_kernel=None):
    """Canonical representatives (first nonzero entry 1) of all isotropic lines, lexicographic."""
    if p ** (6 * m) > DESK_BOUND:
        raise ValueError(f"p^(6m) = {p ** (6 * m)} exceeds the desk-scale bound {DESK_BOUND}")
    if use_kernel is None:
        use_kernel = HAVE_NUMBA
    return _isotropic_cached(p, m, bool(use_kernel))


def enumerate_isotropic_lines(p, m):
    S = HermSpace(p, m)
    return [Subspace(S, (tuple(int(x) for x in r),)) for r in enumerate_isotropic_vectors(p, m)]


def enumerate_y_minus(p, m):
    """Points of Y^(-) as perps of the isotropic lines (same order)."""
    return [perp(U) for U in enumerate_isotropic_lines(p, m)]


def count_isotropic_bruteforce(p, m):
    """Independent count: test every point of P^3 with the form directly."""
    F = field(p, m)
    q = F.q
    P = F.norm_t
    total = 0
    for lead in range(4):
        free = 3 - lead
        if free == 0:
            continue
        grids = np.meshgrid(*([np.arange(q)] * free), indexing="ij")
        acc = np.full(grids[0].shape, 1, dtype=np.int64)
        for g in grids:
            acc = F.add(acc, P[g])
        total += int(np.count_nonzero(acc == 0))
    return total


def hermitian_surface_count(p, m):
    """Point count of the Fermat surface of degree p+1 over F_{p^{2m}}.

    The surface is maximal over F_{p^2}: every eigenvalue of the p^2-Frobenius
    on its p^3 - p^2 + p primitive H^2 classes is p^2.  Raising to the m-th
    power gives 1 + Q + Q^2 + (p^3 - p^2 + p) Q with Q = p^{2m}.
    """
    Q = p ** (2 * m)
    return 1 + (p ** 3 - p ** 2 + p + 1) * Q + Q * Q


@njit
def _classify_kernel(X, tau_t, add, mul, neg, inv):
    n = X.shape[0]
    out = np.empty(n, dtype=np.int64)
    for i in range(n):
        same = True
        for j in range(4):
            if tau_t[X[i, j]] != X[i, j]:
                same = False
                break
        if same:
            out[i] = 0
            continue
        piv = -1
        dj = 0
        for j in range(4):
            d = add[tau_t[X[i, j]], neg[X[i, j]]]
            if d != 0:
                piv = j
                dj = d
                break
        e_p = add[tau_t[tau_t[X[i, piv]]], neg[X[i, piv]]]
        c = mul[e_p, inv[dj]]
        ok = True
        for j in range(4):
            x = X[i, j]
            d = add[tau_t[x], neg[x]]
            e = add[tau_t[tau_t[x]], neg[x]]
            if e != mul[c, d]:
                ok = False
                break
        out[i] = 1 if ok else 2
    return out


def _classify_numpy(F, X):
    t1 = F.frob(F.frob(X))
    t2 = F.frob(F.frob(t1))
    unit = np.all(t1 == X, axis=1)
    d = F.sub(t1, X)
    e = F.sub(t2, X)
    nz = d != 0
    piv = np.argmax(nz, axis=1)
    rows = np.arange(len(X))
    dj = np.where(unit, 1, d[rows, piv])
    c = F.mul(e[rows, piv], F.inv(dj))
    w1 = np.all(e == F.mul(c[:, None], d), axis=1)
    out = np.where(unit, 0, np.where(w1, 1, 2))
    return out.astype(np.int64)


def classify_vectors(p, m, X, use_kernel=None):
    """Label codes 0/1/2 (unit/w1/w2) for canonical isotropic vectors.

    A line <x> is unit iff tau x = x, w1 iff tau^2 x lies in span(x, tau x).
    The hyperplane perp(<x>) gets the same code, since its dot-normal is
    sigma^{-1}(x) and sigma commutes with tau.
    """
    F = field(p, m)
    if use_kernel is None:
        use_kernel = HAVE_NUMBA
    X = np.ascontiguousarray(X, dtype=np.int64)
    if use_kernel and F.add_table is not None:
        tau_t = F.frob_t[F.frob_t]
        return _classify_kernel(X, tau_t, F.add_table, F.mul_table, F.neg, F.inv_t)
    return _classify_numpy(F, X)


def stratum_counts(p, m, side="minus"):
    X = enumerate_isotropic_vectors(p, m)
    codes = classify_vectors(p, m, X)
    c = np.bincount(codes, minlength=3)
    return {"unit": int(c[0]), "w1": int(c[1]), "w2": int(c[2])}


# ---------------------------------------------------------------------------
# rational isotropic planes and the projective-line model


def rational_isotropic_planes(p, m):
    """tau-stable totally isotropic planes, found over F_{p^2} and base-changed."""
    S = HermSpace(p, m)
    S1 = HermSpace(p, 1)
    emb = embed_subfield_table(p, m)
    X = enumerate_isotropic_vectors(p, 1)
    o1 = S1.ops
    planes = set()
    lines = [tuple(int(v) for v in r) for r in X]
    for i, x in enumerate(lines):
        for y in lines[i + 1:]:
            if S1.form(x, y) == 0 and S1.form(y, y) == 0:
                planes.add(rref([x, y], o1))
    out = sorted(planes)
    return [S.span([[int(emb[v]) for v in r] for r in W]) for W in out]


@lru_cache(maxsize=None)
def embed_subfield_table(p, m):
    """Field embedding F_{p^2} -> F_{p^{2m}} as an index table."""
    F1, F = field(p, 1), field(p, m)
    # image of the generator: a root of F1's defining polynomial in F
    f = F1.poly
    for r in range(F.q):
        acc = 0
        for c in reversed(f):
            acc = int(F.add(F.mul(acc, r), F.from_int(c)))
        if acc == 0:
            root = r
            break
    table = np.zeros(F1.q, dtype=np.int64)
    for a in range(F1.q):
        acc = 0
        for c in reversed([int(x) for x in F1.digits[a]]):
            acc = int(F.add(F.mul(acc, root), F.from_int(c)))
        table[a] = acc
    return table


@dataclass(frozen=True)
class P1Point:
    rep: tuple
    tau_fixed: bool


def p1_points(p, m):
    """All lines of a 2-dimensional space over F_{p^{2m}} with tau-fixed flags."""
    F = field(p, m)
    tau_t = F.frob_t[F.frob_t]
    pts = [P1Point((0, 1), True)]
    for a in range(F.q):
        pts.append(P1Point((1, a), bool(tau_t[a] == a)))
    return pts


# ---------------------------------------------------------------------------
# orthonormal frames


def hermitian_frame(G, p):
    """Rows C over F_{p^2} with C G C^* = identity, for a nondegenerate hermitian G.

    G is a d x d matrix of F_{p^2} field ints with G[j][i] = G[i][j]^p.
    """
    o = ops(p, 1)
    d = len(G)

    def f(x, y):
        acc = 0
        for i in range(d):
            if x[i] == 0:
                continue
            for j in range(d):
                if y[j]:
                    acc = o.add(acc, o.mul(o.mul(x[i], G[i][j]), o.frob[y[j]]))
        return acc

    basis = [[1 if i == j else 0 for j in range(d)] for i in range(d)]
    frame = []
    while basis:
        pick = None
        for v in basis:
            if f(v, v):
                pick = v
                break
        if pick is None:
            found = False
            for i in range(len(basis)):
                for j in range(len(basis)):
                    if i != j and f(basis[i], basis[j]):
                        for lam in range(1, o.q):
                            w = [o.add(a, o.mul(lam, b)) for a, b in zip(basis[i], basis[j])]
                            if f(w, w):
                                pick = w
                                found = True
                                break
                    if found:
                        break
                if found:
                    break
            if pick is None:
                raise ValueError("degenerate hermitian form")
        nrm = f(pick, pick)
        # scale by c with c^{p+1} = nrm^{-1}
        target = o.inv[nrm]
        c = next(c for c in range(1, o.q) if o.mul(c, o.frob[c]) == target)
        e = [o.mul(c, x) for x in pick]
        frame.append(e)
        # project the rest onto the complement of e
        rest = []
        for v in basis:
            coef = f(v, e)
            w = [o.sub(a, o.mul(coef, b)) for a, b in zip(v, e)]
            if any(w):
                rest.append(w)
        basis = [list(r) for r in rref(rest, o)] if rest else []
    return frame
