"""Window lattices in W^4 and W_0^4 with the hermitian and Dieudonne structure.

A lattice L with p^A L_std <= L <= p^{-A} L_std is stored through S = p^A L,
which sits between p^K W^4 and W^4 for K = 2A, by the canonical Hermite form of
S / p^K W^4 over the Galois ring GR(p^K, 2m).  Equal lattices have equal
(v, H), so lattices hash and compare by value.

Conventions
-----------
* form(x, y) = sum x_i sigma(y_i), identity Gram matrix.
* dual(L) = {x : form(x, L) integral}; dual(dual(L)) = tau(L) with tau = sigma^2.
* vol(L) = valuation of the determinant of a basis, so vol(p L) = vol(L) + 4
  and colength(X <= Y) = vol(X) - vol(Y).
* Split case: F(x) = sigma(x) B and V(y) = sigma^{-1}(y B) with
  B = diag(J, J), J = [[0, 1], [p, 0]], so FV = VF = p and V^{-1}F = sigma^2.
  On tau-rational vectors Pi = F.
"""

from dataclasses import dataclass, field as dc_field
from functools import lru_cache
from itertools import product

import numpy as np

from . import _latkern as K_
from .gf import galois_ring, subring_generator
from .hermitian import embed_subfield_table, hermitian_frame, ops, rref

DESK_BOUND = 2 * 10 ** 6


class WindowError(ValueError):
    """A lattice does not fit in the window of its context."""


class PrecisionError(ArithmeticError):
    """Back substitution lost precision; the window must be enlarged."""


class ContradictionError(RuntimeError):
    """A structural statement about vertex hulls failed on an explicit lattice."""


class BoundError(ValueError):
    """An enumeration would exceed the desk-scale bound."""


# ---------------------------------------------------------------------------
# contexts


class LatticeContext:
    """Arithmetic for window-A lattices over W(F_{p^{2m}}) truncated at p^{2A}."""

    def __init__(self, p, m, A):
        if A < 0:
            raise ValueError("window must be nonnegative")
        self.p, self.m, self.A = p, m, A
        self.K = K = max(2 * A, 1)
        self.R = galois_ring(p, m, K)
        self.Rc = galois_ring(p, m, K + 1)
        self.n = self.R.n
        F = self.R.F
        self.F = F
        self.digits = F.digits.astype(np.int64)
        self.inv_t = F.inv_t.astype(np.int64)
        self.pw = F.pw.astype(np.int64)
        self.sig = {k: self.R.sigma_matrix(k) for k in (1, 2, -1, -2)}
        self._std = None

    def __repr__(self):
        return f"LatticeContext(p={self.p}, m={self.m}, A={self.A})"

    def ring(self, N):
        """GR(p^N, 2m), or PrecisionError when p^N no longer fits the kernels."""
        try:
            return galois_ring(self.p, self.m, N)
        except OverflowError as exc:
            raise PrecisionError(f"precision p^{N} is too large; shrink the window") from exc

    # -- construction
    def _hnf(self, G, R=None):
        R = R or self.R
        return K_.hnf(np.ascontiguousarray(G, dtype=np.int64), self.p, R.N, R.red, R.M,
                      self.digits, self.inv_t, self.pw)

    def from_stored(self, G, check=True):
        """Lattice whose stored module S = p^A L is generated by the rows G."""
        G = np.asarray(G, dtype=np.int64).reshape(-1, 4, self.n)
        if check:
            Gc = G % self.Rc.M
            vc, Hc = self._hnf(Gc, self.Rc)
            pk = np.zeros((4, self.n), dtype=np.int64)
            for i in range(4):
                pk[:] = 0
                pk[i, 0] = self.p ** self.K
                if not K_.member(pk, vc, Hc, self.p, self.Rc.N, self.Rc.red, self.Rc.M):
                    raise WindowError(f"lattice leaves the window A={self.A}")
        v, H = self._hnf(G)
        return Lattice(self, tuple(int(x) for x in v), H)

    def from_rows(self, rows, denom=0, check=True):
        """Lattice spanned by p^{-denom} * rows, rows given as W-vectors (r, 4, n)."""
        if denom > self.A:
            raise WindowError("denominator exceeds the window")
        rows = np.asarray(rows, dtype=np.int64).reshape(-1, 4, self.n)
        return self.from_stored(rows * self.p ** (self.A - denom), check=check)

    def from_int_rows(self, rows, denom=0, check=True):
        """Same as from_rows for rows of rational integers (4 entries each)."""
        rows = np.asarray(rows, dtype=np.int64).reshape(-1, 4)
        full = np.zeros(rows.shape + (self.n,), dtype=np.int64)
        full[..., 0] = rows
        return self.from_rows(full, denom, check)

    def standard(self, shift=0):
        """p^shift * L_std."""
        if self._std is None:
            self._std = self.from_int_rows(np.eye(4, dtype=np.int64))
        return self._std.scale(shift) if shift else self._std

    def scalar(self, c):
        z = np.zeros(self.n, dtype=np.int64)
        z[0] = c
        return z


@lru_cache(maxsize=None)
def context(p, m, A):
    return LatticeContext(p, m, A)


# ---------------------------------------------------------------------------
# lattices


@dataclass(frozen=True, eq=False)
class Lattice:
    ctx: LatticeContext
    v: tuple
    H: np.ndarray = dc_field(repr=False)

    @property
    def key(self):
        return (self.v, self.H.tobytes())

    def __eq__(self, other):
        return isinstance(other, Lattice) and other.ctx is self.ctx and self.key == other.key

    def __hash__(self):
        return hash(self.key)

    def __lt__(self, other):
        return self.sort_key() < other.sort_key()

    def sort_key(self):
        return (self.v, tuple(int(x) for x in self.H.reshape(-1)))

    def digest(self):
        """Canonical serialisation: pivots then entries in row-major digit order."""
        vals = [str(x) for x in self.v] + [str(int(x)) for x in self.H.reshape(-1)]
        return ".".join(vals)

    # -- invariants
    @property
    def vol(self):
        return sum(self.v) - 4 * self.ctx.A

    def contains(self, other, scale=0):
        """Whether p^scale * other <= self."""
        c = self.ctx
        return bool(K_.contains_rows(np.asarray(self.v, dtype=np.int64), self.H, other.H, scale,
                                     c.p, c.K, c.R.red, c.R.M))

    def __le__(self, other):
        return other.contains(self)

    def contains_vector(self, x, denom=0):
        """Whether p^{-denom} x (x a W-vector (4, n)) lies in the lattice."""
        c = self.ctx
        x = np.asarray(x, dtype=np.int64).reshape(4, c.n) * c.p ** (c.A - denom)
        return bool(K_.member(x, np.asarray(self.v, dtype=np.int64), self.H, c.p, c.K, c.R.red, c.R.M))

    # -- operations
    def __add__(self, other):
        return self.ctx.from_stored(np.concatenate([self.H, other.H]), check=False)

    def sharp(self):
        c = self.ctx
        # back substitution divides by every pivot but the last one it meets
        R2 = c.ring(c.K + sum(self.v) - min(self.v) + 1)
        rows, ok = K_.sharp_rows(np.asarray(self.v, dtype=np.int64), self.H, c.p, c.K, R2.red, R2.M)
        if not ok:
            raise PrecisionError("back substitution was not exact")
        return c.from_stored(rows, check=False)

    def sigma(self, k=1):
        c = self.ctx
        k %= c.n
        if k == 0:
            return self
        S = c.sig.get(k)
        if S is None:
            S = c.R.sigma_matrix(k)
        return c.from_stored(K_.apply_coeff_matrix(self.H, S, c.R.M), check=False)

    def tau(self, k=1):
        return self.sigma(2 * k)

    def dual(self):
        return self.sigma(1).sharp()

    def meet(self, other):
        return (self.sharp() + other.sharp()).sharp()

    def __and__(self, other):
        return self.meet(other)

    def scale(self, k):
        """p^k * self (must stay in the window)."""
        c = self.ctx
        if k >= 0:
            return c.from_stored(self.H * c.p ** k, check=True)
        # p^{-k} L: divide stored rows; legal only when every entry is divisible
        d = c.p ** (-k)
        if np.any(self.H % d):
            # the scaled lattice may still fit if it is generated differently
            rows = self.sharp().H * d
            return c.from_stored(rows, check=True).sharp()
        return c.from_stored(self.H // d, check=True)

    def is_tau_stable(self):
        return self.tau() == self

    def in_window(self, a):
        """p^a L_std <= L <= p^{-a} L_std."""
        c = self.ctx
        if a > c.A:
            return True
        upper_ok = not np.any(self.H % c.p ** (c.A - a))
        low = c.standard()
        lower_ok = self.contains(low, scale=a)
        return bool(upper_ok and lower_ok)

    def basis(self):
        """Basis rows as (rows, denom) with L = p^{-denom} * span(rows)."""
        return self.H.copy(), self.ctx.A

    def __repr__(self):
        return f"Lattice(vol={self.vol}, v={self.v})"


def colength(X, Y):
    """Length of Y / X for X <= Y."""
    if not Y.contains(X):
        raise ValueError("colength needs X contained in Y")
    return X.vol - Y.vol


def dual(L):
    return L.dual()


def std(ctx):
    return ctx.standard()


# ---------------------------------------------------------------------------
# embedding tau-rational lattices into a larger coefficient field


@lru_cache(maxsize=None)
def _embed_matrix(p, m, K):
    R = galois_ring(p, m, K)
    g = subring_generator(R, 2)
    E = np.zeros((2, R.n), dtype=np.int64)
    E[0, 0] = 1
    E[1] = g % R.M
    return E


def embed_rows(rows, small, big):
    """Map W_0-vectors (coefficients over GR(p^K, 2)) into the big ring."""
    if small.K != big.K or small.p != big.p:
        raise ValueError("contexts must share p and precision")
    E = _embed_matrix(big.p, big.m, big.K)
    return K_.apply_coeff_matrix(np.asarray(rows, dtype=np.int64).reshape(-1, 4, 2), E, big.R.M)


def embed(L, big):
    return big.from_stored(embed_rows(L.H, L.ctx, big), check=False)


# ---------------------------------------------------------------------------
# form values and quotient coordinates (small, exact, Python level)


def _ring_mul(R, a, b):
    return R.mul(a, b)


def form_values(ctx, X, Y):
    """Matrix of sum_k X_ik sigma(Y_jk) over the high-precision ring, for stored rows."""
    R2 = ctx.ring(2 * ctx.A + 2)
    X = np.asarray(X, dtype=np.int64) % R2.M
    Ys = R2.sigma(np.asarray(Y, dtype=np.int64) % R2.M, 1)
    out = np.zeros((X.shape[0], Ys.shape[0], ctx.n), dtype=np.int64)
    for i in range(X.shape[0]):
        for j in range(Ys.shape[0]):
            out[i, j] = R2.mul(X[i], Ys[j]).sum(axis=0) % R2.M
    return out


def gram_mod_p(ctx, X, shift):
    """Residues of p^shift * form(x_i, x_j) for the lattice vectors x_i = X_i / p^A."""
    p = ctx.p
    R2 = ctx.ring(2 * ctx.A + 2)
    vals = form_values(ctx, X, X)
    e = shift - 2 * ctx.A
    if e >= 0:
        vals = (vals * p ** e) % R2.M
    else:
        d = p ** (-e)
        if np.any(vals % d):
            raise ValueError("form is not integral at the requested scale")
        vals = vals // d
    return (vals % p) @ ctx.pw


def coords_mod_p(ctx, upper, X):
    """Residues of the coordinates of stored vectors X in the basis of `upper`."""
    p = ctx.p
    R2 = ctx.ring(sum(upper.v) + 1)
    H = upper.H % R2.M
    out = np.zeros((len(X), 4), dtype=np.int64)
    for r, x in enumerate(np.asarray(X, dtype=np.int64)):
        x = x % R2.M
        cs = []
        for j in range(4):
            s = x[j].copy()
            for i, c in enumerate(cs):
                s = (s - R2.mul(c, H[i, j])) % R2.M
            d = p ** upper.v[j]
            if np.any(s % d):
                raise ValueError("vector is not in the lattice")
            cs.append(s // d)
        out[r] = [int((c % p) @ ctx.pw) for c in cs]
    return out


def lift_field_rows(ctx, C):
    """Coefficientwise lift of field-int arrays to (..., n) ring arrays."""
    return ctx.digits[np.asarray(C, dtype=np.int64)]


def combine(ctx, C, basis):
    """Rows sum_i lift(C_ri) * basis_i for field-int coefficients C (P, k)."""
    R = ctx.R
    L = lift_field_rows(ctx, C)  # (P, k, n)
    B = np.asarray(basis, dtype=np.int64)  # (k, 4, n)
    out = np.zeros((L.shape[0], 4, ctx.n), dtype=np.int64)
    for i in range(B.shape[0]):
        out = (out + R.mul(L[:, i, None, :], B[None, i, :, :])) % R.M
    return out


@dataclass(frozen=True)
class Quotient:
    """upper / lower as an F_{p^2}-space with an optional hermitian form.

    `basis` holds stored vectors of `upper` whose images form a basis of the
    quotient; `gram` is the form p^shift * form(., .) mod p on that basis.
    """

    lower: Lattice
    upper: Lattice
    basis: np.ndarray
    gram: tuple

    @property
    def dim(self):
        return len(self.basis)


def quotient(lower, upper, shift=None):
    """The quotient upper/lower (killed by p) over the residue field of the context."""
    ctx = upper.ctx
    p = ctx.p
    if not upper.contains(lower) or not lower.contains(upper, scale=1):
        raise ValueError("quotient needs p*upper <= lower <= upper")
    o = ops(p, ctx.m)
    cl = coords_mod_p(ctx, upper, lower.H)
    W = rref([list(map(int, r)) for r in cl], o)
    pivots = set()
    for r in W:
        pivots.add(next(i for i, x in enumerate(r) if x))
    free = [j for j in range(4) if j not in pivots]
    basis = upper.H[free].copy() if free else np.zeros((0, 4, ctx.n), dtype=np.int64)
    gram = ()
    if shift is not None and free:
        G = gram_mod_p(ctx, basis, shift)
        gram = tuple(tuple(int(x) for x in r) for r in G)
    return Quotient(lower, upper, basis, gram)


def preimage(Q, C):
    """Lattice lower + lift(span of rows C) for field-int rows C in quotient coordinates."""
    ctx = Q.upper.ctx
    C = np.asarray(C, dtype=np.int64).reshape(-1, Q.dim)
    rows = combine(ctx, C, Q.basis) if len(C) else np.zeros((0, 4, ctx.n), dtype=np.int64)
    return ctx.from_stored(np.concatenate([Q.lower.H, rows]), check=False)


# ---------------------------------------------------------------------------
# subspace enumeration over F_{p^2} (rational objects only)


def _projective_points(o, d):
    pts = []
    for lead in range(d):
        for tail in product(range(o.q), repeat=d - lead - 1):
            pts.append(tuple([0] * lead + [1] + list(tail)))
    return pts


def _hform(o, G, x, y):
    acc = 0
    for i, xi in enumerate(x):
        if xi == 0:
            continue
        for j, yj in enumerate(y):
            if yj:
                acc = o.add(acc, o.mul(o.mul(xi, G[i][j]), o.frob[yj]))
    return acc


def isotropic_lines(o, G):
    return list(_isotropic_lines_cached(o.p, o.m, tuple(tuple(r) for r in G)))


@lru_cache(maxsize=None)
def _isotropic_lines_cached(p, m, G):
    o = ops(p, m)
    d = len(G)
    return tuple(x for x in _projective_points(o, d) if _hform(o, G, x, x) == 0)


def lagrangian_planes(o, G):
    return list(_lagrangian_cached(o.p, o.m, tuple(tuple(r) for r in G)))


@lru_cache(maxsize=None)
def _lagrangian_cached(p, m, G):
    o = ops(p, m)
    lines = _isotropic_lines_cached(p, m, G)
    planes = set()
    for i, x in enumerate(lines):
        for y in lines[i + 1:]:
            if _hform(o, G, x, y) == 0:
                planes.add(rref([list(x), list(y)], o))
    return tuple(sorted(planes))


def all_lines(o, d):
    return _projective_points(o, d)


# ---------------------------------------------------------------------------
# inert case: RZ points, vertex lattices and hulls

INERT_TYPES = ("1", "02", "3")


@dataclass(frozen=True)
class VertexLat:
    lattice: Lattice
    kind: str  # "1", "02", "3" (inert) or "split"

    def __lt__(self, other):
        return (self.kind, self.lattice.sort_key()) < (other.kind, other.lattice.sort_key())


def vertex_type(L):
    """Type of a tau-stable lattice from colengths of pL^dual <= L <= L^dual, or None."""
    if not L.is_tau_stable():
        return None
    Ld = L.dual()
    if not Ld.contains(L) or not L.contains(Ld, scale=1):
        return None
    pattern = ((Ld.vol + 4) - L.vol, L.vol - Ld.vol)
    return {(4, 0): "1", (2, 2): "02", (0, 4): "3"}.get(pattern)


def is_rz_point_inert(D, strict_tau=True):
    """pD^dual <2 D <2 D^dual, plus tau(D) <= D^dual when strict_tau."""
    Dd = D.dual()
    if not Dd.contains(D) or D.vol - Dd.vol != 2:
        return False
    if not D.contains(Dd, scale=1):
        return False
    if strict_tau and not Dd.contains(D.tau()):
        return False
    return True


def chain_colengths(chain):
    """Colengths along p^{s_0} X_0 <= p^{s_1} X_1 <= ..., or None if a step fails.

    `chain` is a list of (lattice, s) with s nonincreasing.
    """
    out = []
    for (X, sx), (Y, sy) in zip(chain, chain[1:]):
        if sx < sy or not Y.contains(X, scale=sx - sy):
            return None
        out.append((X.vol + 4 * sx) - (Y.vol + 4 * sy))
    return tuple(out)


SUM_CHAIN = (1, 2, 1, 0, 1)
MEET_CHAIN = (1, 0, 1, 2, 1)


def vertex_hull_inert(D):
    """(hull, case) with case in {'self', 'sum', 'intersection'} for an RZ point D."""
    tD = D.tau()
    if tD == D:
        if vertex_type(D) != "02":
            raise ContradictionError("tau-stable RZ point is not a {0,2} vertex lattice")
        return VertexLat(D, "02"), "self"
    S = D + tD
    if S.vol < D.vol - 1:
        raise ContradictionError("D + tau(D) exceeds D by more than one step")
    Dd = D.dual()
    if S.tau() == S:
        Sd = S.dual()
        # pL^dual <1 pD^dual <2 D <1 L <0 L^dual <1 D^dual
        ch = chain_colengths([(Sd, 1), (Dd, 1), (D, 0), (S, 0), (Sd, 0), (Dd, 0)])
        if ch != SUM_CHAIN or vertex_type(S) != "1":
            raise ContradictionError(f"sum hull has index chain {ch}")
        return VertexLat(S, "1"), "sum"
    I = D & tD
    if I.tau() != I:
        raise ContradictionError("neither D + tau(D) nor D meet tau(D) is tau-stable")
    Id = I.dual()
    # pD^dual <1 pL^dual <0 L <1 D <2 D^dual <1 L^dual
    ch = chain_colengths([(Dd, 1), (Id, 1), (I, 0), (D, 0), (Dd, 0), (Id, 0)])
    if ch != MEET_CHAIN or vertex_type(I) != "3":
        raise ContradictionError(f"intersection hull has index chain {ch}")
    return VertexLat(I, "3"), "intersection"


def bt_stratum(D):
    """Bruhat-Tits stratum of an inert RZ point: '02', '13', '1' or '3'.

    '13' means both D + tau(D) and D meet tau(D) are tau-stable, so D lies on a
    type-1 and a type-3 stratum at once; '1' and '3' are the open parts.
    """
    tD = D.tau()
    if tD == D:
        return "02"
    S = D + tD
    I = D & tD
    s, i = S.tau() == S, I.tau() == I
    if s and i:
        return "13"
    if s:
        return "1"
    if i:
        return "3"
    raise ContradictionError("RZ point without a tau-stable hull")


# ---------------------------------------------------------------------------
# inert vertex lattices by walking the building


def _rational_ctx(p, A):
    return context(p, 1, A)


def framed(Q):
    """Q with its basis replaced by lifts of an orthonormal frame (identity Gram)."""
    ctx = Q.upper.ctx
    C = hermitian_frame([list(r) for r in Q.gram], ctx.p)
    vecs = combine(ctx, np.asarray(C, dtype=np.int64), Q.basis)
    d = len(C)
    eye = tuple(tuple(1 if i == j else 0 for j in range(d)) for i in range(d))
    return Quotient(Q.lower, Q.upper, vecs, eye)


def preimages(Q, Cs):
    """Lattices lower + lift(rows of C) for a batch of coefficient blocks Cs (P, k, d)."""
    ctx = Q.upper.ctx
    Cs = np.asarray(Cs, dtype=np.int64)
    if len(Cs) == 0:
        return []
    P_, k, d = Cs.shape
    rows = combine(ctx, Cs.reshape(P_ * k, d), Q.basis).reshape(P_, k, 4, ctx.n)
    low = np.broadcast_to(Q.lower.H, (P_,) + Q.lower.H.shape)
    G = np.ascontiguousarray(np.concatenate([low, rows], axis=1))
    V, Hs = K_.hnf_batch(G, ctx.p, ctx.K, ctx.R.red, ctx.R.M, ctx.digits, ctx.inv_t, ctx.pw)
    return [Lattice(ctx, tuple(int(x) for x in V[i]), Hs[i]) for i in range(P_)]


@lru_cache(maxsize=None)
def standard_objects(p, m, d):
    """Isotropic lines, their first-slot perps and Lagrangian planes for the identity form."""
    o = ops(p, m)
    eye = tuple(tuple(1 if i == j else 0 for j in range(d)) for i in range(d))
    lines = _isotropic_lines_cached(p, m, eye)
    perps = tuple(tuple(tuple(r) for r in _perp_first_rows(o, eye, [x])) for x in lines)
    planes = _lagrangian_cached(p, m, eye) if d == 4 else ()
    return lines, perps, planes


def type1_down(L1):
    """Type-{0,2} and type-3 lattices inside a type-1 lattice (rational)."""
    Q = framed(quotient(L1.scale(1), L1, shift=0))
    lines, perps, planes = standard_objects(L1.ctx.p, 1, 4)
    # U = {u : form(u, x) = 0} is the 3-space of Y^(-) attached to the line x
    return preimages(Q, perps), preimages(Q, planes)


def type3_up(L3):
    Q = framed(quotient(L3, L3.dual(), shift=1))
    lines, perps, planes = standard_objects(L3.ctx.p, 1, 4)
    return preimages(Q, [[x] for x in lines]), preimages(Q, planes)


def type02_neighbors(D):
    """(type-1 lattices above, type-3 lattices below) a {0,2} lattice."""
    Dd = D.dual()
    lines, _, _ = standard_objects(D.ctx.p, 1, 2)
    Qu = framed(quotient(D, Dd, shift=1))
    Ql = framed(quotient(Dd.scale(1), D, shift=0))
    return preimages(Qu, [[x] for x in lines]), preimages(Ql, [[x] for x in lines])


def type02_line_census(D):
    """Counts of lines in D^dual/D: all lines, and those whose preimage is self-dual."""
    o = ops(D.ctx.p, 1)
    Qu = quotient(D, D.dual(), shift=1)
    lines = all_lines(o, Qu.dim)
    selfdual = [x for x in lines if vertex_type(preimage(Qu, [x])) == "1"]
    return len(lines), len(selfdual)


def _perp_first_rows(o, G, X):
    """Basis of {u : h(u, x) = 0 for x in X} for the hermitian Gram G."""
    d = len(G)
    # h(u, x) = sum_ij u_i G_ij x_j^p : linear functional in u with coefficients
    funcs = []
    for x in X:
        funcs.append([
            _sum(o, [o.mul(G[i][j], o.frob[x[j]]) for j in range(d)]) for i in range(d)
        ])
    from .hermitian import nullspace
    return [list(r) for r in nullspace(funcs, d, o)]


def _sum(o, xs):
    acc = 0
    for x in xs:
        acc = o.add(acc, x)
    return acc


def _in_window(L, a):
    return L.in_window(a)


def enumerate_vertex_lattices(p, m=1, a=1, case="inert", types=INERT_TYPES, bound=DESK_BOUND):
    """tau-stable lattices of the requested kinds with p^a L_std <= L <= p^{-a} L_std.

    Inert: a breadth-first walk over incidences 1-02, 1-3, 02-3 starting from
    L_std, restricted to the window.  Split: Pi-stable lattices of volume 0 or
    -1 reached through neighbors_split.  Lattices live in the rational
    (m = 1) context; use `embed` to move them to a larger field.
    """
    if case == "split":
        return _enumerate_split_vertices(p, a, bound)
    ctx = _rational_ctx(p, a + 1)
    start = ctx.standard()
    seen = {start: "1"}
    rejected = set()
    frontier = [start]
    while frontier:
        nxt = []
        for L in frontier:
            kind = seen[L]
            if kind == "1":
                a02, a3 = type1_down(L)
                found = [(x, "02") for x in a02] + [(x, "3") for x in a3]
            elif kind == "3":
                a02, a1 = type3_up(L)
                found = [(x, "02") for x in a02] + [(x, "1") for x in a1]
            else:
                up, down = type02_neighbors(L)
                found = [(x, "1") for x in up] + [(x, "3") for x in down]
            for X, k in found:
                if X in seen or X in rejected:
                    continue
                if not X.in_window(a):
                    rejected.add(X)
                    continue
                seen[X] = k
                nxt.append(X)
                if len(seen) > bound:
                    raise BoundError("vertex lattice enumeration exceeds the bound")
        frontier = nxt
    out = [VertexLat(L, k) for L, k in seen.items() if k in types]
    return sorted(out)


# ---------------------------------------------------------------------------
# split case operators


def _block(rows, p):
    out = np.empty_like(rows)
    out[:, 0] = p * rows[:, 1]
    out[:, 1] = rows[:, 0]
    out[:, 2] = p * rows[:, 3]
    out[:, 3] = rows[:, 2]
    return out


def F_rows(ctx, rows, R=None):
    """F(x) = sigma(x) B on stored rows."""
    R = R or ctx.R
    S = ctx.sig[1] if R is ctx.R else R.sigma_matrix(1)
    s = K_.apply_coeff_matrix(np.asarray(rows, dtype=np.int64), S, R.M)
    return _block(s, ctx.p) % R.M


def V_rows(ctx, rows, R=None):
    """V(y) = sigma^{-1}(y B) on stored rows."""
    R = R or ctx.R
    S = ctx.sig[-1] if R is ctx.R else R.sigma_matrix(-1)
    b = _block(np.asarray(rows, dtype=np.int64), ctx.p) % R.M
    return K_.apply_coeff_matrix(b, S, R.M)


def _apply_checked(L, rows_fn):
    """Image of L under a semilinear map, with the window checked one digit beyond K.

    The stored rows only determine L modulo p^K L_std, so the generators
    p^K e_i are appended before mapping; otherwise their images are lost.
    """
    c = L.ctx
    Rc = c.Rc
    top = np.zeros((4, 4, c.n), dtype=np.int64)
    for i in range(4):
        top[i, i, 0] = c.p ** c.K
    G = np.concatenate([L.H % Rc.M, top])
    return c.from_stored(rows_fn(c, G, Rc), check=True)


def F_op(L):
    return _apply_checked(L, F_rows)


def V_op(L):
    return _apply_checked(L, V_rows)


def Pi_op(L):
    """Pi on a tau-rational lattice (equal to F there)."""
    return F_op(L)


def Pi_inv(L):
    """Pi^{-1} = p^{-1} Pi."""
    return Pi_op(L).scale(-1)


def check_operator_identities(ctx):
    """F V = V F = p, V^{-1}F = sigma^2 and Pi^2 = p on every basis vector."""
    R = ctx.R
    E = np.zeros((4 * ctx.n, 4, ctx.n), dtype=np.int64)
    for j in range(4):
        for c in range(ctx.n):
            E[j * ctx.n + c, j, c] = 1
    p = ctx.p
    FV = F_rows(ctx, V_rows(ctx, E))
    VF = V_rows(ctx, F_rows(ctx, E))
    ok_fv = np.array_equal(FV, (p * E) % R.M) and np.array_equal(VF, (p * E) % R.M)
    # tau = V^{-1} F  <=>  V(sigma^2 x) = F(x)
    tau_x = K_.apply_coeff_matrix(E, ctx.sig[2], R.M)
    ok_tau = np.array_equal(V_rows(ctx, tau_x), F_rows(ctx, E))
    # Pi^2 = p on rational vectors (coefficients in the sub-ring GR(p^K, 2))
    small = context(p, 1, ctx.A)
    Es = np.zeros((8, 4, 2), dtype=np.int64)
    for j in range(4):
        for c in range(2):
            Es[j * 2 + c, j, c] = 1
    Pi2 = F_rows(small, F_rows(small, Es))
    ok_pi = np.array_equal(Pi2, (p * Es) % small.R.M)
    return {"FV": bool(ok_fv), "tau": bool(ok_tau), "Pi2": bool(ok_pi)}


def is_rz_point_split(M):
    """pM <2 VM <2 M and vol(M) = 0."""
    if M.vol != 0:
        return False
    try:
        VM = V_op(M)
    except WindowError:
        return False
    return M.contains(VM) and VM.vol - M.vol == 2 and VM.contains(M, scale=1)


def a_number(M):
    FM, VM = F_op(M), V_op(M)
    return (FM + VM).vol - M.vol


def vertex_hull_split(M):
    if a_number(M) == 2:
        if not M.is_tau_stable():
            raise ContradictionError("a(M) = 2 but M is not tau-stable")
        return VertexLat(M, "split")
    L = M + M.tau()
    if L.tau() != L:
        raise ContradictionError("M + tau(M) is not tau-stable")
    if not (L.contains(M) and M.contains(Pi_op_w(L)) and L.vol == M.vol - 1):
        raise ContradictionError("hull does not satisfy Pi L <1 M <1 L")
    return VertexLat(L, "split")


def Pi_op_w(L):
    """Pi on a tau-stable lattice over W (F restricted to rational vectors)."""
    return F_op(L)


def neighbors_split(L):
    """The p^2+1 lattices L0 with Pi L <1 L0 <1 L (rational, same context)."""
    PL = Pi_op(L)
    Q = quotient(PL, L)
    o = ops(L.ctx.p, 1)
    return [preimage(Q, [x]) for x in all_lines(o, Q.dim)]


def normalize_split(L):
    """Representative of L modulo Pi^Z with volume 0 or -1."""
    while L.vol > 0:
        L = Pi_inv(L)
    while L.vol < -1:
        L = Pi_op(L)
    return L


def split_tree_ball(p, radius, A=None):
    """BFS ball in the tree of Pi-stable lattices modulo Pi around L_std.

    Returns (vertices, edges, depth) with vertices in discovery order, edges as
    index pairs; adjacency is L0 in neighbors_split(L) up to Pi-normalisation.
    """
    A = A if A is not None else radius + 1
    ctx = context(p, 1, A)
    root = ctx.standard()
    index = {root: 0}
    verts, depth = [root], [0]
    edges = set()
    frontier = [root]
    for d in range(radius):
        nxt = []
        for L in frontier:
            for X in neighbors_split(L):
                Y = normalize_split(X)
                if Y not in index:
                    index[Y] = len(verts)
                    verts.append(Y)
                    depth.append(d + 1)
                    nxt.append(Y)
                i, j = index[L], index[Y]
                edges.add((min(i, j), max(i, j)))
        frontier = nxt
    # close the edge set on the ball (edges between already discovered vertices)
    for L in verts:
        if depth[index[L]] == radius:
            for X in neighbors_split(L):
                Y = normalize_split(X)
                if Y in index:
                    i, j = index[L], index[Y]
                    edges.add((min(i, j), max(i, j)))
    return verts, sorted(edges), depth


def _enumerate_split_vertices(p, a, bound):
    ctx = context(p, 1, a + 1)
    root = ctx.standard()
    seen = {root}
    frontier = [root]
    while frontier:
        nxt = []
        for L in frontier:
            for X in neighbors_split(L):
                try:
                    Y = normalize_split(X)
                except WindowError:
                    continue
                if Y not in seen and Y.in_window(a):
                    seen.add(Y)
                    nxt.append(Y)
                    if len(seen) > bound:
                        raise BoundError("split vertex enumeration exceeds the bound")
        frontier = nxt
    return sorted(VertexLat(L, "split") for L in seen)


def split_stratum_points(L, m):
    """M_L over F_{p^{2m}}: preimages in L of the lines of L/Pi L, with tau-fixed flags.

    L is a rational lattice of volume -1; points are returned in the order of
    hermitian.p1_points (which lists (0, 1) first, then (1, a)).
    """
    from .hermitian import p1_points
    small = L.ctx
    big = context(small.p, m, small.A)
    PL = Pi_op(L)
    Q = quotient(PL, L)
    Lb = embed(L, big)
    PLb = embed(PL, big)
    basis = embed_rows(Q.basis, small, big)
    Qb = Quotient(PLb, Lb, basis, ())
    pts = p1_points(small.p, m)
    return [(preimage(Qb, [list(pt.rep)]), pt.tau_fixed) for pt in pts]


# ---------------------------------------------------------------------------
# RZ points inside lattice strata


@dataclass(frozen=True)
class Frame:
    """Orthonormal frame of a hermitian quotient, lifted to stored W_0-vectors."""

    quotient: Quotient
    vectors: np.ndarray  # (d, 4, 2): lifts of the orthonormal basis


def orthonormal_frame(Q):
    o = ops(Q.upper.ctx.p, 1)
    C = hermitian_frame([list(r) for r in Q.gram], Q.upper.ctx.p)
    vecs = combine(Q.upper.ctx, np.asarray(C, dtype=np.int64), Q.basis)
    del o
    return Frame(Q, vecs)


def stratum_frame(V):
    """Quotient and frame for a vertex lattice: L1/pL1 (type 1) or L3^dual/L3 (type 3)."""
    L = V.lattice
    if V.kind == "1":
        Q = quotient(L.scale(1), L, shift=0)
    elif V.kind == "3":
        Q = quotient(L, L.dual(), shift=1)
    else:
        raise ValueError("frames exist for type 1 and type 3 lattices")
    return orthonormal_frame(Q)


def enumerate_rz_points(p, m, a=1, case="inert", within=None, strategy="preimage"):
    """RZ points inside the lattice stratum of `within` (a rational VertexLat).

    strategy 'preimage' lifts the points of Y^(-) / Y^(+); strategy 'scan'
    runs through every lattice between the relevant bounds and keeps those that
    satisfy the membership test.  Points are returned as lattices over
    F_{p^{2m}}, sorted canonically.
    """
    if case != "inert":
        raise ValueError("use split_stratum_points for the split case")
    if within is None:
        return global_rz_points(p, m, a)
    from . import hermitian as hm
    small = within.lattice.ctx
    big = context(p, m, small.A)
    L = within.lattice
    if within.kind == "02":
        Lb = embed(L, big)
        Q = quotient(Lb, Lb.dual())
        cands = [Lb] + [preimage(Q, [x]) for x in _all_lines_big(big, Q.dim)] + [Lb.dual()]
        return sorted(D for D in cands if is_rz_point_inert(D))
    fr = stratum_frame(within)
    lower = embed(fr.quotient.lower, big)
    vecs = embed_rows(fr.vectors, small, big)
    if strategy == "preimage":
        X = hm.enumerate_isotropic_vectors(p, m)
        if len(X) > DESK_BOUND:
            raise BoundError("too many points for object-level enumeration")
        if within.kind == "1":
            gens = [_perp_first_std(big, x) for x in X]
        else:
            gens = [[list(map(int, x))] for x in X]
        pts = [big.from_stored(np.concatenate([lower.H, combine(big, np.asarray(g), vecs)]), check=False)
               for g in gens]
        return sorted(pts)
    if strategy == "scan":
        q = big.F.q
        nlines = (q ** 4 - 1) // (q - 1)
        if nlines > DESK_BOUND:
            raise BoundError("scan exceeds the bound")
        out = []
        for x in _all_lines_big(big, 4):
            g = _perp_first_std(big, x, plain=True) if within.kind == "1" else [list(x)]
            D = big.from_stored(np.concatenate([lower.H, combine(big, np.asarray(g), vecs)]), check=False)
            if is_rz_point_inert(D):
                out.append(D)
        return sorted(out)
    raise ValueError(f"unknown strategy {strategy!r}")


def _all_lines_big(ctx, d):
    return _projective_points(ops(ctx.p, ctx.m), d)


def _perp_first_std(ctx, x, plain=False):
    """Rows spanning {u : sum u_i x_i^p = 0} (or {u : sum u_i x_i = 0} when plain)."""
    o = ops(ctx.p, ctx.m)
    a = [int(v) if plain else o.frob[int(v)] for v in x]
    i = next(k for k, v in enumerate(a) if v)
    inv = o.inv[a[i]]
    rows = []
    for j in range(4):
        if j == i:
            continue
        r = [0] * 4
        r[j] = 1
        r[i] = o.mul(o.neg[a[j]], inv)
        rows.append(r)
    return rows


def global_rz_points(p, m, a=1, bound=DESK_BOUND):
    """All inert RZ points D in the window, collected through their vertex hulls.

    Every RZ point lies in the stratum of a type-1 or type-3 vertex lattice
    from the same window (its hull), or is a {0,2} lattice itself.
    """
    verts = enumerate_vertex_lattices(p, 1, a)
    total = 0
    from . import hermitian as hm
    n_iso = len(hm.enumerate_isotropic_vectors(p, m))
    for V in verts:
        if V.kind in ("1", "3"):
            total += n_iso
    if total > bound:
        raise BoundError(f"{total} candidate points exceed the bound {bound}")
    out = set()
    for V in verts:
        if V.kind == "02":
            out.add(embed(V.lattice, context(p, m, V.lattice.ctx.A)))
            continue
        for D in enumerate_rz_points(p, m, a, within=V):
            if D.in_window(a):
                out.add(D)
    return sorted(out)


# ---------------------------------------------------------------------------
# batch construction and profiling of stratum points

PROFILE_FIELDS = K_.PROFILE_FIELDS
BRANCHES = ("self", "sum", "intersection", "none")


def perp_first_coeffs(p, m, X):
    """Rows (P, 3, 4) spanning {u : sum u_i x_i^p = 0} for normalised vectors X (P, 4)."""
    o = ops(p, m)
    frob = np.asarray(o.frob, dtype=np.int64)
    neg = np.asarray(o.neg, dtype=np.int64)
    X = np.asarray(X, dtype=np.int64)
    a = frob[X]
    piv = (X != 0).argmax(axis=1)
    P_ = len(X)
    U = np.zeros((P_, 3, 4), dtype=np.int64)
    for i in range(4):
        sel = piv == i
        others = [j for j in range(4) if j != i]
        for r, j in enumerate(others):
            U[sel, r, j] = 1
            U[sel, r, i] = neg[a[sel, j]]
    return U


@dataclass(frozen=True)
class StratumModel:
    """A type-1 or type-3 rational vertex lattice prepared for point generation over F_{p^{2m}}."""

    vertex: VertexLat
    big: LatticeContext
    lower: Lattice        # pL1 or L3, over the big field
    vectors: np.ndarray   # lifts of an orthonormal frame of the quotient, over the big field


def stratum_model(V, m):
    small = V.lattice.ctx
    big = context(small.p, m, small.A)
    fr = stratum_frame(V)
    return StratumModel(V, big, embed(fr.quotient.lower, big), embed_rows(fr.vectors, small, big))


def stratum_generators(S, X):
    """Generators (P, r, 4, n) of the points attached to isotropic vectors X, plus the extra vectors.

    Type 1: D = pL1 + lift(U) with U = {u : form(u, x) = 0}; the extra vector
    is lift(tau x), which must span pD^dual / pL1.  Type 3: D = L3 + lift(x).
    """
    big = S.big
    X = np.asarray(X, dtype=np.int64)
    P_ = len(X)
    if S.vertex.kind == "1":
        U = perp_first_coeffs(big.p, big.m, X)
        rows = combine(big, U.reshape(-1, 4), S.vectors).reshape(P_, 3, 4, big.n)
        o = ops(big.p, big.m)
        E = combine(big, np.asarray(o.tau, dtype=np.int64)[X], S.vectors)
    else:
        rows = combine(big, X, S.vectors).reshape(P_, 1, 4, big.n)
        E = np.zeros((P_, 4, big.n), dtype=np.int64)
    low = np.broadcast_to(S.lower.H, (P_,) + S.lower.H.shape)
    return np.ascontiguousarray(np.concatenate([low, rows], axis=1)), np.ascontiguousarray(E)


def profile_generators(big, G, E=None):
    """Run the inert per-point kernel on generator sets; returns (flags, V, H)."""
    has_extra = E is not None
    if E is None:
        E = np.zeros((len(G), 4, big.n), dtype=np.int64)
    Rw = big.ring(4 * big.K)
    return K_.inert_profile_batch(np.ascontiguousarray(G, dtype=np.int64), E, has_extra, big.p, big.K,
                                  big.R.red, big.R.M, big.digits, big.inv_t, big.pw,
                                  big.sig[1], big.sig[2], Rw.red, Rw.M)


def rz_generators(big, G):
    """(colength conditions, strict tau) flags for generator sets, plus their Hermite forms."""
    Rw = big.ring(4 * big.K)
    return K_.inert_rz_batch(np.ascontiguousarray(G, dtype=np.int64), big.p, big.K, big.R.red, big.R.M,
                             big.digits, big.inv_t, big.pw, big.sig[1], big.sig[2], Rw.red, Rw.M)


def projective_points_array(q, d):
    """Normalised representatives (first nonzero entry 1) of all points of P^{d-1}(F_q)."""
    blocks = []
    for lead in range(d):
        k = d - lead - 1
        tail = np.indices((q,) * k).reshape(k, -1).T if k else np.zeros((1, 0), dtype=np.int64)
        B = np.zeros((len(tail), d), dtype=np.int64)
        B[:, lead] = 1
        B[:, lead + 1:] = tail
        blocks.append(B)
    return np.concatenate(blocks)


def scan_generators(S, C):
    """Generators of the lattices scanned in a stratum for projective points C (P, 4).

    Type 1: pL1 + lift of the hyperplane {u : sum u_i c_i = 0}; type 3: L3 + lift(c).
    No isotropy is imposed on C.
    """
    big = S.big
    C = np.asarray(C, dtype=np.int64)
    P_ = len(C)
    if S.vertex.kind == "1":
        o = ops(big.p, big.m)
        inv_frob = np.asarray(o.frob_inv, dtype=np.int64)
        coeff = perp_first_coeffs(big.p, big.m, inv_frob[C])
        rows = combine(big, coeff.reshape(-1, 4), S.vectors).reshape(P_, 3, 4, big.n)
    else:
        rows = combine(big, C, S.vectors).reshape(P_, 1, 4, big.n)
    low = np.broadcast_to(S.lower.H, (P_,) + S.lower.H.shape)
    return np.ascontiguousarray(np.concatenate([low, rows], axis=1))


def iter_stratum_profiles(S, X, chunk=20000):
    """Yield (slice, flags, V, H) over chunks of the isotropic vectors X."""
    for s in range(0, len(X), chunk):
        G, E = stratum_generators(S, X[s:s + chunk])
        flags, V, H = profile_generators(S.big, G, E if S.vertex.kind == "1" else None)
        yield slice(s, s + len(G)), flags, V, H


def lattice_keys(V, H):
    """Hashable canonical keys for arrays of Hermite forms."""
    return [V[i].tobytes() + H[i].tobytes() for i in range(len(V))]


def reference_type3(p, A=1):
    """The p-modular lattice span(w1, p w2, w3, p w4) built from two hyperbolic pairs.

    With u a unit satisfying u sigma(u) = -1, w1 = e1 + u e2, w2 = e1 - u e2 and
    likewise on e3, e4; the Gram matrix on (w1, w2) is [[0, 2], [2, 0]].
    """
    ctx = context(p, 1, A)
    u = norm_minus_one(ctx)
    one = np.array([1, 0], dtype=np.int64)
    z = np.zeros(2, dtype=np.int64)

    def vec(*cs):
        return np.array([np.asarray(c) % ctx.R.M for c in cs], dtype=np.int64)

    w1, w2 = vec(one, u, z, z), vec(one, -u, z, z)
    w3, w4 = vec(z, z, one, u), vec(z, z, one, -u)
    return VertexLat(ctx.from_rows(np.array([w1, p * w2, w3, p * w4])), "3")


def superspecial_example(p, A=1):
    """span(p v1, v2, e3, e4) with v1 = e1 + u e2, v2 = e1 - u e2."""
    ctx = context(p, 1, A)
    u = norm_minus_one(ctx)
    one = np.array([1, 0], dtype=np.int64)
    z = np.zeros(2, dtype=np.int64)
    rows = np.array([[one, u, z, z], [one, -u, z, z], [z, z, one, z], [z, z, z, one]], dtype=np.int64)
    rows[0] = (p * rows[0]) % ctx.R.M
    return ctx.from_rows(rows % ctx.R.M)


def norm_minus_one(ctx):
    """A unit u of W_0 with u sigma(u) = -1, lifted from a residue with u^(p+1) = -1.

    x -> x (1 + c) with c in Z_p multiplies the norm by (1 + c)^2, so one
    square root in Z_p corrects the norm to full precision.
    """
    R = context(ctx.p, 1, ctx.A).R
    o = ops(ctx.p, 1)
    r = next(x for x in range(1, o.q) if o.mul(x, o.frob[x]) == o.neg[1])
    x = R.lift(r)
    minus_one = R.scalar(-1)
    ratio = R.mul(minus_one, R.inv(R.mul(x, R.sigma(x, 1))))
    x = R.mul(x, _sqrt_zp(R, ratio))
    if not np.array_equal(R.mul(x, R.sigma(x, 1)), minus_one):
        raise ArithmeticError("norm equation did not lift")
    return x


def _sqrt_zp(R, c):
    """Square root of a Z_p-unit c congruent to 1 mod p (Newton from 1)."""
    y = R.one()
    half = R.inv(R.scalar(2))
    for _ in range(R.N.bit_length() + 1):
        y = R.mul(half, R.add(y, R.mul(c, R.inv(y))))
    return y
