"""Extended affine Weyl group Z^4 x| S_4 of type A~_3 (GL_4 normalisation).

An element (lam, w) stands for t_lam * w and acts on R^4 by x -> w.x + lam,
where (w.x)[w[i]] = x[i].  The base alcove is x1 > x2 > x3 > x4 > x1 - 1.
"""

from collections import deque
from dataclasses import dataclass
from functools import lru_cache
from itertools import permutations

NODES = (0, 1, 2, 3)
K_DEFAULT = frozenset({1, 2, 3})
MU = (1, 1, 0, 0)

# 8 x (barycentre of the base alcove), shifted along (1,1,1,1); all entries odd
_C8 = (3, 1, -1, -3)
_POS_ROOTS = tuple((i, j) for i in range(4) for j in range(i + 1, 4))


def _act(w, v):
    out = [0] * 4
    for i in range(4):
        out[w[i]] = v[i]
    return tuple(out)


def _compose(u, v):
    return tuple(u[v[i]] for i in range(4))


def _inverse(w):
    out = [0] * 4
    for i in range(4):
        out[w[i]] = i
    return tuple(out)


@dataclass(frozen=True, order=True)
class AffineWeylElement:
    lam: tuple
    w: tuple

    def __mul__(self, other):
        lam = tuple(a + b for a, b in zip(self.lam, _act(self.w, other.lam)))
        return AffineWeylElement(lam, _compose(self.w, other.w))

    def inverse(self):
        wi = _inverse(self.w)
        lam = tuple(-x for x in _act(wi, self.lam))
        return AffineWeylElement(lam, wi)

    def __pow__(self, k):
        base = self if k >= 0 else self.inverse()
        out = IDENTITY
        for _ in range(abs(k)):
            out = out * base
        return out

    @property
    def degree(self):
        """Omega-degree: the image in Z of the Kottwitz map (sum of lam)."""
        return sum(self.lam)

    def apply(self, x):
        return tuple(a + b for a, b in zip(_act(self.w, x), self.lam))


IDENTITY = AffineWeylElement((0, 0, 0, 0), (0, 1, 2, 3))


def translation(lam):
    return AffineWeylElement(tuple(lam), (0, 1, 2, 3))


def _transposition(i, j):
    w = list(range(4))
    w[i], w[j] = w[j], w[i]
    return tuple(w)


S = {
    0: AffineWeylElement((1, 0, 0, -1), _transposition(0, 3)),
    1: AffineWeylElement((0, 0, 0, 0), _transposition(0, 1)),
    2: AffineWeylElement((0, 0, 0, 0), _transposition(1, 2)),
    3: AffineWeylElement((0, 0, 0, 0), _transposition(2, 3)),
}


def length(x):
    """Number of affine root hyperplanes separating the base alcove from x(alcove)."""
    wc = _act(x.w, _C8)
    y = tuple(8 * l + c for l, c in zip(x.lam, wc))
    total = 0
    for i, j in _POS_ROOTS:
        total += abs((y[i] - y[j]) // 8)
    return total


@lru_cache(maxsize=None)
def rho():
    """The unique length-0 element of Omega-degree 1."""
    found = []
    for bits in range(16):
        lam = tuple((bits >> k) & 1 for k in range(4))
        if sum(lam) != 1:
            continue
        for w in permutations(range(4)):
            x = AffineWeylElement(lam, w)
            if length(x) == 0:
                found.append(x)
    if len(found) != 1:
        raise ArithmeticError(f"expected one length-0 element of degree 1, got {found}")
    return found[0]


@lru_cache(maxsize=None)
def tau():
    """The length-0 element of degree 2, i.e. the image of the cocharacter (1,1,0,0) in Omega."""
    return rho() * rho()


def conj_action(x):
    """Permutation of nodes induced by s_i -> x s_i x^{-1} (for x of length 0)."""
    xi = x.inverse()
    out = {}
    for i, s in S.items():
        c = x * s * xi
        hits = [j for j, t in S.items() if t == c]
        if len(hits) != 1:
            raise ValueError("conjugation does not preserve the simple reflections")
        out[i] = hits[0]
    return out


def left_descents(x):
    lx = length(x)
    return [i for i in NODES if length(S[i] * x) < lx]


def right_descents(x):
    lx = length(x)
    return [i for i in NODES if length(x * S[i]) < lx]


def omega_part(x):
    return rho() ** x.degree


def affine_part(x):
    """The W_a-component w with x = w * rho^{deg x}."""
    return x * omega_part(x).inverse()


def reduced_word(x):
    """Lexicographically least reduced word of the W_a-part of x."""
    y = affine_part(x)
    word = []
    while True:
        d = left_descents(y)
        if not d:
            break
        i = min(d)
        word.append(i)
        y = S[i] * y
    if y != IDENTITY:
        raise ArithmeticError("descent walk did not reach the identity")
    return tuple(word)


def from_word(word, omega_power=0):
    x = IDENTITY
    for i in word:
        x = x * S[i]
    return x * rho() ** omega_power


def from_word_tau(word):
    return from_word(word) * tau()


def format_word(x):
    """Render as 's0*s1*tau' (degree 2), 's0*rho^k' otherwise, 'e' for the identity."""
    letters = [f"s{i}" for i in reduced_word(x)]
    d = x.degree
    if d == 2:
        letters.append("tau")
    elif d == 1:
        letters.append("rho")
    elif d != 0:
        letters.append(f"rho^{d}")
    return "*".join(letters) if letters else "e"


def support(x):
    return frozenset(reduced_word(x))


def all_reduced_words(x):
    """Every reduced word of the W_a-part of x."""
    y = affine_part(x)
    out = []

    def rec(z, acc):
        d = left_descents(z)
        if not d:
            out.append(tuple(acc))
            return
        for i in d:
            rec(S[i] * z, acc + [i])

    rec(y, [])
    return out


# ---------------------------------------------------------------------------
# Bruhat order


def _subword_products(word):
    prods = {IDENTITY}
    for i in word:
        prods = prods | {z * S[i] for z in prods}
    return prods


def bruhat_leq(x, y):
    """Subword test on one fixed reduced word of y."""
    if x.degree != y.degree:
        return False
    xa, ya = affine_part(x), affine_part(y)
    if length(xa) > length(ya):
        return False
    return xa in _subword_products(reduced_word(ya))


def bruhat_lower_set(y):
    """All x <= y, by the subword property."""
    om = omega_part(y)
    return {z * om for z in _subword_products(reduced_word(y))}


def bruhat_lower_set_by_deletion(y):
    """All x <= y as the closure of single-letter deletions that drop the length by one."""
    om = omega_part(y)
    seen = {affine_part(y)}
    todo = [affine_part(y)]
    while todo:
        z = todo.pop()
        word = reduced_word(z)
        lz = len(word)
        for k in range(lz):
            cand = from_word(word[:k] + word[k + 1:])
            if length(cand) == lz - 1 and cand not in seen:
                seen.add(cand)
                todo.append(cand)
    return {z * om for z in seen}


def bfs_lengths(max_len):
    """Word length in s0..s3 for every W_a element up to max_len, by BFS."""
    dist = {IDENTITY: 0}
    frontier = deque([IDENTITY])
    while frontier:
        z = frontier.popleft()
        if dist[z] == max_len:
            continue
        for s in S.values():
            y = z * s
            if y not in dist:
                dist[y] = dist[z] + 1
                frontier.append(y)
    return dist


# ---------------------------------------------------------------------------
# admissible set and EO elements


def dominant_translations(mu=MU):
    return sorted({translation(tuple(mu[i] for i in perm)) for perm in permutations(range(4))})


@lru_cache(maxsize=None)
def adm(mu=MU):
    out = set()
    for t in dominant_translations(mu):
        out |= bruhat_lower_set(t)
    return frozenset(out)


_VERTICES = ((0, 0, 0, 0), (1, 0, 0, 0), (1, 1, 0, 0), (1, 1, 1, 0))


def permissible_set(mu=MU):
    """Elements x of degree sum(mu) with x(a) - a a permutation of mu at every alcove vertex."""
    target = set(permutations(mu))
    d = sum(mu)
    out = set()
    rng = range(min(mu) - 1, max(mu) + 2)
    for lam in _box(rng, 4):
        if sum(lam) != d:
            continue
        for w in permutations(range(4)):
            x = AffineWeylElement(lam, w)
            if all(tuple(b - a for a, b in zip(v, x.apply(v))) in target for v in _VERTICES):
                out.add(x)
    return frozenset(out)


def _box(rng, k):
    if k == 0:
        yield ()
        return
    for a in rng:
        for rest in _box(rng, k - 1):
            yield (a,) + rest


def finite_parabolic(K):
    """Elements of W_K (closure of the generators in K)."""
    out = {IDENTITY}
    todo = [IDENTITY]
    while todo:
        z = todo.pop()
        for i in K:
            y = S[i] * z
            if y not in out:
                out.add(y)
                todo.append(y)
    if len(out) > 10 ** 5:
        raise ValueError("W_K is infinite")
    return frozenset(out)


def is_min_left(x, K):
    """x in ^K W~: no left descent inside K."""
    return all(length(S[i] * x) > length(x) for i in K)


def eo_set(mu=MU, K=K_DEFAULT, reading="double"):
    """EO^K(mu).

    reading="double": ^K W~ intersected with W_K Adm W_K.
    reading="left": minimal-length representatives of the cosets W_K a, a in Adm.
    """
    WK = finite_parabolic(K)
    A = adm(mu)
    if reading == "double":
        dbl = {u * a * v for a in A for u in WK for v in WK}
        return frozenset(x for x in dbl if is_min_left(x, K))
    if reading == "left":
        out = set()
        for a in A:
            coset = [u * a for u in WK]
            out.add(min(coset, key=lambda z: (length(z), z)))
        return frozenset(out)
    raise ValueError(f"unknown reading {reading!r}")


# ---------------------------------------------------------------------------
# sigma-supports, Coxeter elements and the tables


SIGMA_SPLIT = {0: 0, 1: 1, 2: 2, 3: 3}
SIGMA_INERT = {0: 0, 1: 3, 2: 2, 3: 1}


def sigma_for_case(case):
    if case == "split":
        return SIGMA_SPLIT
    if case == "inert":
        return SIGMA_INERT
    raise ValueError(f"unknown case {case!r}")


def is_diagram_automorphism(sig):
    edges = {frozenset((i, (i + 1) % 4)) for i in NODES}
    return sorted(sig) == list(NODES) and {frozenset((sig[a], sig[b])) for a, b in map(tuple, edges)} == edges


def tau_sigma(sig):
    t = conj_action(tau())
    return {i: t[sig[i]] for i in NODES}


def closure(nodes, perm):
    out = set(nodes)
    changed = True
    while changed:
        changed = False
        for i in list(out):
            if perm[i] not in out:
                out.add(perm[i])
                changed = True
    return frozenset(out)


def orbits(nodes, perm):
    nodes = set(nodes)
    out = []
    while nodes:
        i = min(nodes)
        orb = closure({i}, perm)
        out.append(orb)
        nodes -= orb
    return out


def supp_sigma(x, sig):
    if x.degree != 2:
        raise ValueError("supp_sigma expects an element w*tau of degree 2")
    return closure(support(x), tau_sigma(sig))


def is_sigma_coxeter(x, sig):
    sup = supp_sigma(x, sig)
    return length(x) == len(orbits(sup, tau_sigma(sig))) and sup != frozenset(NODES)


def stable_part(x, sig, K=K_DEFAULT):
    """Largest J inside K with x s_{sigma(j)} x^{-1} = s_{pi(j)}, pi a permutation of J."""
    xi = x.inverse()
    image = {}
    for j in K:
        c = x * S[sig[j]] * xi
        hit = [i for i, s in S.items() if s == c]
        image[j] = hit[0] if hit else None
    J = set(K)
    while True:
        J2 = {j for j in J if image[j] is not None and image[j] in J}
        if J2 == J:
            break
        J = J2
    return frozenset(J)


def sigma_set(x, sig, K=K_DEFAULT):
    """Sigma attached to a Coxeter-type EO element: the complement of supp_sigma and the stable part."""
    return frozenset(NODES) - (supp_sigma(x, sig) | stable_part(x, sig, K))


@dataclass(frozen=True)
class CoxeterTableRow:
    sigma_set: tuple
    w: str
    complement: tuple
    supp_sigma: tuple
    length: int


def coxeter_elements(case, K=K_DEFAULT):
    sig = sigma_for_case(case)
    eo = eo_set(MU, K)
    return sorted((x for x in eo if is_sigma_coxeter(x, sig)), key=lambda z: (length(z), format_word(z)))


def coxeter_table(case, K=K_DEFAULT):
    sig = sigma_for_case(case)
    rows = []
    for x in coxeter_elements(case, K):
        sg = sigma_set(x, sig, K)
        rows.append(
            CoxeterTableRow(
                sigma_set=tuple(sorted(sg)),
                w=format_word(x),
                complement=tuple(sorted(set(NODES) - sg)),
                supp_sigma=tuple(sorted(supp_sigma(x, sig))),
                length=length(x),
            )
        )
    return rows


def distance_from_excluded(K=K_DEFAULT):
    """Graph distance on the 4-cycle from the node not in K."""
    (v0,) = set(NODES) - set(K)
    return {v: min((v - v0) % 4, (v0 - v) % 4) for v in NODES}


def j_set(K, sig):
    """Nonempty tau-sigma-stable node sets on which the distance to the excluded node is constant."""
    d = distance_from_excluded(K)
    ts = tau_sigma(sig)
    out = []
    for bits in range(1, 16):
        sub = frozenset(i for i in NODES if bits >> i & 1)
        if closure(sub, ts) != sub:
            continue
        if len({d[v] for v in sub}) == 1:
            out.append(sub)
    return sorted(out, key=lambda s: (len(s), sorted(s)))


def j_set_report(case, K=K_DEFAULT):
    """J-set together with the table's Sigma values that fall outside it."""
    sig = sigma_for_case(case)
    js = j_set(K, sig)
    table_sets = [frozenset(r.sigma_set) for r in coxeter_table(case, K)]
    missing = [sorted(s) for s in table_sets if s not in js]
    return {
        "case": case,
        "j_set": [sorted(s) for s in js],
        "table_sigma_sets": [sorted(s) for s in table_sets],
        "table_sets_outside_j": missing,
    }


def format_set(s):
    return "{" + ",".join(str(i) for i in sorted(s)) + "}"
