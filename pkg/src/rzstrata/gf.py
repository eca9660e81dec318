"""Finite fields F_{p^{2m}} and Galois rings GR(p^N, 2m) with Frobenius.

Field elements are small integers: the base-p digits of the integer are the
coefficients of the element in the power basis 1, x, ..., x^{n-1} where x is
a root of the defining polynomial.  Galois-ring elements are integer
coefficient vectors of length n modulo p^N over the same defining polynomial.
"""

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

TABLE_LIMIT = 1024


# ---------------------------------------------------------------------------
# polynomials over F_p (coefficient lists, lowest degree first)


def _trim(a):
    a = list(a)
    while a and a[-1] == 0:
        a.pop()
    return a


def poly_mod(a, f, p):
    a = [c % p for c in a]
    a = _trim(a)
    f = _trim(f)
    df = len(f) - 1
    lead_inv = pow(f[-1], p - 2, p)
    while len(a) - 1 >= df and a:
        c = a[-1] * lead_inv % p
        shift = len(a) - 1 - df
        for i, fc in enumerate(f):
            a[shift + i] = (a[shift + i] - c * fc) % p
        a = _trim(a)
    return a


def poly_mulmod(a, b, f, p):
    if not a or not b:
        return []
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] += x * y
    return poly_mod(out, f, p)


def poly_powmod(a, e, f, p):
    result = [1]
    base = poly_mod(a, f, p)
    while e:
        if e & 1:
            result = poly_mulmod(result, base, f, p)
        base = poly_mulmod(base, base, f, p)
        e >>= 1
    return result


def poly_gcd(a, b, p):
    a = _trim([c % p for c in a])
    b = _trim([c % p for c in b])
    while b:
        a, b = b, poly_mod(a, b, p)
    return a


def prime_factors(n):
    out = []
    d = 2
    while d * d <= n:
        if n % d == 0:
            out.append(d)
            while n % d == 0:
                n //= d
        d += 1
    if n > 1:
        out.append(n)
    return out


def is_prime(n):
    return n >= 2 and prime_factors(n) == [n]


def is_irreducible(f, p):
    """Rabin's test for a monic polynomial f over F_p."""
    n = len(_trim(f)) - 1
    if n <= 0:
        return False
    x = [0, 1]
    if poly_powmod(x, p ** n, f, p) != poly_mod(x, f, p):
        return False
    for r in prime_factors(n):
        h = poly_powmod(x, p ** (n // r), f, p)
        diff = list(h) + [0] * max(0, 2 - len(h))
        diff[1] = (diff[1] - 1) % p
        g = poly_gcd(f, diff, p)
        if len(g) != 1:
            return False
    return True


@lru_cache(maxsize=None)
def conway_like_poly(p, n):
    """Least monic irreducible of degree n, comparing x^{n-1} coefficients first."""
    for k in range(p ** n):
        coeffs = [(k // p ** i) % p for i in range(n)] + [1]
        if coeffs[0] == 0:
            continue
        if is_irreducible(coeffs, p):
            return tuple(coeffs)
    raise ValueError(f"no irreducible polynomial of degree {n} over F_{p}")


# ---------------------------------------------------------------------------
# the field


class GF:
    """The field F_q, q = p^n, n = 2m, with lookup tables."""

    def __init__(self, p, m):
        if p % 2 == 0 or not is_prime(p):
            raise ValueError(f"p must be an odd prime, got {p}")
        if m < 1:
            raise ValueError(f"m must be at least 1, got {m}")
        self.p = p
        self.m = m
        self.n = n = 2 * m
        self.q = q = p ** n
        self.poly = conway_like_poly(p, n)
        self.pw = p ** np.arange(n, dtype=np.int64)
        idx = np.arange(q, dtype=np.int64)
        self.digits = (idx[:, None] // self.pw[None, :]) % p

        # multiplication by x as a matrix on digit vectors
        mx = np.zeros((n, n), dtype=np.int64)
        for i in range(n - 1):
            mx[i, i + 1] = 1
        mx[n - 1, :] = [(-c) % p for c in self.poly[:n]]
        self._mul_x = mx

        self.gen = self._find_primitive()
        self.exp = np.zeros(q - 1, dtype=np.int64)
        self.log = np.full(q, -1, dtype=np.int64)
        mg = self._mul_matrix(self.gen)
        v = np.zeros(n, dtype=np.int64)
        v[0] = 1
        for k in range(q - 1):
            e = int(v @ self.pw)
            self.exp[k] = e
            self.log[e] = k
            v = (v @ mg) % p
        if np.any(self.log[1:] < 0):
            raise RuntimeError("generator search failed")

        self.neg = ((-self.digits) % p) @ self.pw
        self.inv_t = np.zeros(q, dtype=np.int64)
        self.inv_t[1:] = self.exp[(-self.log[1:]) % (q - 1)]
        self.frob_t = np.zeros(q, dtype=np.int64)
        self.frob_t[1:] = self.exp[(self.log[1:] * p) % (q - 1)]
        self.norm_t = np.zeros(q, dtype=np.int64)  # x -> x^{p+1}
        self.norm_t[1:] = self.exp[(self.log[1:] * (p + 1)) % (q - 1)]
        if q <= TABLE_LIMIT:
            self.add_table = (((self.digits[:, None, :] + self.digits[None, :, :]) % p) @ self.pw).astype(np.int64)
            la = self.log
            s = (la[:, None] + la[None, :]) % (q - 1)
            mt = self.exp[s]
            mt[0, :] = 0
            mt[:, 0] = 0
            self.mul_table = mt.astype(np.int64)
        else:
            self.add_table = None
            self.mul_table = None

    # -- construction helpers
    def _mul_matrix(self, a):
        """Matrix of multiplication by the element a on digit vectors."""
        n, p = self.n, self.p
        rows = []
        v = self.digits[a].copy()
        for _ in range(n):
            rows.append(v.copy())
            v = (v @ self._mul_x) % p
        # row i is a * x^i; multiplication of digit vector c is c @ rows
        return np.array(rows, dtype=np.int64) % p

    def _slow_mul(self, a, b):
        return int(((self.digits[a] @ self._mul_matrix(b)) % self.p) @ self.pw)

    def _slow_pow(self, a, e):
        r, base = 1, a
        while e:
            if e & 1:
                r = self._slow_mul(r, base)
            base = self._slow_mul(base, base)
            e >>= 1
        return r

    def _find_primitive(self):
        q = self.q
        facs = prime_factors(q - 1)
        for g in range(2, q):
            if all(self._slow_pow(g, (q - 1) // r) != 1 for r in facs):
                return g
        if q == 3:
            return 2
        raise RuntimeError("no primitive element")

    # -- arithmetic on ints or integer arrays
    def add(self, a, b):
        if self.add_table is not None:
            return self.add_table[a, b]
        a = np.asarray(a)
        b = np.asarray(b)
        r = ((self.digits[a] + self.digits[b]) % self.p) @ self.pw
        return r if r.ndim else int(r)

    def sub(self, a, b):
        return self.add(a, self.neg[b])

    def mul(self, a, b):
        if self.mul_table is not None:
            return self.mul_table[a, b]
        a = np.asarray(a)
        b = np.asarray(b)
        s = (self.log[a] + self.log[b]) % (self.q - 1)
        r = np.where((a == 0) | (b == 0), 0, self.exp[s])
        return r if r.ndim else int(r)

    def inv(self, a):
        if np.any(np.asarray(a) == 0):
            raise ZeroDivisionError("inverse of zero in finite field")
        return self.inv_t[a]

    def div(self, a, b):
        return self.mul(a, self.inv(b))

    def pow(self, a, e):
        a = int(a)
        if a == 0:
            if e < 0:
                raise ZeroDivisionError("zero to a negative power")
            return 1 if e == 0 else 0
        return int(self.exp[(int(self.log[a]) * e) % (self.q - 1)])

    def frob(self, a, k=1):
        """sigma^k(a) = a^{p^k}, k taken modulo n."""
        k %= self.n
        r = np.asarray(a)
        for _ in range(k):
            r = self.frob_t[r]
        return r if np.ndim(r) else int(r)

    def from_int(self, c):
        """Image of the integer c under Z -> F_p -> F_q."""
        return int(c) % self.p

    def from_coeffs(self, coeffs):
        c = np.zeros(self.n, dtype=np.int64)
        c[: len(coeffs)] = np.asarray(coeffs, dtype=np.int64) % self.p
        return int(c @ self.pw)

    def elem(self, value):
        return FieldElem(self, int(value))

    def in_subfield(self, a, degree):
        """Whether a lies in F_{p^degree}."""
        return self.frob(a, degree) == a

    def subfield_elements(self, degree):
        idx = np.arange(self.q)
        img = idx
        for _ in range(degree):
            img = self.frob_t[img]
        return idx[img == idx]

    def __repr__(self):
        return f"GF({self.p}^{self.n}, poly={self.poly})"


@lru_cache(maxsize=None)
def field(p, m):
    """Cached field F_{p^{2m}}."""
    return GF(p, m)


@dataclass(frozen=True)
class FieldElem:
    """An element of F_{p^{2m}}; equality is equality of coefficients."""

    F: GF
    value: int

    @property
    def coeffs(self):
        return tuple(int(c) for c in self.F.digits[self.value])

    def _other(self, o):
        if isinstance(o, FieldElem):
            if o.F is not self.F:
                raise ValueError("elements of different fields")
            return o.value
        return self.F.from_int(o)

    def __add__(self, o):
        return FieldElem(self.F, int(self.F.add(self.value, self._other(o))))

    __radd__ = __add__

    def __sub__(self, o):
        return FieldElem(self.F, int(self.F.sub(self.value, self._other(o))))

    def __rsub__(self, o):
        return FieldElem(self.F, int(self.F.sub(self._other(o), self.value)))

    def __neg__(self):
        return FieldElem(self.F, int(self.F.neg[self.value]))

    def __mul__(self, o):
        return FieldElem(self.F, int(self.F.mul(self.value, self._other(o))))

    __rmul__ = __mul__

    def __truediv__(self, o):
        return FieldElem(self.F, int(self.F.div(self.value, self._other(o))))

    def __pow__(self, e):
        return FieldElem(self.F, self.F.pow(self.value, e))

    def inverse(self):
        return FieldElem(self.F, int(self.F.inv(self.value)))

    def frobenius(self, k=1):
        return FieldElem(self.F, self.F.frob(self.value, k))

    def __bool__(self):
        return self.value != 0

    def __repr__(self):
        return f"FieldElem({self.coeffs})"


# ---------------------------------------------------------------------------
# Galois rings


class GaloisRing:
    """GR(p^N, n) = (Z/p^N)[x]/(f) with f the field's defining polynomial."""

    def __init__(self, F, N):
        if N < 1:
            raise ValueError("precision N must be at least 1")
        self.F = F
        self.p = F.p
        self.n = n = F.n
        self.N = N
        self.M = M = self.p ** N
        # products of two reduced coefficients, summed n times, must fit in int64
        if M * M * max(n, 1) >= 2 ** 63:
            raise OverflowError(f"p^N = {M} too large for int64 kernels")
        # structure constants: x^i * x^j = sum_k T[i,j,k] x^k
        red = np.zeros((2 * n - 1, n), dtype=np.int64)
        for k in range(n):
            red[k, k] = 1
        for k in range(n, 2 * n - 1):
            # x^k = x * x^{k-1}
            prev = red[k - 1]
            top = prev[n - 1]
            cur = np.zeros(n, dtype=np.int64)
            cur[1:] = prev[: n - 1]
            for i in range(n):
                cur[i] -= top * F.poly[i]
            red[k] = cur % M
        self.red = red
        T = np.zeros((n, n, n), dtype=np.int64)
        for i in range(n):
            for j in range(n):
                T[i, j] = red[i + j]
        self.T = T
        self._teich = None
        self._sigma_mats = {}

    # -- basic arithmetic on coefficient arrays (..., n)
    def reduce(self, a):
        return np.asarray(a, dtype=np.int64) % self.M

    def zero(self):
        return np.zeros(self.n, dtype=np.int64)

    def one(self):
        z = self.zero()
        z[0] = 1
        return z

    def scalar(self, c):
        z = self.zero()
        z[0] = int(c) % self.M
        return z

    def add(self, a, b):
        return (np.asarray(a) + np.asarray(b)) % self.M

    def sub(self, a, b):
        return (np.asarray(a) - np.asarray(b)) % self.M

    def neg(self, a):
        return (-np.asarray(a)) % self.M

    def mul(self, a, b):
        a = np.asarray(a, dtype=np.int64)
        b = np.asarray(b, dtype=np.int64)
        outer = (a[..., :, None] * b[..., None, :]) % self.M
        return np.einsum("...ij,ijk->...k", outer, self.T) % self.M

    def valuation(self, a):
        a = np.asarray(a, dtype=np.int64) % self.M
        v = self.N
        for c in a.reshape(-1):
            c = int(c)
            if c:
                k = 0
                while c % self.p == 0:
                    c //= self.p
                    k += 1
                v = min(v, k)
        return v

    def residue(self, a):
        """Reduction GR -> F_q as a field integer."""
        return int((np.asarray(a, dtype=np.int64) % self.p) @ self.F.pw)

    def lift(self, r):
        """Coefficientwise lift of a field element."""
        return self.F.digits[r].astype(np.int64).copy()

    def inv(self, a):
        a = self.reduce(a)
        r = self.residue(a)
        if r == 0:
            raise ZeroDivisionError("inverse of a non-unit in the Galois ring")
        y = self.lift(int(self.F.inv(r)))
        prec = 1
        two = self.scalar(2)
        while prec < self.N:
            y = self.mul(y, self.sub(two, self.mul(a, y)))
            prec *= 2
        return y

    def pow(self, a, e):
        result = np.broadcast_to(self.one(), np.shape(a)).copy()
        base = self.reduce(a)
        while e:
            if e & 1:
                result = self.mul(result, base)
            base = self.mul(base, base)
            e >>= 1
        return result

    def elem(self, coeffs):
        c = np.zeros(self.n, dtype=np.int64)
        c[: len(coeffs)] = coeffs
        return RingElem(self, tuple(int(x) for x in c % self.M))

    # -- Teichmueller digits and Frobenius
    @property
    def teich(self):
        """Table of Teichmueller lifts, indexed by field element."""
        if self._teich is None:
            lifts = self.F.digits.astype(np.int64)
            self._teich = self.pow(lifts, self.F.q ** (self.N - 1))
        return self._teich

    def teichmuller_decompose(self, a):
        """Digits t_0..t_{N-1} (field ints) with a = sum Teich(t_i) p^i."""
        x = self.reduce(a).copy()
        digits = []
        for i in range(self.N):
            r = self.residue(x)
            digits.append(r)
            x = (x - self.teich[r]) % self.M
            if i < self.N - 1:
                if np.any(x % self.p):
                    raise ArithmeticError("teichmuller step left a unit residue")
                x = x // self.p
        return digits

    def teichmuller_compose(self, digits):
        x = self.zero()
        for i, r in enumerate(digits):
            x = (x + self.teich[r] * self.p ** i) % self.M
        return x

    def frobenius(self, a, k=1):
        """sigma^k via Teichmueller digits: each digit t maps to t^{p^k}."""
        digits = self.teichmuller_decompose(a)
        return self.teichmuller_compose([self.F.frob(t, k) for t in digits])

    def sigma_matrix(self, k=1):
        """Matrix S with sigma^k(c) = c @ S mod p^N on coefficient vectors.

        Built from sigma^k(x) (itself from Teichmueller digits) by
        multiplicativity, so it agrees exactly with `frobenius`.
        """
        k %= self.n
        if k not in self._sigma_mats:
            x = self.zero()
            if self.n > 1:
                x[1] = 1
            else:
                x[0] = 0
            sx = self.frobenius(x, k)
            rows = [self.one()]
            for _ in range(1, self.n):
                rows.append(self.mul(rows[-1], sx))
            self._sigma_mats[k] = np.array(rows, dtype=np.int64) % self.M
        return self._sigma_mats[k]

    def sigma(self, a, k=1):
        """Vectorised sigma^k on arrays of coefficient vectors."""
        return (np.asarray(a, dtype=np.int64) @ self.sigma_matrix(k)) % self.M

    def hensel_root(self, poly, r0):
        """Lift a simple root r0 (field int) of an integer polynomial."""
        x = self.lift(r0)
        dpoly = [i * c for i, c in enumerate(poly)][1:]
        for _ in range(self.N + 1):
            fx = self._eval(poly, x)
            dfx = self._eval(dpoly, x)
            x = self.sub(x, self.mul(fx, self.inv(dfx)))
        if np.any(self._eval(poly, x)):
            raise ArithmeticError("hensel lift did not converge")
        return x

    def _eval(self, poly, x):
        acc = self.zero()
        for c in reversed(poly):
            acc = self.add(self.mul(acc, x), self.scalar(c))
        return acc

    def __repr__(self):
        return f"GaloisRing(p={self.p}, n={self.n}, N={self.N})"


@lru_cache(maxsize=None)
def galois_ring(p, m, N):
    return GaloisRing(field(p, m), N)


@dataclass(frozen=True)
class RingElem:
    """An element of GR(p^N, 2m) with immutable coefficient tuple."""

    R: GaloisRing
    coeffs: tuple

    @property
    def array(self):
        return np.array(self.coeffs, dtype=np.int64)

    def _wrap(self, arr):
        return RingElem(self.R, tuple(int(x) for x in np.asarray(arr) % self.R.M))

    def _other(self, o):
        if isinstance(o, RingElem):
            return o.array
        return self.R.scalar(o)

    def __add__(self, o):
        return self._wrap(self.R.add(self.array, self._other(o)))

    __radd__ = __add__

    def __sub__(self, o):
        return self._wrap(self.R.sub(self.array, self._other(o)))

    def __neg__(self):
        return self._wrap(self.R.neg(self.array))

    def __mul__(self, o):
        return self._wrap(self.R.mul(self.array, self._other(o)))

    __rmul__ = __mul__

    def inverse(self):
        return self._wrap(self.R.inv(self.array))

    def valuation(self):
        return self.R.valuation(self.array)

    def frobenius(self, k=1):
        return self._wrap(self.R.frobenius(self.array, k))

    def teichmuller_digits(self):
        return self.R.teichmuller_decompose(self.array)

    def reduce(self):
        return FieldElem(self.R.F, self.R.residue(self.array))


def frobenius(x, k=1):
    """sigma^k on a FieldElem or RingElem."""
    return x.frobenius(k)


def ring_arith(a, b, op):
    if op == "add":
        return a + b
    if op == "mul":
        return a * b
    if op == "inv":
        return a.inverse()
    raise ValueError(f"unknown op {op!r}")


def teichmuller_decompose(x):
    return x.teichmuller_digits()


def subring_generator(R, degree=2):
    """Image in R of the generator of GR(p^N, degree) (a Hensel-lifted root)."""
    F = R.F
    if F.n == degree:
        x = R.zero()
        x[1] = 1
        return x
    f_small = conway_like_poly(F.p, degree)
    for r in range(F.q):
        acc = 0
        for c in reversed(f_small):
            acc = int(F.add(F.mul(acc, r), F.from_int(c)))
        if acc == 0:
            return R.hensel_root(list(f_small), r)
    raise ValueError("subfield generator not found")
