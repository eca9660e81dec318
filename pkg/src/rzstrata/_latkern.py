"""Chain-ring kernels for lattices stored as canonical Hermite forms.

A Galois-ring element is an int64 vector of n coefficients.  A lattice S with
p^K W^4 <= S <= W^4 is stored as (v, H): H is upper triangular, H[j, j] = p^v[j]
exactly, and every entry H[i, k] (i < k) has all coefficients in [0, p^v[k]).
All routines are written in the numba-compatible subset of Python.
"""

import numpy as np

from ._accel import njit


@njit
def gmul(a, b, red, M):
    """Product in GR(p^N, n): schoolbook convolution, then fold x^s for s >= n via red."""
    n = a.shape[0]
    conv = np.zeros(2 * n - 1, dtype=np.int64)
    for i in range(n):
        ai = a[i]
        if ai == 0:
            continue
        for j in range(n):
            conv[i + j] += ai * b[j]
    out = np.zeros(n, dtype=np.int64)
    for k in range(n):
        out[k] = conv[k] % M
    for s in range(n, 2 * n - 1):
        c = conv[s] % M
        if c == 0:
            continue
        for k in range(n):
            out[k] = (out[k] + c * red[s, k]) % M
    return out


@njit
def vval(a, p, K):
    best = K
    for i in range(a.shape[0]):
        c = a[i]
        if c != 0:
            k = 0
            while c % p == 0 and k < best:
                c //= p
                k += 1
            if k < best:
                best = k
    return best


@njit
def unit_inv(a, p, M, T, digits, inv_t, pw):
    n = a.shape[0]
    r = 0
    for i in range(n):
        r += (a[i] % p) * pw[i]
    y = digits[inv_t[r]].copy()
    # Newton iteration doubles the p-adic precision; 6 steps cover 2^6 digits
    for _ in range(6):
        ay = gmul(a, y, T, M)
        two_minus = np.zeros(n, dtype=np.int64)
        for i in range(n):
            two_minus[i] = (-ay[i]) % M
        two_minus[0] = (two_minus[0] + 2) % M
        y = gmul(y, two_minus, T, M)
    return y


@njit
def hnf(G, p, K, T, M, digits, inv_t, pw):
    r = G.shape[0]
    n = G.shape[2]
    cap = r + 4
    rows = np.zeros((cap, 4, n), dtype=np.int64)
    for i in range(r):
        for j in range(4):
            for c in range(n):
                rows[i, j, c] = G[i, j, c] % M
    active = np.zeros(cap, dtype=np.bool_)
    for i in range(r):
        active[i] = True
    cnt = r
    v = np.zeros(4, dtype=np.int64)
    H = np.zeros((4, 4, n), dtype=np.int64)
    for j in range(4):
        best = -1
        bv = K
        for i in range(cnt):
            if active[i]:
                vi = vval(rows[i, j], p, K)
                if vi < bv:
                    bv = vi
                    best = i
        v[j] = bv
        if best < 0:
            H[j, j, 0] = p ** K
            continue
        piv = rows[best].copy()
        active[best] = False
        pk = p ** bv
        u = np.zeros(n, dtype=np.int64)
        for c in range(n):
            u[c] = piv[j, c] // pk
        uinv = unit_inv(u, p, M, T, digits, inv_t, pw)
        for jj in range(j, 4):
            piv[jj] = gmul(uinv, piv[jj], T, M)
        for c in range(n):
            piv[j, c] = 0
        piv[j, 0] = pk
        for i in range(cnt):
            if active[i]:
                allzero = True
                for c in range(n):
                    if rows[i, j, c] != 0:
                        allzero = False
                        break
                if allzero:
                    continue
                q = np.zeros(n, dtype=np.int64)
                for c in range(n):
                    q[c] = rows[i, j, c] // pk
                for jj in range(j + 1, 4):
                    t = gmul(q, piv[jj], T, M)
                    for c in range(n):
                        rows[i, jj, c] = (rows[i, jj, c] - t[c]) % M
                for c in range(n):
                    rows[i, j, c] = 0
        if bv > 0:
            sc = p ** (K - bv)
            nz = False
            for jj in range(j + 1, 4):
                for c in range(n):
                    val = (piv[jj, c] * sc) % M
                    rows[cnt, jj, c] = val
                    if val != 0:
                        nz = True
            if nz:
                active[cnt] = True
                cnt += 1
            else:
                for jj in range(4):
                    for c in range(n):
                        rows[cnt, jj, c] = 0
        for jj in range(4):
            for c in range(n):
                H[j, jj, c] = piv[jj, c]
    # canonical reduction of the entries above each pivot
    for i in range(4):
        for k in range(i + 1, 4):
            if v[k] == K:
                continue
            pk = p ** v[k]
            q = np.zeros(n, dtype=np.int64)
            nz = False
            for c in range(n):
                q[c] = H[i, k, c] // pk
                if q[c] != 0:
                    nz = True
            if not nz:
                continue
            for c in range(n):
                H[i, k, c] = H[i, k, c] - q[c] * pk
            for kk in range(k + 1, 4):
                t = gmul(q, H[k, kk], T, M)
                for c in range(n):
                    H[i, kk, c] = (H[i, kk, c] - t[c]) % M
    return v, H


@njit
def member(x, v, H, p, K, T, M):
    """Whether the vector x (4, n) lies in the lattice (v, H)."""
    n = x.shape[1]
    y = np.zeros((4, n), dtype=np.int64)
    for j in range(4):
        for c in range(n):
            y[j, c] = x[j, c] % M
    for j in range(4):
        pk = p ** v[j]
        q = np.zeros(n, dtype=np.int64)
        nz = False
        for c in range(n):
            if y[j, c] % pk != 0:
                return False
            q[c] = y[j, c] // pk
            if q[c] != 0:
                nz = True
        if not nz or v[j] == K:
            continue
        for c in range(n):
            y[j, c] = 0
        for jj in range(j + 1, 4):
            t = gmul(q, H[j, jj], T, M)
            for c in range(n):
                y[jj, c] = (y[jj, c] - t[c]) % M
    return True


@njit
def contains_rows(v, H, X, scale, p, K, T, M):
    """Whether p^scale times every row of X lies in (v, H)."""
    n = X.shape[2]
    f = p ** scale
    for r in range(X.shape[0]):
        x = np.zeros((4, n), dtype=np.int64)
        for j in range(4):
            for c in range(n):
                x[j, c] = (X[r, j, c] % M) * f % M
        if not member(x, v, H, p, K, T, M):
            return False
    return True


@njit
def sharp_rows(v, H, p, K, T2, M2):
    """Generators of p^K S^# where S^# is the plain dot-dual of (v, H).

    Back substitution of H X = p^K I at precision M2; returns (rows, ok) with
    ok False when a division was not exact (precision too small).
    """
    n = H.shape[2]
    X = np.zeros((4, 4, n), dtype=np.int64)
    ok = True
    for k in range(4):
        X[k, k, 0] = p ** (K - v[k])
        for i in range(k - 1, -1, -1):
            s = np.zeros(n, dtype=np.int64)
            for l in range(i + 1, k + 1):
                t = gmul(H[i, l] % M2, X[l, k], T2, M2)
                for c in range(n):
                    s[c] = (s[c] + t[c]) % M2
            pk = p ** v[i]
            for c in range(n):
                val = (-s[c]) % M2
                if val % pk != 0:
                    ok = False
                X[i, k, c] = val // pk
    Mk = p ** K
    out = np.zeros((4, 4, n), dtype=np.int64)
    for k in range(4):
        for i in range(4):
            for c in range(n):
                out[k, i, c] = X[i, k, c] % Mk
    return out, ok


@njit
def apply_coeff_matrix(rows, S, M):
    """Apply a Z/M-linear map on coefficient vectors (row-vector convention) entrywise."""
    r = rows.shape[0]
    n = rows.shape[2]
    n_out = S.shape[1]
    out = np.zeros((r, 4, n_out), dtype=np.int64)
    for a in range(r):
        for j in range(4):
            for c in range(n):
                x = rows[a, j, c] % M
                if x == 0:
                    continue
                for d in range(n_out):
                    out[a, j, d] = (out[a, j, d] + x * S[c, d]) % M
    return out


@njit
def same(v1, H1, v2, H2):
    for j in range(4):
        if v1[j] != v2[j]:
            return False
    for i in range(4):
        for j in range(4):
            for c in range(H1.shape[2]):
                if H1[i, j, c] != H2[i, j, c]:
                    return False
    return True


@njit
def hnf_batch(G, p, K, T, M, digits, inv_t, pw):
    """Hermite forms of many generator sets G (P, r, 4, n)."""
    P = G.shape[0]
    n = G.shape[3]
    V = np.zeros((P, 4), dtype=np.int64)
    Hs = np.zeros((P, 4, 4, n), dtype=np.int64)
    for i in range(P):
        v, H = hnf(G[i], p, K, T, M, digits, inv_t, pw)
        V[i] = v
        Hs[i] = H
    return V, Hs


# ---------------------------------------------------------------------------
# per-point profile of an inert RZ candidate, used for batch enumeration

PROFILE_FIELDS = ("rz", "strict_tau", "tau_stable", "sum_stable", "meet_stable",
                  "branch", "chain_ok", "pappas", "extra_ok", "precision_ok")


@njit
def _sum_v(v):
    s = 0
    for j in range(4):
        s += v[j]
    return s


@njit
def _sharp_hnf(v, H, p, K, T, M, digits, inv_t, pw, Tw, Mw):
    rows, ok = sharp_rows(v, H, p, K, Tw, Mw)
    v2, H2 = hnf(rows, p, K, T, M, digits, inv_t, pw)
    return v2, H2, ok


@njit
def _twist_hnf(H, S, p, K, T, M, digits, inv_t, pw):
    rows = apply_coeff_matrix(H, S, M)
    return hnf(rows, p, K, T, M, digits, inv_t, pw)


@njit
def _step(vX, HX, sx, vY, HY, sy, p, K, T, M):
    """Colength of p^sx X inside p^sy Y, or -99 when not contained."""
    if sx < sy:
        return -99
    if not contains_rows(vY, HY, HX, sx - sy, p, K, T, M):
        return -99
    return (_sum_v(vX) + 4 * sx) - (_sum_v(vY) + 4 * sy)


@njit
def inert_profile(v, H, extra, has_extra, p, K, T, M, digits, inv_t, pw, S1, S2, Tw, Mw):
    out = np.zeros(10, dtype=np.int64)
    prec = True
    # dual
    vs, Hs = _twist_hnf(H, S1, p, K, T, M, digits, inv_t, pw)
    vd, Hd, ok = _sharp_hnf(vs, Hs, p, K, T, M, digits, inv_t, pw, Tw, Mw)
    prec = prec and ok
    volD = _sum_v(v)
    volDd = _sum_v(vd)
    rz = (contains_rows(vd, Hd, H, 0, p, K, T, M) and volD - volDd == 2
          and contains_rows(v, H, Hd, 1, p, K, T, M))
    out[0] = 1 if rz else 0
    vt, Ht = _twist_hnf(H, S2, p, K, T, M, digits, inv_t, pw)
    out[1] = 1 if contains_rows(vd, Hd, Ht, 0, p, K, T, M) else 0
    stable = same(v, H, vt, Ht)
    out[2] = 1 if stable else 0
    # sum and its tau
    G = np.zeros((8, 4, H.shape[2]), dtype=np.int64)
    G[:4] = H
    G[4:] = Ht
    vS, HS = hnf(G, p, K, T, M, digits, inv_t, pw)
    vSt, HSt = _twist_hnf(HS, S2, p, K, T, M, digits, inv_t, pw)
    sum_stable = same(vS, HS, vSt, HSt)
    out[3] = 1 if sum_stable else 0
    out[7] = 1 if volD - _sum_v(vS) <= 1 else 0
    # meet = (D^# + (tau D)^#)^#
    v1, H1, ok1 = _sharp_hnf(v, H, p, K, T, M, digits, inv_t, pw, Tw, Mw)
    v2, H2, ok2 = _sharp_hnf(vt, Ht, p, K, T, M, digits, inv_t, pw, Tw, Mw)
    G[:4] = H1
    G[4:] = H2
    v3, H3 = hnf(G, p, K, T, M, digits, inv_t, pw)
    vI, HI, ok3 = _sharp_hnf(v3, H3, p, K, T, M, digits, inv_t, pw, Tw, Mw)
    prec = prec and ok1 and ok2 and ok3
    vIt, HIt = _twist_hnf(HI, S2, p, K, T, M, digits, inv_t, pw)
    meet_stable = same(vI, HI, vIt, HIt)
    out[4] = 1 if meet_stable else 0
    # branch in the order self, sum, intersection
    chain_ok = False
    if stable:
        out[5] = 0
        chain_ok = rz
    elif sum_stable:
        out[5] = 1
        vs2, Hs2 = _twist_hnf(HS, S1, p, K, T, M, digits, inv_t, pw)
        vL, HL, ok4 = _sharp_hnf(vs2, Hs2, p, K, T, M, digits, inv_t, pw, Tw, Mw)
        prec = prec and ok4
        c1 = _step(vL, HL, 1, vd, Hd, 1, p, K, T, M)
        c2 = _step(vd, Hd, 1, v, H, 0, p, K, T, M)
        c3 = _step(v, H, 0, vS, HS, 0, p, K, T, M)
        c4 = _step(vS, HS, 0, vL, HL, 0, p, K, T, M)
        c5 = _step(vL, HL, 0, vd, Hd, 0, p, K, T, M)
        chain_ok = c1 == 1 and c2 == 2 and c3 == 1 and c4 == 0 and c5 == 1
    elif meet_stable:
        out[5] = 2
        vs2, Hs2 = _twist_hnf(HI, S1, p, K, T, M, digits, inv_t, pw)
        vL, HL, ok4 = _sharp_hnf(vs2, Hs2, p, K, T, M, digits, inv_t, pw, Tw, Mw)
        prec = prec and ok4
        c1 = _step(vd, Hd, 1, vL, HL, 1, p, K, T, M)
        c2 = _step(vL, HL, 1, vI, HI, 0, p, K, T, M)
        c3 = _step(vI, HI, 0, v, H, 0, p, K, T, M)
        c4 = _step(v, H, 0, vd, Hd, 0, p, K, T, M)
        c5 = _step(vd, Hd, 0, vL, HL, 0, p, K, T, M)
        chain_ok = c1 == 1 and c2 == 0 and c3 == 1 and c4 == 2 and c5 == 1
    else:
        out[5] = 3
    out[6] = 1 if chain_ok else 0
    if has_extra:
        n = H.shape[2]
        P_ = np.zeros((4, 4, n), dtype=np.int64)
        for i in range(4):
            for j in range(4):
                for c in range(n):
                    P_[i, j, c] = (Hd[i, j, c] * p) % M
        vP, HP = hnf(P_, p, K, T, M, digits, inv_t, pw)
        out[8] = 1 if member(extra, vP, HP, p, K, T, M) else 0
    else:
        out[8] = 1
    out[9] = 1 if prec else 0
    return out


@njit
def inert_profile_batch(G, E, has_extra, p, K, T, M, digits, inv_t, pw, S1, S2, Tw, Mw):
    """Profiles for the lattices generated by each G[i]; E[i] is the extra vector."""
    P = G.shape[0]
    n = G.shape[3]
    out = np.zeros((P, 10), dtype=np.int64)
    V = np.zeros((P, 4), dtype=np.int64)
    Hs = np.zeros((P, 4, 4, n), dtype=np.int64)
    for i in range(P):
        v, H = hnf(G[i], p, K, T, M, digits, inv_t, pw)
        V[i] = v
        Hs[i] = H
        out[i] = inert_profile(v, H, E[i], has_extra, p, K, T, M, digits, inv_t, pw, S1, S2, Tw, Mw)
    return out, V, Hs


@njit
def inert_rz_batch(G, p, K, T, M, digits, inv_t, pw, S1, S2, Tw, Mw):
    """Columns (colength conditions, tau(D) <= D^dual) for the lattices generated by each G[i]."""
    P = G.shape[0]
    n = G.shape[3]
    out = np.zeros((P, 2), dtype=np.int64)
    V = np.zeros((P, 4), dtype=np.int64)
    Hs = np.zeros((P, 4, 4, n), dtype=np.int64)
    for i in range(P):
        v, H = hnf(G[i], p, K, T, M, digits, inv_t, pw)
        V[i] = v
        Hs[i] = H
        vs, Hs_ = _twist_hnf(H, S1, p, K, T, M, digits, inv_t, pw)
        vd, Hd, ok = _sharp_hnf(vs, Hs_, p, K, T, M, digits, inv_t, pw, Tw, Mw)
        rz = (contains_rows(vd, Hd, H, 0, p, K, T, M) and _sum_v(v) - _sum_v(vd) == 2
              and contains_rows(v, H, Hd, 1, p, K, T, M))
        out[i, 0] = 1 if rz else 0
        vt, Ht = _twist_hnf(H, S2, p, K, T, M, digits, inv_t, pw)
        out[i, 1] = 1 if contains_rows(vd, Hd, Ht, 0, p, K, T, M) else 0
    return out, V, Hs
