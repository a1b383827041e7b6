#!/usr/bin/env python3
"""Brute-force monomial-span oracle for truncated jet modules.

Independent of the C++ engine: builds every generator*monomial product as a
dense row over Fractions and row-reduces the full matrix.  Output is the set
of values frozen into tests/*.cpp.  Run: python3 tests/oracle/span_oracle.py
"""
from fractions import Fraction
from itertools import product


def monomials(nvars, lo, hi):
    out = []
    for d in range(lo, hi + 1):
        for e in product(range(d + 1), repeat=nvars):
            if sum(e) == d:
                out.append(e)
    return out


def mul(a, b, L):
    out = {}
    for ea, ca in a.items():
        for eb, cb in b.items():
            e = tuple(x + y for x, y in zip(ea, eb))
            if sum(e) <= L:
                out[e] = out.get(e, 0) + ca * cb
    return {e: c for e, c in out.items() if c != 0}


def diff(a, i):
    out = {}
    for e, c in a.items():
        if e[i] > 0:
            f = list(e)
            f[i] -= 1
            out[tuple(f)] = out.get(tuple(f), 0) + c * e[i]
    return {e: c for e, c in out.items() if c != 0}


def mono(e):
    return {tuple(e): Fraction(1)}


def parse(terms, nvars):
    """terms: list of (coeff, exponent tuple)."""
    p = {}
    for c, e in terms:
        assert len(e) == nvars
        p[tuple(e)] = p.get(tuple(e), 0) + Fraction(c)
    return p


def span_rows(spec, nvars, L):
    """spec: list of (generators, multiplier var indices, min multiplier degree)."""
    rows = []
    for gens, mvars, mindeg in spec:
        mons = monomials(len(mvars), mindeg, L) if mvars else ([()] if mindeg == 0 else [])
        for g in gens:
            for m in mons:
                e = [0] * nvars
                for k, v in zip(m, mvars):
                    e[v] += k
                r = mul(g, mono(e), L)
                if r:
                    rows.append(r)
    return rows


def rank_and_pivots(rows, cols):
    idx = {c: i for i, c in enumerate(cols)}
    mat = []
    for r in rows:
        v = [Fraction(0)] * len(cols)
        for e, c in r.items():
            v[idx[e]] = c
        mat.append(v)
    piv = []
    rk = 0
    for j in range(len(cols)):
        p = None
        for i in range(rk, len(mat)):
            if mat[i][j] != 0:
                p = i
                break
        if p is None:
            continue
        mat[rk], mat[p] = mat[p], mat[rk]
        inv = 1 / mat[rk][j]
        mat[rk] = [x * inv for x in mat[rk]]
        for i in range(len(mat)):
            if i != rk and mat[i][j] != 0:
                f = mat[i][j]
                mat[i] = [a - f * b for a, b in zip(mat[i], mat[rk])]
        piv.append(j)
        rk += 1
    return rk, piv, mat[:rk]


def cobasis(spec, nvars, L):
    # column order: degree ascending so pivots are lowest-degree terms
    cols = monomials(nvars, 0, L)
    rk, piv, _ = rank_and_pivots(span_rows(spec, nvars, L), cols)
    pset = set(piv)
    return [cols[j] for j in range(len(cols)) if j not in pset]


def in_span(spec, nvars, L, p):
    cols = monomials(nvars, 0, L)
    rows = span_rows(spec, nvars, L)
    r0, _, _ = rank_and_pivots(rows, cols)
    r1, _, _ = rank_and_pivots(rows + [p], cols)
    return r0 == r1


def k_tangent_spec(f, r, k):
    nv = r + k
    gens_full = [f] + [mul(mono([1 if j == i else 0 for j in range(nv)]), diff(f, i), 99) for i in range(r)]
    gens_y = [diff(f, r + j) for j in range(k)]
    allv = list(range(nv))
    return [(gens_full, allv, 0), (gens_y, allv, 1)]


def determined(f, r, k, l):
    """(sufficient, necessary) inclusions, tested modulo M^{l+2}."""
    nv = r + k
    allv = list(range(nv))
    gens_full = [f] + [mul(mono([1 if j == i else 0 for j in range(nv)]), diff(f, i), 99) for i in range(r)]
    gens_y = [diff(f, r + j) for j in range(k)]
    L = l + 1
    suff = [(gens_full, allv, 1), (gens_y, allv, 2)]
    nec = [(gens_full, allv, 0), (gens_y, allv, 1)]
    top = [mono(e) for e in monomials(nv, L, L)]
    cs = cobasis(suff, nv, L)
    cn = cobasis(nec, nv, L)
    s_ok = all(sum(e) < L for e in cs)
    n_ok = all(sum(e) < L for e in cn)
    return s_ok, n_ok


def determinacy_order(f, r, k, lmax=8):
    for l in range(1, lmax + 1):
        if determined(f, r, k, l)[0]:
            return l
    return None


def hilbert(f, r, k, L):
    cb = cobasis(k_tangent_spec(f, r, k), r + k, L)
    h = [0] * (L + 1)
    for e in cb:
        h[sum(e)] += 1
    return h


def P(nv, *terms):
    return parse(terms, nv)


def show(e, names):
    s = []
    for n, a in zip(names, e):
        if a == 1:
            s.append(n)
        elif a > 1:
            s.append(f"{n}^{a}")
    return "*".join(s) or "1"


if __name__ == "__main__":
    print("== determinacy orders (sufficient test) ==")
    cases = {
        "x^3 (r1k0)": (P(1, (1, (3,))), 1, 0),
        "x^4 (r1k0)": (P(1, (1, (4,))), 1, 0),
        "x^2 (r1k0)": (P(1, (1, (2,))), 1, 0),
        "y^2": (P(1, (1, (2,))), 0, 1),
        "y^3": (P(1, (1, (3,))), 0, 1),
        "y^4": (P(1, (1, (4,))), 0, 1),
        "y^5": (P(1, (1, (5,))), 0, 1),
        "D4- y1^2y2-y2^3": (P(2, (1, (2, 1)), (-1, (0, 3))), 0, 2),
        "D4+ y1^2y2+y2^3": (P(2, (1, (2, 1)), (1, (0, 3))), 0, 2),
        "D5 y1^2y2+y2^4": (P(2, (1, (2, 1)), (1, (0, 4))), 0, 2),
        "D6+ y1^2y2+y2^5": (P(2, (1, (2, 1)), (1, (0, 5))), 0, 2),
        "E6 y1^3+y2^4": (P(2, (1, (3, 0)), (1, (0, 4))), 0, 2),
        "C3+ xy+y^3": (P(2, (1, (1, 1)), (1, (0, 3))), 1, 1),
        "C3- -xy+y^3": (P(2, (-1, (1, 1)), (1, (0, 3))), 1, 1),
        "C4 xy+y^4": (P(2, (1, (1, 1)), (1, (0, 4))), 1, 1),
        "F4 x^2+y^3": (P(2, (1, (2, 0)), (1, (0, 3))), 1, 1),
    }
    for name, (f, r, k) in cases.items():
        print(f"{name:24s} order={determinacy_order(f, r, k)}")
    print("x^3 l=2 (suff, nec):", determined(P(1, (1, (3,))), 1, 0, 2))

    print("== reticular K codimension / Hilbert sequence at L=6 ==")
    for name, (f, r, k) in cases.items():
        h = hilbert(f, r, k, 6)
        print(f"{name:24s} codim={sum(h)} hilbert={h}")
    h = hilbert(P(2, (1, (3, 0))), 0, 2, 5)
    print("y1^3 (r0k2) L=5 hilbert:", h)

    print("== tangent xy+y^3 (r1k1) L=4 ==")
    f = P(2, (1, (1, 1)), (1, (0, 3)))
    spec = k_tangent_spec(f, 1, 1)
    print("contains x*y:", in_span(spec, 2, 4, P(2, (1, (1, 1)))))
    print("contains y*(x+3y^2):", in_span(spec, 2, 4, P(2, (1, (1, 1)), (3, (0, 3)))))
    print("contains y:", in_span(spec, 2, 4, P(2, (1, (0, 1)))))
    print("cobasis:", [show(e, "xy") for e in cobasis(spec, 2, 4)])

    print("== PK orbit tangent f=y^3+u*y (r0,k1,n1) L=4, vars (y,u) ==")
    f = P(2, (1, (3, 0)), (1, (1, 1)))
    spec = [([f], [0, 1], 0), ([diff(f, 0)], [0, 1], 1), ([diff(f, 1)], [1], 1)]
    print("contains u*(3y^2+u):", in_span(spec, 2, 4, P(2, (3, (2, 1)), (1, (0, 2)))))
    print("cobasis:", [show(e, "yu") for e in cobasis(spec, 2, 4)])

    print("== versal/stable small fixtures ==")
    # vars (y, t, u): F = y^3 + u*y + t*y^2 ; f = y^3 + u*y in vars (y,u)
    f = P(2, (1, (3, 0)), (1, (1, 1)))
    Ft0 = P(2, (1, (2, 0)))
    spec = [([f, diff(f, 0)], [0, 1], 0), ([diff(f, 1)], [1], 0), ([Ft0], [], 0)]
    print("A2+t*y^2 versal L=6 cobasis:", [show(e, "yu") for e in cobasis(spec, 2, 6)])
    F = P(3, (1, (3, 0, 0)), (1, (1, 0, 1)), (1, (2, 1, 0)))
    spec = [([F, diff(F, 0)], [0, 1, 2], 0), ([diff(F, 2)], [1, 2], 0), ([diff(F, 1)], [1], 0)]
    print("A2+t*y^2 stable L=6 cobasis:", [show(e, "ytu") for e in cobasis(spec, 3, 6)])
    # 1B3 with z: vars (x, t, q, z); F = x^3 + t x^2 + q x + z
    F = P(4, (1, (3, 0, 0, 0)), (1, (2, 1, 0, 0)), (1, (1, 0, 1, 0)), (1, (0, 0, 0, 1)))
    x = mono((1, 0, 0, 0))
    spec = [([F, mul(x, diff(F, 0), 99)], [0, 1, 2, 3], 0), ([diff(F, 2), diff(F, 3)], [1, 2, 3], 0), ([diff(F, 1)], [1], 0)]
    print("1B3 stable L=8 cobasis:", [show(e, "xtqz") for e in cobasis(spec, 4, 8)])
    # versal of same: vars (x, q, z), f = x^3 + q x + z
    f = P(3, (1, (3, 0, 0)), (1, (1, 1, 0)), (1, (0, 0, 1)))
    x = mono((1, 0, 0))
    spec = [([f, mul(x, diff(f, 0), 99)], [0, 1, 2], 0), ([diff(f, 1), diff(f, 2)], [1, 2], 0), ([P(3, (1, (2, 0, 0)))], [], 0)]
    print("1B3 versal L=8 cobasis:", [show(e, "xqz") for e in cobasis(spec, 3, 8)])
    # no z: F = x^3 + t x^2 + u x ; vars (x,t,u)
    F = P(3, (1, (3, 0, 0)), (1, (2, 1, 0)), (1, (1, 0, 1)))
    x = mono((1, 0, 0))
    spec = [([F, mul(x, diff(F, 0), 99)], [0, 1, 2], 0), ([diff(F, 2)], [1, 2], 0), ([diff(F, 1)], [1], 0)]
    cb = cobasis(spec, 3, 8)
    print("x^3+tx^2+ux (no z) stable L=8 cobasis size:", len(cb), [show(e, "xtu") for e in cb][:6])
    # x^3 + q x + z with n=2 (q1,q2,z), t absent: vars (x,t,q1,q2,z)
    F = P(5, (1, (3, 0, 0, 0, 0)), (1, (1, 0, 1, 0, 0)), (1, (0, 0, 0, 0, 1)))
    x = mono((1, 0, 0, 0, 0))
    spec = [([F, mul(x, diff(F, 0), 99)], [0, 1, 2, 3, 4], 0), ([diff(F, 2), diff(F, 3), diff(F, 4)], [1, 2, 3, 4], 0), ([diff(F, 1)], [1], 0)]
    cb = cobasis(spec, 5, 6)
    print("x^3+q1x+z (n=2) stable L=6 cobasis size:", len(cb), [show(e, "xtabz") for e in cb][:6])
