"""Integer and modular linear algebra on plain lists of Python ints.

Everything here is exact (arbitrary precision ints, Fractions); matrices are
lists of rows.  Sizes in this package stay in the low hundreds, so the simple
cubic algorithms are fine.
"""
from __future__ import annotations

from fractions import Fraction
from math import gcd
from typing import Sequence

IntMatrix = list[list[int]]


def identity(n: int) -> IntMatrix:
    return [[int(i == j) for j in range(n)] for i in range(n)]


def matmul(a: IntMatrix, b: IntMatrix) -> IntMatrix:
    if not a:
        return []
    cols = len(b[0]) if b else 0
    out = []
    for row in a:
        acc = [0] * cols
        for k, x in enumerate(row):
            if x:
                for j, y in enumerate(b[k]):
                    if y:
                        acc[j] += x * y
        out.append(acc)
    return out


def transpose(m: IntMatrix, cols: int | None = None) -> IntMatrix:
    if not m:
        return [[] for _ in range(cols or 0)]
    return [list(r) for r in zip(*m)]


def smith_normal_form(m: Sequence[Sequence[int]]) -> tuple[IntMatrix, IntMatrix, IntMatrix]:
    """Return (U, S, V) with U*M*V = S, U and V unimodular, S diagonal with
    non-negative entries d1 | d2 | ...."""
    s = [list(map(int, r)) for r in m]
    rows = len(s)
    cols = len(s[0]) if rows else 0
    u = identity(rows)
    v = identity(cols)

    def swap_rows(i, j):
        s[i], s[j] = s[j], s[i]
        u[i], u[j] = u[j], u[i]

    def swap_cols(i, j):
        for r in s:
            r[i], r[j] = r[j], r[i]
        for r in v:
            r[i], r[j] = r[j], r[i]

    def add_row(src, dst, q):  # row dst -= q * row src
        if q:
            s[dst] = [a - q * b for a, b in zip(s[dst], s[src])]
            u[dst] = [a - q * b for a, b in zip(u[dst], u[src])]

    def add_col(src, dst, q):  # col dst -= q * col src
        if q:
            for r in s:
                r[dst] -= q * r[src]
            for r in v:
                r[dst] -= q * r[src]

    t = 0
    while t < min(rows, cols):
        # pivot: smallest nonzero |entry| in the remaining block
        best = None
        for i in range(t, rows):
            for j in range(t, cols):
                if s[i][j] and (best is None or abs(s[i][j]) < best[0]):
                    best = (abs(s[i][j]), i, j)
        if best is None:
            break
        _, i, j = best
        swap_rows(t, i)
        swap_cols(t, j)
        while True:
            done = True
            p = s[t][t]
            for i in range(t + 1, rows):
                if s[i][t]:
                    add_row(t, i, s[i][t] // p)
                    if s[i][t]:
                        done = False
            for j in range(t + 1, cols):
                if s[t][j]:
                    add_col(t, j, s[t][j] // p)
                    if s[t][j]:
                        done = False
            if done:
                # divisibility of the rest of the block
                bad = None
                for i in range(t + 1, rows):
                    for j in range(t + 1, cols):
                        if s[i][j] % p:
                            bad = i
                            break
                    if bad is not None:
                        break
                if bad is None:
                    break
                add_row(bad, t, -1)  # row t += row bad
                continue
            # move the smallest remainder to the pivot and repeat
            best = None
            for i in range(t, rows):
                if s[i][t] and (best is None or abs(s[i][t]) < best[0]):
                    best = (abs(s[i][t]), i, t)
            for j in range(t, cols):
                if s[t][j] and (best is None or abs(s[t][j]) < best[0]):
                    best = (abs(s[t][j]), t, j)
            _, i, j = best
            swap_rows(t, i)
            swap_cols(t, j)
        if s[t][t] < 0:
            s[t] = [-a for a in s[t]]
            u[t] = [-a for a in u[t]]
        t += 1
    return u, s, v


def snf_diagonal(m: Sequence[Sequence[int]]) -> list[int]:
    _, s, _ = smith_normal_form(m)
    return [s[i][i] for i in range(min(len(s), len(s[0]) if s else 0))]


def rank(m: Sequence[Sequence[int]]) -> int:
    return sum(1 for d in snf_diagonal(m) if d) if m and m[0] else 0


def rational_rref(m: Sequence[Sequence]) -> tuple[list[list[Fraction]], list[int]]:
    a = [[Fraction(x) for x in r] for r in m]
    rows = len(a)
    cols = len(a[0]) if rows else 0
    pivots = []
    r = 0
    for c in range(cols):
        p = next((i for i in range(r, rows) if a[i][c] != 0), None)
        if p is None:
            continue
        a[r], a[p] = a[p], a[r]
        piv = a[r][c]
        a[r] = [x / piv for x in a[r]]
        for i in range(rows):
            if i != r and a[i][c] != 0:
                f = a[i][c]
                a[i] = [x - f * y for x, y in zip(a[i], a[r])]
        pivots.append(c)
        r += 1
        if r == rows:
            break
    return a, pivots


def rational_kernel(m: Sequence[Sequence], cols: int | None = None) -> list[list[Fraction]]:
    """Basis of {x : M x = 0} over Q.  `cols` is needed only for 0-row input."""
    if cols is None:
        cols = len(m[0]) if m else 0
    if not m:
        return [[Fraction(int(i == j)) for i in range(cols)] for j in range(cols)]
    a, pivots = rational_rref(m)
    basis = []
    for f in range(cols):
        if f in pivots:
            continue
        v = [Fraction(0)] * cols
        v[f] = Fraction(1)
        for row, c in enumerate(pivots):
            v[c] = -a[row][f]
        basis.append(v)
    return basis


def integer_kernel(m: Sequence[Sequence[int]], cols: int | None = None) -> list[list[int]]:
    """Z-basis of the integer kernel (columns of V beyond the rank)."""
    if cols is None:
        cols = len(m[0]) if m else 0
    if not m:
        return identity(cols)
    _, s, v = smith_normal_form(m)
    r = sum(1 for i in range(min(len(s), cols)) if s[i][i])
    return [[v[i][j] for i in range(cols)] for j in range(r, cols)]


def hermite_rows(rows: Sequence[Sequence[int]]) -> IntMatrix:
    """Row-style Hermite normal form of an integer basis (same lattice):
    echelon, positive pivots, entries above each pivot reduced mod it."""
    a = [list(map(int, r)) for r in rows]
    cols = len(a[0]) if a else 0
    r = 0
    for c in range(cols):
        while True:
            nz = [i for i in range(r, len(a)) if a[i][c]]
            if not nz:
                break
            p = min(nz, key=lambda i: abs(a[i][c]))
            a[r], a[p] = a[p], a[r]
            done = True
            for i in range(r + 1, len(a)):
                if a[i][c]:
                    q = a[i][c] // a[r][c]
                    a[i] = [x - q * y for x, y in zip(a[i], a[r])]
                    if a[i][c]:
                        done = False
            if done:
                break
        if r < len(a) and a[r][c]:
            if a[r][c] < 0:
                a[r] = [-x for x in a[r]]
            for i in range(r):
                q = a[i][c] // a[r][c]
                a[i] = [x - q * y for x, y in zip(a[i], a[r])]
            r += 1
        if r == len(a):
            break
    return [row for row in a if any(row)]


def nullspace_mod_with_orders(m: Sequence[Sequence[int]], n: int, cols: int | None = None):
    """Generators g_i of {x : M x = 0 mod n} with their additive orders o_i;
    every solution is uniquely sum c_i g_i with 0 <= c_i < o_i."""
    if n < 2:
        raise ValueError("modulus must be >= 2")
    if cols is None:
        cols = len(m[0]) if m else 0
    if not m:
        return [([int(i == j) for i in range(cols)], n) for j in range(cols)]
    _, s, v = smith_normal_form(m)
    out = []
    for j in range(cols):
        d = s[j][j] if j < len(s) else 0
        g = gcd(d, n)  # y_j ranges over multiples of n/g, giving g values
        if g == 1:
            continue
        mult = n // g
        vec = [(v[i][j] * mult) % n for i in range(cols)]
        out.append((vec, g))
    return out


def nullspace_mod(m: Sequence[Sequence[int]], n: int, cols: int | None = None) -> list[list[int]]:
    """Generating set of {x : M x = 0 mod n}; a basis when n is prime."""
    return [g for g, _ in nullspace_mod_with_orders(m, n, cols)]


def mat_mod_vec(m: Sequence[Sequence[int]], x: Sequence[int], n: int) -> list[int]:
    return [sum(a * b for a, b in zip(r, x)) % n for r in m]


def determinant(m: Sequence[Sequence[int]]) -> int:
    n = len(m)
    b = [[Fraction(x) for x in r] for r in m]
    det = Fraction(1)
    for c in range(n):
        p = next((i for i in range(c, n) if b[i][c] != 0), None)
        if p is None:
            return 0
        if p != c:
            b[c], b[p] = b[p], b[c]
            det = -det
        det *= b[c][c]
        for i in range(c + 1, n):
            f = b[i][c] / b[c][c]
            if f:
                b[i] = [x - f * y for x, y in zip(b[i], b[c])]
    assert det.denominator == 1
    return int(det)
