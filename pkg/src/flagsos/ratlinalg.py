"""Exact linear algebra over Fraction matrices (lists of lists).

Everything here is dense and small; clarity over asymptotics.
"""

from __future__ import annotations

from fractions import Fraction

from .errors import FlagSosError

Matrix = list[list[Fraction]]
Vector = list[Fraction]

_F0 = Fraction(0)
_F1 = Fraction(1)


def zeros(r: int, c: int) -> Matrix:
    return [[_F0] * c for _ in range(r)]


def identity(k: int) -> Matrix:
    m = zeros(k, k)
    for i in range(k):
        m[i][i] = _F1
    return m


def matmul(a: Matrix, b: Matrix) -> Matrix:
    rows, inner, cols = len(a), len(b), len(b[0])
    out = zeros(rows, cols)
    for i in range(rows):
        ai = a[i]
        oi = out[i]
        for k in range(inner):
            c = ai[k]
            if not c:
                continue
            bk = b[k]
            for j in range(cols):
                if bk[j]:
                    oi[j] += c * bk[j]
    return out


def matvec(a: Matrix, v: Vector) -> Vector:
    return [sum((ai[k] * v[k] for k in range(len(v)) if v[k]), _F0) for ai in a]


def transpose(a: Matrix) -> Matrix:
    return [list(col) for col in zip(*a)]


def rref(a: Matrix) -> tuple[Matrix, list[int]]:
    """Reduced row echelon form and pivot columns."""
    m = [row[:] for row in a]
    rows = len(m)
    cols = len(m[0]) if rows else 0
    pivots = []
    r = 0
    for c in range(cols):
        pivot = next((i for i in range(r, rows) if m[i][c]), None)
        if pivot is None:
            continue
        m[r], m[pivot] = m[pivot], m[r]
        pv = m[r][c]
        m[r] = [x / pv for x in m[r]]
        for i in range(rows):
            if i != r and m[i][c]:
                f = m[i][c]
                m[i] = [x - f * y for x, y in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
        if r == rows:
            break
    return m, pivots


def inverse(a: Matrix) -> Matrix:
    k = len(a)
    aug = [a[i][:] + identity(k)[i] for i in range(k)]
    red, pivots = rref(aug)
    if pivots != list(range(k)):
        raise FlagSosError("matrix is singular")
    return [row[k:] for row in red]


def nullspace(a: Matrix) -> list[Vector]:
    """Basis of the right kernel."""
    if not a:
        return []
    red, pivots = rref(a)
    cols = len(a[0])
    free = [c for c in range(cols) if c not in pivots]
    basis = []
    for fc in free:
        v = [_F0] * cols
        v[fc] = _F1
        for r, pc in enumerate(pivots):
            v[pc] = -red[r][fc]
        basis.append(v)
    return basis


def solve(a: Matrix, b: Vector) -> Vector | None:
    """One solution of a x = b, or None when inconsistent."""
    rows = len(a)
    cols = len(a[0]) if rows else 0
    aug = [a[i][:] + [b[i]] for i in range(rows)]
    red, pivots = rref(aug)
    if cols in pivots:
        return None
    x = [_F0] * cols
    for r, pc in enumerate(pivots):
        x[pc] = red[r][cols]
    return x


def rank(a: Matrix) -> int:
    return len(rref(a)[1])


def gram_schmidt(vectors: list[Vector]) -> list[Vector]:
    """Orthogonalize under the standard dot product, without normalizing.

    Dependent inputs are dropped.
    """
    basis: list[Vector] = []
    norms: list[Fraction] = []
    for v in vectors:
        w = v[:]
        for b, nb in zip(basis, norms):
            coef = sum((w[i] * b[i] for i in range(len(w)) if w[i] and b[i]), _F0) / nb
            if coef:
                w = [wi - coef * bi for wi, bi in zip(w, b)]
        n2 = sum((x * x for x in w if x), _F0)
        if n2:
            basis.append(w)
            norms.append(n2)
    return basis


def primitive_integer(v: Vector) -> list[int]:
    """Scale a rational vector to coprime integers with positive leading entry."""
    from math import gcd, lcm

    den = 1
    for x in v:
        den = lcm(den, x.denominator)
    ints = [int(x * den) for x in v]
    g = 0
    for x in ints:
        g = gcd(g, abs(x))
    if g:
        ints = [x // g for x in ints]
    lead = next((x for x in ints if x), 0)
    if lead < 0:
        ints = [-x for x in ints]
    return ints


def ldlt_psd(m: Matrix) -> tuple[bool, int]:
    """Exact PSD decision by pivoted symmetric elimination.

    Returns (is_psd, rank).  A symmetric matrix is PSD iff elimination never
    meets a negative diagonal pivot and every zero-diagonal row is entirely
    zero at its turn.
    """
    k = len(m)
    for row in m:
        if len(row) != k:
            raise FlagSosError("matrix must be square")
    for i in range(k):
        for j in range(i + 1, k):
            if m[i][j] != m[j][i]:
                raise FlagSosError("matrix must be symmetric")
    a = [row[:] for row in m]
    active = list(range(k))
    rnk = 0
    while active:
        pivot = next((i for i in active if a[i][i] > 0), None)
        if pivot is None:
            # all diagonal entries are <= 0 on the active set
            for i in active:
                if a[i][i] < 0:
                    return False, rnk
                if any(a[i][j] for j in active if j != i):
                    return False, rnk
            return True, rnk
        rnk += 1
        active.remove(pivot)
        piv = a[pivot][pivot]
        for i in active:
            f = a[i][pivot] / piv
            if not f:
                continue
            for j in active:
                a[i][j] -= f * a[pivot][j]
            a[i][pivot] = _F0
    return True, rnk
