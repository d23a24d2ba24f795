"""Dense exact linear algebra over Fraction.

Small matrices only (the geometry and complexes in this package are desk
scale); everything is plain Gaussian elimination with exact pivots.
Matrices are tuples/lists of row tuples.
"""

from __future__ import annotations

from fractions import Fraction


def mat_vec(m, v):
    return tuple(sum(r[j] * v[j] for j in range(len(v))) for r in m)


def vec_mat(v, m):
    """Row covector times matrix."""
    n = len(m[0])
    return tuple(sum(v[i] * m[i][j] for i in range(len(v))) for j in range(n))


def mat_mul(a, b):
    rows, inner, cols = len(a), len(b), len(b[0])
    return tuple(
        tuple(sum(a[i][k] * b[k][j] for k in range(inner)) for j in range(cols))
        for i in range(rows)
    )


def identity(n):
    return tuple(tuple(Fraction(int(i == j)) for j in range(n)) for i in range(n))


def det(m):
    """Determinant by fraction-free-ish elimination (exact over Fraction)."""
    n = len(m)
    a = [list(map(Fraction, row)) for row in m]
    sign = 1
    d = Fraction(1)
    for col in range(n):
        piv = next((r for r in range(col, n) if a[r][col] != 0), None)
        if piv is None:
            return Fraction(0)
        if piv != col:
            a[col], a[piv] = a[piv], a[col]
            sign = -sign
        d *= a[col][col]
        inv = 1 / a[col][col]
        for r in range(col + 1, n):
            if a[r][col] != 0:
                f = a[r][col] * inv
                for c in range(col, n):
                    a[r][c] -= f * a[col][c]
    return sign * d


def rref(m):
    """Reduced row echelon form; returns (rows, pivot_columns)."""
    if not m:
        return [], []
    a = [list(map(Fraction, row)) for row in m]
    nrows, ncols = len(a), len(a[0])
    pivots = []
    row = 0
    for col in range(ncols):
        piv = next((r for r in range(row, nrows) if a[r][col] != 0), None)
        if piv is None:
            continue
        a[row], a[piv] = a[piv], a[row]
        inv = 1 / a[row][col]
        a[row] = [x * inv for x in a[row]]
        for r in range(nrows):
            if r != row and a[r][col] != 0:
                f = a[r][col]
                a[r] = [x - f * y for x, y in zip(a[r], a[row])]
        pivots.append(col)
        row += 1
        if row == nrows:
            break
    return a[:row], pivots


def rank(m):
    return len(rref(m)[0])


def solve(m, b):
    """One exact solution of m x = b, or None if inconsistent.

    m need not be square; free variables are set to zero.
    """
    if not m:
        return None if any(x != 0 for x in b) else ()
    ncols = len(m[0])
    aug = [list(row) + [bb] for row, bb in zip(m, b)]
    rows, pivots = rref(aug)
    for r in rows:
        if all(x == 0 for x in r[:ncols]) and r[ncols] != 0:
            return None
    x = [Fraction(0)] * ncols
    for r, col in zip(rows, pivots):
        if col == ncols:
            return None
        x[col] = r[ncols]
    return tuple(x)


def kernel_basis(m):
    """Basis of the right kernel of m (list of Fraction tuples)."""
    if not m:
        return []
    ncols = len(m[0])
    rows, pivots = rref(m)
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for f in free:
        v = [Fraction(0)] * ncols
        v[f] = Fraction(1)
        for r, col in zip(rows, pivots):
            v[col] = -r[f]
        basis.append(tuple(v))
    return basis


def invert(m):
    """Inverse of a square matrix, or None if singular."""
    n = len(m)
    aug = [list(map(Fraction, row)) + list(identity(n)[i]) for i, row in enumerate(m)]
    rows, pivots = rref(aug)
    if len(rows) < n or pivots[:n] != list(range(n)):
        return None
    return tuple(tuple(r[n:]) for r in rows[:n])
