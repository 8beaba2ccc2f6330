"""Exact normal forms of integer and rational matrices.

Everything in here runs on Python ints and ``fractions.Fraction``, so results
are exact for arbitrarily large entries.  The two normal forms used by the
lattice machinery are

* the (column-style) Hermite normal form  H = A * U,  where U is unimodular,
  H is upper triangular with non-negative entries and the maximum of each row
  on the diagonal, and
* the Smith normal form  S = V * A * U,  where U and V are unimodular and S is
  diagonal with s_1 | s_2 | ... | s_n.

Both forms are unique (the transforms are not) and both accept rational input:
a rational matrix is scaled by the least common multiple d of its entry
denominators, the integer normal form is computed, and the result is scaled
back by 1/d.  The transforms U, V stay integer unimodular either way.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd, lcm

Entry = int | Fraction
Matrix = list[list[Entry]]


def _as_exact(x) -> Entry:
    if isinstance(x, (int, Fraction)):
        return x
    if hasattr(x, "__index__"):  # numpy integers and friends
        return x.__index__()
    raise TypeError(f"exact matrix routines need int or Fraction entries, got {type(x).__name__}")


def _to_matrix(a) -> Matrix:
    m = [[_as_exact(x) for x in row] for row in a]
    n = len(m)
    if n == 0 or any(len(row) != len(m[0]) for row in m):
        raise ValueError("matrix must be rectangular and non-empty")
    return m


def _simplify(x: Entry) -> Entry:
    if isinstance(x, Fraction) and x.denominator == 1:
        return int(x)
    return x


def identity_matrix(n: int) -> Matrix:
    return [[1 if i == j else 0 for j in range(n)] for i in range(n)]


def mat_mul(a, b) -> Matrix:
    a, b = _to_matrix(a), _to_matrix(b)
    if len(a[0]) != len(b):
        raise ValueError("matrix shapes do not match")
    return [
        [_simplify(sum(a[i][k] * b[k][j] for k in range(len(b)))) for j in range(len(b[0]))]
        for i in range(len(a))
    ]


def mat_vec(a, v) -> list[Entry]:
    a = _to_matrix(a)
    return [_simplify(sum(a[i][k] * v[k] for k in range(len(v)))) for i in range(len(a))]


def det_exact(a) -> Entry:
    """Determinant by fraction-free style Gaussian elimination on Fractions."""
    m = [[Fraction(x) for x in row] for row in _to_matrix(a)]
    n = len(m)
    if any(len(row) != n for row in m):
        raise ValueError("determinant needs a square matrix")
    det = Fraction(1)
    for col in range(n):
        piv = next((r for r in range(col, n) if m[r][col] != 0), None)
        if piv is None:
            return 0
        if piv != col:
            m[col], m[piv] = m[piv], m[col]
            det = -det
        det *= m[col][col]
        inv = 1 / m[col][col]
        for r in range(col + 1, n):
            if m[r][col] != 0:
                f = m[r][col] * inv
                for c in range(col, n):
                    m[r][c] -= f * m[col][c]
    return _simplify(det)


def mat_inv(a) -> Matrix:
    """Exact inverse of a rational matrix via Gauss-Jordan elimination."""
    m = [[Fraction(x) for x in row] for row in _to_matrix(a)]
    n = len(m)
    if any(len(row) != n for row in m):
        raise ValueError("inverse needs a square matrix")
    aug = [row + [Fraction(int(i == j)) for j in range(n)] for i, row in enumerate(m)]
    for col in range(n):
        piv = next((r for r in range(col, n) if aug[r][col] != 0), None)
        if piv is None:
            raise ValueError("matrix is singular")
        aug[col], aug[piv] = aug[piv], aug[col]
        inv = 1 / aug[col][col]
        aug[col] = [x * inv for x in aug[col]]
        for r in range(n):
            if r != col and aug[r][col] != 0:
                f = aug[r][col]
                aug[r] = [x - f * p for x, p in zip(aug[r], aug[col])]
    return [[_simplify(x) for x in row[n:]] for row in aug]


def is_integral(a) -> bool:
    return all(isinstance(x, int) or (isinstance(x, Fraction) and x.denominator == 1)
               for row in _to_matrix(a) for x in row)


def is_unimodular(a) -> bool:
    """True iff the matrix is square, integral and has determinant +-1."""
    m = _to_matrix(a)
    if len(m) != len(m[0]) or not is_integral(m):
        return False
    return det_exact(m) in (1, -1)


def _denominator_lcm(m: Matrix) -> int:
    d = 1
    for row in m:
        for x in row:
            if isinstance(x, Fraction):
                d = lcm(d, x.denominator)
    return d


def _scaled_integer(m: Matrix) -> tuple[list[list[int]], int]:
    d = _denominator_lcm(m)
    return [[int(x * d) for x in row] for row in m], d


@dataclass(frozen=True)
class HnfResult:
    """Hermite normal form H together with a unimodular U such that A*U = H."""

    H: Matrix
    U: Matrix


@dataclass(frozen=True)
class SnfResult:
    """Smith normal form S together with unimodular V, U such that V*A*U = S."""

    S: Matrix
    U: Matrix
    V: Matrix


def _swap_cols(m, i, j):
    for row in m:
        row[i], row[j] = row[j], row[i]


def _addmul_col(m, dst, src, q):
    # column_dst -= q * column_src
    for row in m:
        row[dst] -= q * row[src]


def _negate_col(m, j):
    for row in m:
        row[j] = -row[j]


def hnf(a) -> HnfResult:
    """Column-style Hermite normal form of a nonsingular int/rational matrix.

    Works row by row from the bottom: Euclidean column operations collect the
    gcd of the active row into the pivot column, after which entries right of
    each pivot are reduced into [0, pivot).  Deterministic, so the returned U
    is reproducible.
    """
    m = _to_matrix(a)
    n = len(m)
    if len(m[0]) != n:
        raise ValueError("hnf needs a square matrix")
    b, d = _scaled_integer(m)
    u = identity_matrix(n)

    for i in range(n - 1, -1, -1):
        while True:
            cols = [j for j in range(i + 1) if b[i][j] != 0]
            if not cols:
                raise ValueError("matrix is singular")
            if len(cols) == 1:
                p = cols[0]
                break
            p = min(cols, key=lambda j: (abs(b[i][j]), j))
            for j in cols:
                if j != p:
                    q = b[i][j] // b[i][p]
                    if q:
                        _addmul_col(b, j, p, q)
                        _addmul_col(u, j, p, q)
        if p != i:
            _swap_cols(b, p, i)
            _swap_cols(u, p, i)
        if b[i][i] < 0:
            _negate_col(b, i)
            _negate_col(u, i)

    # reduce entries right of each diagonal into [0, diag); bottom row first so
    # finished rows are never touched again
    for i in range(n - 1, -1, -1):
        for j in range(i + 1, n):
            q = b[i][j] // b[i][i]
            if q:
                _addmul_col(b, j, i, q)
                _addmul_col(u, j, i, q)

    h = [[_simplify(Fraction(x, d)) for x in row] for row in b]
    return HnfResult(H=h, U=u)


def snf(a) -> SnfResult:
    """Smith normal form by alternating row/column gcd elimination."""
    m = _to_matrix(a)
    n = len(m)
    if len(m[0]) != n:
        raise ValueError("snf needs a square matrix")
    b, d = _scaled_integer(m)
    u = identity_matrix(n)
    v = identity_matrix(n)

    def swap_rows(i, j):
        b[i], b[j] = b[j], b[i]
        v[i], v[j] = v[j], v[i]

    def addmul_row(dst, src, q):
        for c in range(n):
            b[dst][c] -= q * b[src][c]
        for c in range(n):
            v[dst][c] -= q * v[src][c]

    for t in range(n):
        while True:
            entries = [(abs(b[r][c]), r, c) for r in range(t, n) for c in range(t, n) if b[r][c] != 0]
            if not entries:
                raise ValueError("matrix is singular")
            _, r, c = min(entries)
            if r != t:
                swap_rows(t, r)
            if c != t:
                _swap_cols(b, t, c)
                _swap_cols(u, t, c)

            dirty = False
            for r in range(t + 1, n):
                q = b[r][t] // b[t][t]
                if q:
                    addmul_row(r, t, q)
                if b[r][t] != 0:
                    dirty = True
            for c in range(t + 1, n):
                q = b[t][c] // b[t][t]
                if q:
                    _addmul_col(b, c, t, q)
                    _addmul_col(u, c, t, q)
                if b[t][c] != 0:
                    dirty = True
            if dirty:
                continue

            # enforce divisibility of the remaining block by the pivot
            bad = next(((r, c) for r in range(t + 1, n) for c in range(t + 1, n)
                        if b[r][c] % b[t][t] != 0), None)
            if bad is None:
                break
            addmul_row(t, bad[0], -1)  # fold the offending row in and restart

        if b[t][t] < 0:
            for c in range(n):
                b[t][c] = -b[t][c]
                v[t][c] = -v[t][c]

    s = [[_simplify(Fraction(x, d)) for x in row] for row in b]
    return SnfResult(S=s, U=u, V=v)


def rational_reconstruct(x, max_denominator: int = 10**6, tol: float = 1e-9) -> Matrix:
    """Reconstruct exact rationals from a float matrix, entry by entry.

    Each entry is replaced by the best rational approximation p/q with q
    bounded by ``max_denominator`` (continued-fraction expansion as done by
    ``Fraction.limit_denominator``).  A candidate is accepted only when it
    sits within ``tol`` AND within the unique-reconstruction zone
    1/(2*q*max_denominator); without the second gate the best approximant of
    any irrational with a large q would slip under a fixed tolerance, and
    callers rely on the raised error to detect incommensurable lattice pairs.
    """
    out: Matrix = []
    for row in x:
        new_row: list[Entry] = []
        for val in row:
            if isinstance(val, (int, Fraction)):
                new_row.append(_simplify(Fraction(val)))
                continue
            f = float(val)
            approx = Fraction(f).limit_denominator(max_denominator)
            gate = min(tol, 0.5 / (approx.denominator * max_denominator))
            if abs(float(approx) - f) > gate:
                raise ValueError("lattices not rationally related")
            new_row.append(_simplify(approx))
        out.append(new_row)
    return out
