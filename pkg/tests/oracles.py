"""Brute-force reference computations used to pin expected test values.

Nothing in here imports the package under test; every function recomputes its
answer from first principles (minors, residue counting, characteristic
polynomials) so the main library can be checked against an independent path.
"""

from __future__ import annotations

from fractions import Fraction
from itertools import combinations, product
from math import gcd, lcm

import numpy as np


def _minor_det(m, rows, cols):
    sub = [[m[r][c] for c in cols] for r in rows]
    k = len(rows)
    if k == 1:
        return sub[0][0]
    det = 0
    for j in range(k):
        minor = [row[:j] + row[j + 1:] for row in sub[1:]]
        det += (-1) ** j * sub[0][j] * _minor_det_square(minor)
    return det


def _minor_det_square(m):
    k = len(m)
    if k == 0:
        return 1
    if k == 1:
        return m[0][0]
    det = 0
    for j in range(k):
        minor = [row[:j] + row[j + 1:] for row in m[1:]]
        det += (-1) ** j * m[0][j] * _minor_det_square(minor)
    return det


def elementary_divisors(m) -> list[int]:
    """Smith diagonal of an integer matrix via gcds of k x k minors.

    d_k = gcd of all k x k minors, s_k = d_k / d_{k-1}.  Exponential in the
    size, fine for the tiny matrices used in tests.
    """
    n = len(m)
    idx = range(n)
    dk_prev = 1
    out = []
    for k in range(1, n + 1):
        g = 0
        for rows in combinations(idx, k):
            for cols in combinations(idx, k):
                g = gcd(g, abs(_minor_det(m, rows, cols)))
        out.append(g // dk_prev if dk_prev else 0)
        dk_prev = g
    return out


def intersection_determinant(a, b) -> Fraction:
    """|det| of the intersection of two rational lattices, by residue counting.

    A point A*j lies in L(B) iff Q*j is integral for Q = B^-1 A.  The set of
    such j is a sublattice J of Z^n containing d*Z^n for d = lcm of the
    denominators of Q, so counting the residues of J inside (Z/dZ)^n gives the
    index of J and with it the determinant of the intersection lattice A*J.
    """
    a = [[Fraction(x) for x in row] for row in a]
    b = [[Fraction(x) for x in row] for row in b]
    n = len(a)
    binv = _invert(b)
    q = _matmul(binv, a)
    d = 1
    for row in q:
        for x in row:
            d = lcm(d, x.denominator)
    count = 0
    for j in product(range(d), repeat=n):
        if all(sum(q[i][k] * j[k] for k in range(n)).denominator == 1 for i in range(n)):
            count += 1
    det_a = abs(_det(a))
    return det_a * d**n / count


def _invert(m):
    n = len(m)
    aug = [[Fraction(x) for x in row] + [Fraction(int(i == j)) for j in range(n)]
           for i, row in enumerate(m)]
    for col in range(n):
        piv = next(r for r in range(col, n) if aug[r][col] != 0)
        aug[col], aug[piv] = aug[piv], aug[col]
        inv = 1 / aug[col][col]
        aug[col] = [x * inv for x in aug[col]]
        for r in range(n):
            if r != col and aug[r][col] != 0:
                f = aug[r][col]
                aug[r] = [x - f * p for x, p in zip(aug[r], aug[col])]
    return [row[n:] for row in aug]


def _matmul(a, b):
    return [[sum(a[i][k] * b[k][j] for k in range(len(b))) for j in range(len(b[0]))]
            for i in range(len(a))]


def _det(m):
    m = [row[:] for row in m]
    n = len(m)
    det = Fraction(1)
    for col in range(n):
        piv = next((r for r in range(col, n) if m[r][col] != 0), None)
        if piv is None:
            return Fraction(0)
        if piv != col:
            m[col], m[piv] = m[piv], m[col]
            det = -det
        det *= m[col][col]
        for r in range(col + 1, n):
            if m[r][col] != 0:
                f = m[r][col] / m[col][col]
                for c in range(col, n):
                    m[r][c] -= f * m[col][c]
    return det


def charpoly_eigenvalues(m) -> np.ndarray:
    """Eigenvalues through characteristic-polynomial roots (Faddeev-LeVerrier).

    Numerically sane only for very small matrices; tests keep it at n <= 4.
    """
    a = np.asarray(m, dtype=complex)
    n = a.shape[0]
    coeffs = [1.0 + 0j]
    mk = np.zeros_like(a)
    for k in range(1, n + 1):
        mk = a @ mk + coeffs[-1] * np.eye(n)
        ck = -(a @ mk).trace() / k
        coeffs.append(ck)
    return np.roots(np.array(coeffs))


def pair_eigenvalues(left, right) -> float:
    """Greedy closest-pair matching distance between two eigenvalue multisets.

    Returns the largest distance in a greedy perfect matching.  A small result
    certifies the multisets agree to that tolerance; used instead of plain
    sorting so that conjugate pairs with equal real parts cannot be mispaired
    by floating-point ordering noise.
    """
    xs = list(np.asarray(left, dtype=complex))
    ys = list(np.asarray(right, dtype=complex))
    assert len(xs) == len(ys), "eigenvalue counts differ"
    worst = 0.0
    for x in sorted(xs, key=lambda z: (z.real, z.imag)):
        j = min(range(len(ys)), key=lambda i: abs(ys[i] - x))
        worst = max(worst, abs(ys[j] - x))
        ys.pop(j)
    return worst
