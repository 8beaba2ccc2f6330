"""Lattices, structure elements and the quotient/dual machinery built on them.

A lattice L(A) = A*Z^n is stored through its float basis (columns = primitive
vectors; graphene needs sqrt(3), so exact bases are out of reach), but every
*relation* between two lattices is reconstructed as an exact rational matrix
before any decision is made.  Sublattice tests, quotient enumeration, lattice
lcm and dual-torus sampling therefore behave exactly even when the bases
themselves are irrational.

Structure elements are ordered tuples of fractional coordinates with respect
to the lattice basis, kept as ``Fraction``s.  The order is significant: block
operators act on value tuples indexed by it.

Torus representatives follow a fixed canonical listing: with H the Hermite
normal form of the relation, the representative with counter i-1 has the
mixed-radix digits of i-1 with respect to (H_11, ..., H_nn), the first basis
direction varying fastest.  Dual-torus samples reuse that listing on the dual
relation M^T and are reduced into [0,1)^n exactly.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import floor, gcd, lcm, prod

import numpy as np

from .intlat import (
    Matrix,
    det_exact,
    hnf,
    is_integral,
    mat_inv,
    mat_mul,
    rational_reconstruct,
    snf,
)


class Lattice:
    """A full-rank lattice given by its basis matrix (columns = generators)."""

    def __init__(self, basis):
        arr = np.array(basis, dtype=float)
        if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
            raise ValueError("lattice basis must be a square matrix")
        col_scale = prod(float(np.linalg.norm(arr[:, j])) for j in range(arr.shape[1]))
        if col_scale == 0.0 or abs(np.linalg.det(arr)) <= 1e-12 * col_scale:
            raise ValueError("lattice basis is singular")
        arr.setflags(write=False)
        self.basis = arr

    @property
    def dim(self) -> int:
        return self.basis.shape[0]

    def point(self, coords) -> np.ndarray:
        """Physical position of fractional/integer coordinates w.r.t. the basis."""
        return self.basis @ np.array([float(c) for c in coords])

    def scaled(self, factor: float) -> "Lattice":
        return Lattice(self.basis * factor)

    def __repr__(self) -> str:
        rows = "; ".join(" ".join(f"{x:.6g}" for x in row) for row in self.basis)
        return f"Lattice([{rows}])"


def _coerce_point(p) -> tuple[Fraction, ...]:
    return tuple(Fraction(x) for x in p)


class StructureElement:
    """Ordered tuple of intra-cell positions in fractional coordinates."""

    __slots__ = ("points",)

    def __init__(self, points):
        self.points = tuple(_coerce_point(p) for p in points)
        if not self.points:
            raise ValueError("structure element needs at least one point")
        n = len(self.points[0])
        if any(len(p) != n for p in self.points):
            raise ValueError("structure element points must share a dimension")

    @property
    def dim(self) -> int:
        return len(self.points[0])

    def __len__(self) -> int:
        return len(self.points)

    def __getitem__(self, i):
        return self.points[i]

    def __iter__(self):
        return iter(self.points)

    def __eq__(self, other) -> bool:
        return isinstance(other, StructureElement) and self.points == other.points

    def __hash__(self) -> int:
        return hash(self.points)

    def __repr__(self) -> str:
        pts = ", ".join("(" + ", ".join(str(x) for x in p) + ")" for p in self.points)
        return f"StructureElement[{pts}]"

    def shifted(self, offset) -> "StructureElement":
        off = _coerce_point(offset)
        return StructureElement([tuple(x + o for x, o in zip(p, off)) for p in self.points])


@dataclass(frozen=True)
class Crystal:
    lattice: Lattice
    se: StructureElement


@dataclass(frozen=True)
class DualSample:
    """One sampled wave vector: exact fractional plus physical coordinates."""

    k_frac: tuple[Fraction, ...]
    k_phys: tuple[float, ...]


def relation(a: Lattice, c: Lattice) -> Matrix:
    """Exact rational matrix A^-1 C relating two lattice bases."""
    if a.dim != c.dim:
        raise ValueError("lattices have different dimensions")
    rel = np.linalg.solve(a.basis, c.basis)
    return rational_reconstruct(rel.tolist())


def is_sublattice(a: Lattice, c: Lattice) -> bool:
    """True iff L(C) is a sublattice of L(A), i.e. A^-1 C is integral."""
    try:
        rel = relation(a, c)
    except ValueError:
        return False
    return is_integral(rel)


def lattice_equal(a: Lattice, c: Lattice) -> bool:
    """True iff both lattices contain each other (A^-1 C unimodular)."""
    try:
        rel = relation(a, c)
    except ValueError:
        return False
    return is_integral(rel) and abs(det_exact(rel)) == 1


def integral_relation(a: Lattice, c: Lattice) -> list[list[int]]:
    rel = relation(a, c)
    if not is_integral(rel):
        raise ValueError("not a sublattice")
    return [[int(x) for x in row] for row in rel]


def _quotient_listing(h: list[list[int]]) -> list[tuple[int, ...]]:
    n = len(h)
    diag = [int(h[l][l]) for l in range(n)]
    count = prod(diag)
    out = []
    for i in range(count):
        k = i
        digits = []
        for l in range(n):
            digits.append(k % diag[l])
            k //= diag[l]
        out.append(tuple(digits))
    return out


def elements_in_quotient(a: Lattice, c: Lattice) -> StructureElement:
    """Canonical representatives of L(A)/L(C) as integer coordinates w.r.t. A.

    The listing is the mixed-radix counter over the diagonal of hnf(A^-1 C),
    first coordinate fastest, so it is reproducible across runs.
    """
    rel = integral_relation(a, c)
    h = hnf(rel).H
    return StructureElement(_quotient_listing(h))


class QuotientMap:
    """Exact residue arithmetic for L(A)/L(C), everything in A-coordinates.

    ``reps`` is the canonical listing (same order as elements_in_quotient);
    ``locate`` decomposes any integer vector x as rep_k + rel*z with z the
    integer sublattice offset.
    """

    def __init__(self, a: Lattice, c: Lattice):
        self.rel = integral_relation(a, c)
        self.n = len(self.rel)
        self.h = hnf(self.rel).H
        self.rel_inv = mat_inv(self.rel)
        self.reps = _quotient_listing(self.h)
        self.index = {r: q for q, r in enumerate(self.reps)}

    def residue(self, x) -> tuple[int, ...]:
        r = list(x)
        for col in range(self.n - 1, -1, -1):
            q = r[col] // self.h[col][col]
            for row in range(col + 1):
                r[row] -= q * self.h[row][col]
        return tuple(r)

    def locate(self, x) -> tuple[int, tuple[int, ...]]:
        """Index k and integer z such that x = reps[k] + rel*z."""
        rep = self.residue(x)
        k = self.index[rep]
        d = [x[i] - rep[i] for i in range(self.n)]
        z = []
        for r in range(self.n):
            val = Fraction(sum(self.rel_inv[r][c] * d[c] for c in range(self.n)))
            if val.denominator != 1:
                raise AssertionError("residue decomposition left a fractional offset")
            z.append(int(val))
        return k, tuple(z)


def lcm_lattice(a: Lattice, b: Lattice) -> Lattice:
    """Coarsest common sublattice of two rationally related lattices."""
    try:
        rel = relation(a, b)
    except ValueError:
        raise ValueError("no common sublattice") from None
    r = 1
    for row in rel:
        for x in row:
            if isinstance(x, Fraction):
                r = lcm(r, x.denominator)
    m = [[int(x * r) for x in row] for row in rel]
    res = snf(m)
    n = len(m)
    scale = [r // gcd(r, int(res.S[i][i])) for i in range(n)]
    cols = mat_mul(res.U, [[scale[j] if i == j else 0 for j in range(n)] for i in range(n)])
    # reduce to the Hermite basis of the same lattice: the raw Smith transform
    # can have huge entries, and a skew float basis loses determinant digits
    return Lattice(b.basis @ np.array(hnf(cols).H, dtype=float))


def dual_basis(a: Lattice) -> Lattice:
    """Lattice of wave vectors with integer inner products against L(A)."""
    return Lattice(np.linalg.inv(a.basis).T)


def _frac_mod1(x: Fraction) -> Fraction:
    return x - floor(x)


def sample_dual_torus(a: Lattice, m) -> list[DualSample]:
    """All |det M| wave vectors of the dual torus for Z = A*M.

    The representatives of the quotient dual(Z)/dual(A) are enumerated through
    hnf(M^T) in the canonical quotient order and reduced into [0,1)^n, kept as
    exact rationals; the physical wave vector is A^-T times that.
    """
    mm = [[int(x) for x in row] for row in m]
    n = len(mm)
    if any(len(row) != n for row in mm) or n != a.dim:
        raise ValueError("resolution matrix must be square and match the lattice dimension")
    if det_exact(mm) == 0:
        raise ValueError("resolution matrix is singular")
    mt = [[mm[j][i] for j in range(n)] for i in range(n)]
    h = hnf(mt).H
    minv_t = mat_inv(mt)  # rows of M^-T
    dual = dual_basis(a)
    samples = []
    for j in _quotient_listing(h):
        k_frac = tuple(_frac_mod1(Fraction(sum(minv_t[i][l] * j[l] for l in range(n))))
                       for i in range(n))
        k_phys = tuple(float(x) for x in dual.basis @ np.array([float(f) for f in k_frac]))
        samples.append(DualSample(k_frac=k_frac, k_phys=k_phys))
    return samples
