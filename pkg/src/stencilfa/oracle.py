"""Dense torus assembly: the brute-force cross-check for the symbol machinery.

Any multiplication operator can be materialized as one big matrix on the
finite torus L(A)/L(Z) with Z = A*M.  Rows and columns are indexed by
(torus point, structure index) with the structure index fastest and torus
points in the canonical quotient listing.  The union of the symbol spectra
over the sampled dual torus must equal the spectrum of this matrix, which is
what the high-level tests assert; none of the frequency-space code is used
to build it.

Sizes are deliberately capped (|det M| <= 10^4 block rows): this module is
for desk-scale verification, not production runs.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import pi

import numpy as np

from .crystal import Lattice, QuotientMap, StructureElement, sample_dual_torus
from .intlat import det_exact
from .operator import MultiplicationOperator, make_compatible

DENSE_CAP = 10**4


@dataclass(frozen=True)
class DenseTorusOperator:
    resolution: tuple[tuple[int, ...], ...]
    points: tuple[tuple[int, ...], ...]
    matrix: np.ndarray


def _torus_quotient(a: Lattice, m) -> QuotientMap:
    mm = [[int(x) for x in row] for row in m]
    count = abs(det_exact(mm))
    if count == 0:
        raise ValueError("resolution matrix is singular")
    if count > DENSE_CAP:
        raise ValueError(f"torus too large for dense assembly (|det M| = {count} > {DENSE_CAP})")
    z = Lattice(a.basis @ np.array(mm, dtype=float))
    return QuotientMap(a, z)


def _torus_map(l: MultiplicationOperator, m) -> QuotientMap:
    return _torus_quotient(l.lattice, m)


def assemble_dense(l: MultiplicationOperator, m) -> DenseTorusOperator:
    """Dense matrix of L on the torus with Z = A*M.

    Block (i, j) accumulates every multiplier whose offset connects torus
    point i to torus point j modulo L(Z); periodic wrap-around merges offsets
    that become equivalent on the finite torus.
    """
    qm = _torus_map(l, m)
    n_pts = len(qm.reps)
    mc, md = l.shape
    out = np.zeros((n_pts * mc, n_pts * md), dtype=complex)
    for i, rep in enumerate(qm.reps):
        for off, mat in l.multipliers.items():
            x = tuple(r + o for r, o in zip(rep, off))
            j = qm.index[qm.residue(x)]
            out[i * mc:(i + 1) * mc, j * md:(j + 1) * md] += mat
    resolution = tuple(tuple(int(x) for x in row) for row in m)
    return DenseTorusOperator(resolution=resolution, points=tuple(qm.reps), matrix=out)


def dense_spectrum(d: DenseTorusOperator) -> list[complex]:
    return [complex(v) for v in np.linalg.eigvals(d.matrix)]


def wave_basis(a: Lattice, m, se: StructureElement) -> list[np.ndarray]:
    """Orthonormal wave vectors on the torus listing, k outer, position inner.

    The vector for (k, l) carries exp(+2*pi*i*<k_frac, x>) at structure slot l
    of every torus point x and zero elsewhere; it is normalized with respect
    to the averaged inner product <f, g> = (1/|T|) sum conj(f) g.
    """
    qm = _torus_quotient(a, m)
    samples = sample_dual_torus(a, m)
    n_pts = len(qm.reps)
    width = len(se)
    out = []
    for sample in samples:
        phases = np.empty(n_pts, dtype=complex)
        for i, rep in enumerate(qm.reps):
            t = sum(f * r for f, r in zip(sample.k_frac, rep))
            phases[i] = np.exp(2j * pi * float(t))
        for slot in range(width):
            vec = np.zeros(n_pts * width, dtype=complex)
            vec[slot::width] = phases
            out.append(vec)
    return out


def translation_residual(matrix: np.ndarray, a: Lattice, m, shape: tuple[int, int]) -> float:
    """Max Frobenius commutator norm of a dense torus matrix with the
    primitive translations; shape gives the (codomain, domain) block sizes."""
    qm = _torus_quotient(a, m)
    n_pts = len(qm.reps)
    mc, md = shape
    worst = 0.0
    for axis in range(a.dim):
        step = tuple(1 if c == axis else 0 for c in range(a.dim))
        perm = [qm.index[qm.residue(tuple(r + s for r, s in zip(rep, step)))] for rep in qm.reps]
        t_dom = np.zeros((n_pts * md, n_pts * md))
        t_cod = np.zeros((n_pts * mc, n_pts * mc))
        for i, j in enumerate(perm):
            t_dom[i * md:(i + 1) * md, j * md:(j + 1) * md] = np.eye(md)
            t_cod[i * mc:(i + 1) * mc, j * mc:(j + 1) * mc] = np.eye(mc)
        resid = matrix @ t_dom - t_cod @ matrix
        worst = max(worst, float(np.linalg.norm(resid)))
    return worst


def check_translation_invariance(l: MultiplicationOperator, m) -> float:
    """Max Frobenius norm of the commutator with the primitive translations."""
    dense = assemble_dense(l, m)
    return translation_residual(dense.matrix, l.lattice, m, l.shape)


def eval_dense(expr, env, m) -> np.ndarray:
    """Evaluate an expression on dense torus matrices (independent route).

    The operators are rewritten on their common lattice first, exactly like
    compute_spectrum does, then each is assembled on the torus Z = C*M and the
    expression is evaluated on the big matrices, pseudo-inverses included.
    """
    names = list(env)
    if not names:
        raise ValueError("expression environment is empty")
    compatible = make_compatible([env[name] for name in names])
    denses = {name: assemble_dense(op, m).matrix for name, op in zip(names, compatible)}
    return expr.eval_matrices(denses)


def spectrum_distance(eigs_a, eigs_b) -> float:
    """Largest gap in a greedy closest-pair matching of two eigenvalue lists.

    Sorting by (re, im) and zipping is unstable for conjugate pairs whose real
    parts agree to rounding, so the multisets are compared by repeatedly
    pairing the globally closest remaining values instead.
    """
    a = [complex(e) for e in eigs_a]
    b = [complex(e) for e in eigs_b]
    if len(a) != len(b):
        raise ValueError(f"eigenvalue counts differ: {len(a)} vs {len(b)}")
    rest = list(b)
    worst = 0.0
    for e in sorted(a, key=lambda z: (-abs(z), z.real, z.imag)):
        nearest = min(range(len(rest)), key=lambda i: abs(rest[i] - e))
        worst = max(worst, abs(rest.pop(nearest) - e))
    return worst
