"""Dense torus assembly and cross-validation oracle tests."""

from fractions import Fraction

import numpy as np
import pytest

from oracles import pair_eigenvalues
from stencilfa.crystal import Lattice, StructureElement, sample_dual_torus
from stencilfa.expr import parse
from stencilfa.operator import (
    MultiplicationOperator,
    identity_operator,
    lattice_coarsening,
    mask_central,
    mul,
    normalize,
)
from stencilfa.oracle import (
    DENSE_CAP,
    assemble_dense,
    check_translation_invariance,
    dense_spectrum,
    eval_dense,
    translation_residual,
    wave_basis,
)
from stencilfa.symbol import symbol_at

SQUARE = Lattice([[1, 0], [0, 1]])
POINT = StructureElement([(0, 0)])


def five_point(h=1.0):
    w = 1.0 / (h * h)
    return MultiplicationOperator(
        Lattice(np.eye(2) / h),
        POINT,
        POINT,
        {
            (0, 0): [[4 * w]],
            (1, 0): [[-w]],
            (-1, 0): [[-w]],
            (0, 1): [[-w]],
            (0, -1): [[-w]],
        },
    )


def red_black_laplacian(h=1.0):
    return normalize(
        lattice_coarsening(five_point(h), Lattice(np.array([[1.0, 1.0], [1.0, -1.0]]) / h))
    )


def test_identity_assembles_to_identity():
    ident = identity_operator(SQUARE, POINT)
    for m in ([[1, 0], [0, 1]], [[3, 0], [0, 2]], [[2, 3], [2, -2]]):
        dense = assemble_dense(ident, m)
        assert np.array_equal(dense.matrix, np.eye(len(dense.points)))


def test_laplacian_wraps_on_two_torus():
    # on the 2x2 torus the +a and -a couplings land on the same neighbor and
    # merge into -2/h^2
    h = 0.5
    dense = assemble_dense(five_point(h), [[2, 0], [0, 2]])
    assert dense.matrix.shape == (4, 4)
    w = 1.0 / h**2
    for i in range(4):
        assert dense.matrix[i, i] == 4 * w
    off = dense.matrix.copy()
    np.fill_diagonal(off, 0)
    # each point couples to the two distinct wrapped neighbors, doubled
    for i in range(4):
        row = sorted(off[i].real)
        assert row == [-2 * w, -2 * w, 0.0, 0.0]


def test_masked_central_block_diagonal():
    rb = red_black_laplacian()
    sr = mask_central(rb, (True, False))
    dense = assemble_dense(sr, [[2, 0], [0, 2]])
    want = np.kron(np.eye(4), np.diag([4.0, 0.0]))
    assert np.allclose(dense.matrix, want, atol=1e-14)


def test_dense_spectrum_trivial_cases():
    ident = identity_operator(SQUARE, POINT)
    evs = dense_spectrum(assemble_dense(ident, [[2, 0], [0, 3]]))
    assert np.allclose(sorted(ev.real for ev in evs), np.ones(6), atol=1e-14)

    zero = MultiplicationOperator(SQUARE, POINT, POINT, {(0, 0): [[1.0]]})
    from stencilfa.operator import scale

    evs = dense_spectrum(assemble_dense(scale(0.0 + 0j, zero), [[2, 0], [0, 2]]))
    assert max(abs(ev) for ev in evs) < 1e-15


def test_dense_spectrum_matches_symbol_union():
    l = five_point()
    m = [[4, 0], [0, 4]]
    dense_evs = dense_spectrum(assemble_dense(l, m))
    sym_evs = [
        ev
        for s in sample_dual_torus(l.lattice, m)
        for ev in np.linalg.eigvals(symbol_at(l, s).matrix)
    ]
    assert pair_eigenvalues(dense_evs, sym_evs) < 1e-8


def test_resolution_validation():
    l = five_point()
    with pytest.raises(ValueError, match="singular"):
        assemble_dense(l, [[1, 0], [2, 0]])
    n = int(np.ceil(np.sqrt(DENSE_CAP))) + 1
    with pytest.raises(ValueError, match="too large"):
        assemble_dense(l, [[n, 0], [0, n]])


# ------------------------------------------------------------- wave basis


def test_wave_basis_single_point():
    vecs = wave_basis(SQUARE, [[1, 0], [0, 1]], POINT)
    assert len(vecs) == 1
    assert np.allclose(vecs[0], [1.0])


def test_wave_basis_gram_scalar():
    vecs = wave_basis(SQUARE, [[2, 0], [0, 2]], POINT)
    assert len(vecs) == 4
    w = np.stack(vecs, axis=1)
    gram = w.conj().T @ w / 4.0
    assert np.abs(gram - np.eye(4)).max() < 1e-12


def test_wave_basis_gram_red_black():
    rb = red_black_laplacian()
    vecs = wave_basis(rb.lattice, [[2, 0], [0, 2]], rb.domain_se)
    assert len(vecs) == 8
    w = np.stack(vecs, axis=1)
    gram = w.conj().T @ w / 4.0
    assert np.abs(gram - np.eye(8)).max() < 1e-12


def test_wave_basis_gram_skew_resolution():
    vecs = wave_basis(SQUARE, [[2, 3], [2, -2]], POINT)
    assert len(vecs) == 10
    w = np.stack(vecs, axis=1)
    gram = w.conj().T @ w / 10.0
    assert np.abs(gram - np.eye(10)).max() < 1e-12


def test_harmonic_invariance():
    # the dense operator maps each harmonic subspace span{e_{l,k}} to itself
    rb = red_black_laplacian()
    m = [[3, 0], [0, 3]]
    dense = assemble_dense(rb, m).matrix
    vecs = wave_basis(rb.lattice, m, rb.domain_se)
    n_t = 9
    width = 2
    for ki in range(n_t):
        w_k = np.stack(vecs[ki * width:(ki + 1) * width], axis=1)
        q, _ = np.linalg.qr(w_k)
        img = dense @ w_k
        resid = img - q @ (q.conj().T @ img)
        assert np.linalg.norm(resid) < 1e-10


# ------------------------------------------------------ invariance checker


def test_invariance_of_identity_is_zero():
    ident = identity_operator(SQUARE, POINT)
    assert check_translation_invariance(ident, [[3, 0], [0, 3]]) == 0.0


def test_invariance_of_laplacian():
    assert check_translation_invariance(five_point(), [[4, 0], [0, 3]]) < 1e-10


def test_invariance_of_rectangular_operator():
    rb = red_black_laplacian()
    r = MultiplicationOperator(
        rb.lattice,
        rb.domain_se,
        POINT,
        {(0, 0): [[1.0, 0.5]], (1, 0): [[0.0, 0.5]]},
    )
    assert check_translation_invariance(r, [[3, 0], [0, 2]]) < 1e-10


def test_position_dependent_matrix_flagged():
    # a diagonal that depends on the torus point is not translation invariant
    m = [[3, 0], [0, 3]]
    bad = np.diag(np.arange(1.0, 10.0))
    resid = translation_residual(bad, SQUARE, m, (1, 1))
    assert resid > 0.1


# ------------------------------------------------------------- composition


def test_assembly_respects_composition():
    l = five_point()
    g = MultiplicationOperator(
        SQUARE,
        POINT,
        POINT,
        {(0, 0): [[0.5]], (1, 1): [[0.25j]], (-1, 0): [[-0.125]]},
    )
    m = [[3, 0], [0, 4]]
    left = assemble_dense(mul(l, g), m).matrix
    right = assemble_dense(l, m).matrix @ assemble_dense(g, m).matrix
    assert np.linalg.norm(left - right) < 1e-10


def test_eval_dense_equals_manual_assembly():
    l = five_point()
    m = [[2, 0], [0, 2]]
    got = eval_dense(parse("2*L - L*L"), {"L": l}, m)
    dl = assemble_dense(l, m).matrix
    assert np.allclose(got, 2 * dl - dl @ dl, atol=1e-12)


def test_eval_dense_identity_token():
    l = five_point()
    m = [[2, 0], [0, 2]]
    got = eval_dense(parse("I - 0.25*L"), {"L": l}, m)
    dl = assemble_dense(l, m).matrix
    assert np.allclose(got, np.eye(4) - 0.25 * dl, atol=1e-13)


def test_block_ordering_documented_layout():
    # structure slot fastest, torus point in quotient-listing order: for the
    # red-black crystal on M = diag(2,1) the listing is (0,0), (1,0)
    rb = red_black_laplacian()
    dense = assemble_dense(rb, [[2, 0], [0, 1]])
    assert dense.points == ((0, 0), (1, 0))
    assert dense.matrix.shape == (4, 4)
    # the (point 0, slot 0) row couples to slot-1 entries of both points
    sym0 = rb.multiplier((0, 0))
    assert dense.matrix[0, 0] == sym0[0][0]
