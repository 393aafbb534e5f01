import numpy as np
import pytest

import oracles as orc
from conftest import random_form
from hll import diagonal
from hll.exterior import DimensionError, Form, basis_enumerate, kahler_form, power
from hll.hyperdet import PreconditionError
from hll.lefschetz import (
    block_decomposition,
    check_hrr,
    check_ld,
    hodge_riemann_deformation_check,
    is_lefschetz,
    lefschetz_matrix,
    primitive_basis,
    q_gram,
    signature,
    singular_report,
)
from hll.positivity import FormMatrix, det_form, layers_from_bt, random_kahler_matrix, sample_bt


def diag_omega(b, t):
    return det_form(FormMatrix.from_layers(layers_from_bt(b, t)))


def test_q_gram_against_oracle(rng):
    for n, p, q in [(2, 1, 0), (3, 1, 0), (3, 0, 1), (4, 1, 1)]:
        k = n - p - q
        omega = Form.scalar(n)
        for _ in range(k):
            omega = omega ^ Form.from_matrix(random_kahler_matrix(rng, n))
        h = q_gram(omega, p, q)
        basis = basis_enumerate(n, p, q)
        go = orc.from_form(omega)
        for _ in range(5):
            x = random_form(rng, n, p, q)
            y = random_form(rng, n, p, q)
            want = orc.q_value(go, orc.from_form(x), orc.from_form(y), p, q)
            got = x.to_vector() @ h @ np.conj(y.to_vector())
            assert got == pytest.approx(want, rel=1e-10)
        assert np.abs(h - h.conj().T).max() <= 1e-12 * np.abs(h).max()
        assert len(basis) == h.shape[0]


def test_q_gram_needs_real_omega():
    with pytest.raises(PreconditionError):
        q_gram(kahler_form(2) * 1j, 1, 0)


def test_classical_signature():
    for n in (2, 3, 4):
        sig = signature(q_gram(power(kahler_form(n), n - 2), 1, 1))
        assert sig.triple == (n * n - 1, 1, 0)


def _oracle_rank(omega, p, q):
    n = omega.n
    go = orc.from_form(omega)
    images = [go ^ orc.from_form(Form(n, p, q, {key: 1})) for key in basis_enumerate(n, p, q)]
    masks = sorted({m for img in images for m in img.t})
    mat = np.array([[img.coeff(m) for img in images] for m in masks])
    return np.linalg.matrix_rank(mat, tol=1e-9 * np.abs(mat).max()) if mat.size else 0


def test_lefschetz_rank_against_oracle(rng):
    for n, p, q in [(3, 1, 1), (3, 1, 0), (4, 1, 1), (4, 2, 0)]:
        k = n - p - q
        good = Form.scalar(n)
        for _ in range(k):
            good = good ^ Form.from_matrix(random_kahler_matrix(rng, n))
        bad = power(Form.from_matrix(np.diag([1.0] * (n - 1) + [0.0])), k)
        for om in (good, bad):
            mat = lefschetz_matrix(om, p, q)
            assert np.linalg.matrix_rank(mat, tol=1e-9 * np.abs(mat).max()) == _oracle_rank(om, p, q)
        assert is_lefschetz(good, p, q).is_isomorphism
        assert not is_lefschetz(bad, p, q).is_isomorphism


def test_omega_powers_are_lefschetz():
    for n in range(1, 6):
        om = kahler_form(n)
        for p in range(n + 1):
            for q in range(n + 1 - p):
                rep = is_lefschetz(power(om, n - p - q), p, q)
                assert rep.is_isomorphism and rep.ratio > 1e-6


def test_degenerate_form_is_not_lefschetz():
    om = Form.from_matrix(np.diag([1.0, 0.0]))
    rep = is_lefschetz(om, 1, 0)
    assert not rep.is_isomorphism
    assert rep.min_singular_value == pytest.approx(0, abs=1e-14)


def test_bidegree_check():
    with pytest.raises(DimensionError):
        is_lefschetz(kahler_form(3), 1, 0)


def test_n4_two_zero_is_diagonal():
    b, t = sample_bt(4, 2)
    om = diag_omega(b, t)
    mat = lefschetz_matrix(om, 2, 0)
    coeffs = diagonal.omega_coefficients(b, t)
    expected = []
    for i, _ in basis_enumerate(4, 2, 0):
        rest = tuple(x for x in range(1, 5) if x not in i)
        expected.append(coeffs[rest])
    assert np.allclose(mat, np.diag(expected), rtol=0, atol=1e-12 * max(coeffs.values()))


def test_n4_one_one_blocks():
    b, t = sample_bt(4, 8)
    om = diag_omega(b, t)
    mat = lefschetz_matrix(om, 1, 1)
    coeffs = diagonal.omega_coefficients(b, t)
    blocks = block_decomposition(mat, 1e-12)
    sizes = sorted(len(x) for x in blocks)
    assert sizes == [1] * 12 + [4]
    (g_idx,) = [x for x in blocks if len(x) == 4]
    assert g_idx == [0, 5, 10, 15]
    g = mat[np.ix_(g_idx, g_idx)].real
    assert np.allclose(g, diagonal.g_block(coeffs, (1, 2, 3, 4)), atol=1e-12)
    # no negative entries anywhere
    assert mat.real.min() >= -1e-12


def test_all_ones_g_block():
    # b_l = 0, t_l = 1/2: every Omega_ij = 1, G = J - I
    om = diag_omega(np.zeros(4), np.full(4, 0.5))
    mat = lefschetz_matrix(om, 1, 1)
    g = mat[np.ix_([0, 5, 10, 15], [0, 5, 10, 15])].real
    assert np.array_equal(g, np.ones((4, 4)) - np.eye(4))
    assert orc.det_direct(g) == pytest.approx(-3, abs=1e-12)


def test_heron_identity_and_ptolemy():
    for s in range(20):
        b, t = sample_bt(4, s)
        coeffs = diagonal.omega_coefficients(b, t)
        g = diagonal.g_block(coeffs, (1, 2, 3, 4))
        a_, b_, c_ = diagonal.heron_sides(coeffs, (1, 2, 3, 4))
        assert np.linalg.det(g) == pytest.approx(diagonal.heron_product(a_, b_, c_), rel=1e-9)
        assert min(diagonal.triangle_gaps(a_, b_, c_)) > 0
        assert diagonal.ptolemy_gap(b, (1, 2, 3, 4)) >= -1e-12


def test_hrr_and_ld_for_kahler_product(rng):
    n = 4
    om = Form.from_matrix(random_kahler_matrix(rng, n)) ^ Form.from_matrix(random_kahler_matrix(rng, n))
    aux = Form.from_matrix(random_kahler_matrix(rng, n))
    ok, sig = check_hrr(om, aux, 1, 1)
    assert ok and sig.n_minus == 0 and sig.n_plus == 15
    assert primitive_basis(om, aux, 1, 1).dim == 15
    ld = check_ld(om, aux, 1, 1)
    assert ld and ld.image_dim + ld.primitive_dim == 16
    assert ld.orthogonality_residual < 1e-9


def test_hrr_fails_for_negative_omega():
    om = power(kahler_form(3), 2) * -1
    ok, _ = check_hrr(om, kahler_form(3), 1, 0)
    assert not ok


def test_deformation_check_classical_and_diag():
    m = FormMatrix.identity(2, 4)
    rep = hodge_riemann_deformation_check(m, 1, 1, t_steps=3)
    assert rep.passed and rep.first_failure is None
    b, t = sample_bt(4, 5)
    rep = hodge_riemann_deformation_check(FormMatrix.from_layers(layers_from_bt(b, t)), 1, 1, 5)
    assert rep.passed
    assert {r for _, r, _, _ in rep.rows} == {0, 1}


def test_block_decomposition_simple():
    m = np.array([[1, 0, 2], [0, 3, 0], [2, 0, 1]])
    assert sorted(block_decomposition(m)) == [[0, 2], [1]]


def test_singular_report_json():
    rep = singular_report(np.diag([1.0, 1e-12]), 0, 0)
    assert not rep.is_isomorphism
    d = rep.to_json()
    assert d["basis_id"] and d["threshold"] == 1e-9
