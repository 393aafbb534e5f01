import json

import numpy as np
import pytest

import oracles as orc
from conftest import random_hermitian
from hll.exterior import Form, V, kahler_form, volume_coefficient
from hll.hyperdet import Hypermatrix, PreconditionError, hdet
from hll.positivity import (
    FormMatrix,
    det_form,
    det_form_laplace,
    diagonal_layers,
    griffiths_min_quadratic,
    is_griffiths_positive_diagonalized,
    layers_from_bt,
    normal_form,
    normalize_gl_k,
    normalize_gl_n,
    omega_component,
    sample_bt,
    sample_diagonalized,
    sample_general,
    sample_general_mixed,
)


def test_identity_det_is_omega_power():
    for n, k in [(2, 2), (3, 2), (4, 3)]:
        om = det_form(FormMatrix.identity(k, n))
        expected = kahler_form(n)
        for _ in range(k - 1):
            expected = expected ^ kahler_form(n)
        assert om.allclose(expected)
    assert det_form(FormMatrix.identity(2, 2)) == 2 * V(2, 1, 2)


def test_det_against_grassmann_oracle(rng):
    for n, k in [(2, 2), (3, 2), (3, 3), (4, 2)]:
        m = sample_general(k, n, int(rng.integers(1 << 30)))
        got = orc.from_form(det_form(m))
        entries = [[orc.from_matrix(m.coeffs[i, j]) for j in range(k)] for i in range(k)]
        want = orc.det_leibniz(entries)
        assert got.max_diff(want) < 1e-12


def test_laplace_and_leibniz_agree(rng):
    m = sample_general_mixed(3, 4, 5)
    assert det_form(m).allclose(det_form_laplace(m), atol=1e-12)


def test_det_of_diagonalized_is_hdet_sum():
    b, t = sample_bt(4, 3)
    m = FormMatrix.from_layers(layers_from_bt(b, t))
    om = det_form(m)
    lay = diagonal_layers(m)
    for (i, j), c in om.items():
        assert i == j
        h = hdet(Hypermatrix(lay[[i[0] - 1, i[1] - 1]]))
        assert c == pytest.approx(h, rel=1e-12)


def test_diagonalized_certificate():
    m = sample_diagonalized(2, 4, 1)
    cert = is_griffiths_positive_diagonalized(m)
    assert cert.positive and cert.exact
    bad = FormMatrix.from_layers(np.stack([np.eye(2), np.diag([1.0, -0.5])]))
    cert = is_griffiths_positive_diagonalized(bad)
    assert cert.verdict == "not_positive"
    a = bad.quadratic(cert.witness_theta)
    assert a[1, 1].real == pytest.approx(cert.min_value)


def test_diagonal_layers_rejects_off_diagonal():
    m = FormMatrix.identity(2, 3)
    c = m.coeffs.copy()
    c[0, 1, 0, 2] = 0.1
    with pytest.raises(PreconditionError, match="monomial"):
        diagonal_layers(FormMatrix(c))


def test_general_sampler_margin():
    m = sample_general(2, 3, 11, margin=0.3)
    cert = griffiths_min_quadratic(m, seed=1)
    assert cert.verdict == "positive"
    assert cert.min_value >= 0.3 - 1e-12


def test_griffiths_min_finds_zero():
    # alpha_11 = alpha_22 = omega, alpha_12 = 2 e(1, 2): v^H A(theta) v reaches 0
    n = 2
    c = np.zeros((2, 2, n, n), dtype=complex)
    c[0, 0] = c[1, 1] = np.eye(n)
    c[0, 1, 0, 1] = 2
    c[1, 0, 1, 0] = 2
    cert = griffiths_min_quadratic(FormMatrix(c), seed=0)
    assert cert.verdict == "not_positive"
    assert abs(cert.min_value) < 1e-10
    val = cert.witness_direction.conj() @ FormMatrix(c).quadratic(cert.witness_theta) @ cert.witness_direction
    assert val.real == pytest.approx(cert.min_value, abs=1e-12)


def test_gl_n_normalization(rng):
    m = sample_general_mixed(2, 3, 4)
    m1, p = normalize_gl_n(m)
    assert np.allclose(m1.coeffs[0, 0], np.eye(3))
    d = m1.coeffs[1, 1]
    assert np.allclose(d, np.diag(np.diag(d)))
    assert np.allclose(m.change_coordinates(p).coeffs, m1.coeffs, atol=1e-10)
    # volume coefficient scales by |det P|^2 under z = P w
    m = sample_general_mixed(2, 2, 4)
    m1, p = normalize_gl_n(m)
    v0 = volume_coefficient(det_form(m))
    v1 = volume_coefficient(det_form(m1))
    assert v1 == pytest.approx(abs(np.linalg.det(p)) ** 2 * v0, rel=1e-10)


def test_coordinate_change_against_pullback(rng):
    # a (1,1)-form a_uv (i/2) dz_u dzbar_v pulled back by z = P w
    a = random_hermitian(rng, 3)
    p = rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3))
    n = 3
    pulled = orc.G(n)
    for u in range(n):
        for v in range(n):
            dzu = orc.G(n)
            dzbv = orc.G(n)
            for w in range(n):
                dzu = dzu + orc.dz(n, w + 1) * p[u, w]
                dzbv = dzbv + orc.dzb(n, w + 1) * np.conj(p[v, w])
            pulled = pulled + (dzu ^ dzbv) * (0.5j * a[u, v])
    m = FormMatrix(a[None, None])
    got = m.change_coordinates(p).coeffs[0, 0]
    assert orc.from_matrix(got).max_diff(pulled) < 1e-12


def test_gl_k_normalization(rng):
    m1, _ = normalize_gl_n(sample_general_mixed(3, 3, 9))
    g = normalize_gl_k(m1)
    mn = g.matrix
    for i in range(3):
        for j in range(3):
            lam = omega_component(mn.coeffs[i, j])
            assert lam == pytest.approx(1.0 if i == j else 0.0, abs=1e-12)
    assert np.allclose(m1.congruence(g.c).coeffs[1:], mn.coeffs[1:])
    assert g.det_factor == pytest.approx(abs(np.linalg.det(g.c)) ** 2)
    v0 = volume_coefficient(det_form(m1))
    assert volume_coefficient(det_form(mn)) == pytest.approx(g.det_factor * v0, rel=1e-10)


def test_gl_k_needs_normalized_first_entry():
    with pytest.raises(PreconditionError):
        normalize_gl_k(sample_general_mixed(2, 2, 1))


def test_normal_form(rng):
    for s in range(5):
        mn, p, c = normal_form(sample_general_mixed(2, 4, s))
        assert np.allclose(mn.coeffs[0, 0], np.eye(4))
        rho = mn.coeffs[1, 1] - np.eye(4)
        assert np.allclose(rho, np.diag(np.diag(rho)), atol=1e-10)
        assert abs(np.trace(rho)) < 1e-10
        assert np.all(np.diag(rho).real > -1)
        assert abs(np.trace(mn.coeffs[0, 1])) < 1e-10


def test_samplers_are_seeded():
    a = sample_general_mixed(2, 3, 42)
    b = sample_general_mixed(2, 3, 42)
    assert np.array_equal(a.coeffs, b.coeffs)
    assert a.is_hermitian()
    b1, t1 = sample_bt(5, 3)
    assert np.all(np.abs(b1) <= 2) and np.all((t1 >= 1e-2) & (t1 <= 1e2))


def test_form_matrix_json_round_trip():
    m = sample_general(2, 2, 0)
    back = FormMatrix.from_json(json.loads(json.dumps(m.to_json())))
    assert np.allclose(back.coeffs, m.coeffs, atol=1e-15)


def test_from_forms_entries():
    om = kahler_form(2)
    m = FormMatrix.from_forms([[om, Form.zero(2, 1, 1)], [Form.zero(2, 1, 1), om]])
    assert np.array_equal(m.coeffs, FormMatrix.identity(2, 2).coeffs)
