import json
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import oracles as orc
from conftest import random_form, random_hermitian
from hll.exterior import (
    DimensionError,
    Form,
    V,
    basis_enumerate,
    basis_index,
    conjugate,
    dimension,
    dz,
    dzbar,
    kahler_form,
    monomial,
    multiplication_matrix,
    power,
    volume,
    volume_coefficient,
    wedge,
)


def test_basis_is_lexicographic_and_sized():
    b = basis_enumerate(3, 1, 1)
    assert b[:3] == [((1,), (1,)), ((1,), (2,)), ((1,), (3,))]
    assert len(b) == 9 == dimension(3, 1, 1)
    assert basis_index(3, 1, 1)[((2,), (1,))] == 3
    assert len(basis_enumerate(6, 2, 2)) == 225


def test_v_and_volume_match_grassmann_oracle():
    for n in range(1, 5):
        assert orc.from_form(volume(n)).max_diff(orc.vol(n)) < 1e-15
        for j in range(1, n + 1):
            assert orc.from_form(V(n, j)).max_diff(orc.vj(n, j)) < 1e-15
    g = orc.vj(4, 1) ^ orc.vj(4, 3)
    assert orc.from_form(V(4, 1, 3)).max_diff(g) < 1e-15


def test_raw_monomials_and_one_forms():
    n = 3
    assert orc.from_form(dz(n, 2)).max_diff(orc.dz(n, 2)) == 0
    assert orc.from_form(dzbar(n, 3)).max_diff(orc.dzb(n, 3)) == 0
    raw = monomial(n, [1, 3], [2], 2.5)
    assert orc.from_form(raw).max_diff((orc.dz(n, 1) ^ orc.dz(n, 3) ^ orc.dzb(n, 2)) * 2.5) < 1e-15


def test_kahler_power_volume():
    assert wedge(kahler_form(2), kahler_form(2)) == 2 * V(2, 1, 2)
    assert volume_coefficient(power(kahler_form(4), 4)) == pytest.approx(24)
    for n in range(1, 6):
        assert volume_coefficient(power(kahler_form(n), n)) == pytest.approx(math.factorial(n))


def test_conjugate_raw_sign():
    a = monomial(2, [1], [2])
    b = monomial(2, [2], [1])
    assert conjugate(a).allclose(-1 * b)
    # dz12 ^ conj(dz12) = 4 V12
    d = monomial(2, [1, 2], [])
    assert wedge(d, conjugate(d)).allclose(4 * V(2, 1, 2))


def test_wedge_against_oracle(rng):
    for _ in range(60):
        n = int(rng.integers(1, 5))
        p, q = (int(x) for x in rng.integers(0, n + 1, 2))
        r, s = (int(x) for x in rng.integers(0, n + 1, 2))
        a = random_form(rng, n, p, q, 0.6)
        b = random_form(rng, n, r, s, 0.6)
        got = orc.from_form(wedge(a, b))
        want = orc.from_form(a) ^ orc.from_form(b)
        assert got.max_diff(want) <= 1e-12 * max(1.0, a.max_abs() * b.max_abs())


def test_conjugate_against_oracle(rng):
    for _ in range(40):
        n = int(rng.integers(1, 5))
        p, q = (int(x) for x in rng.integers(0, n + 1, 2))
        a = random_form(rng, n, p, q, 0.7)
        assert orc.from_form(conjugate(a)).max_diff(orc.from_form(a).conj()) < 1e-12


def test_overflow_gives_zero():
    a = kahler_form(2)
    out = wedge(wedge(a, a), a)
    assert out.p == 3 and len(out.terms) == 0


def test_from_matrix_round_trip(rng):
    a = random_hermitian(rng, 4)
    f = Form.from_matrix(a)
    assert np.allclose(f.matrix(), a)
    assert f.is_real()
    assert orc.from_form(f).max_diff(orc.from_matrix(a)) < 1e-12
    assert np.allclose(Form.from_vector(f.to_vector(), 4, 1, 1).matrix(), a)


def test_json_round_trip(rng):
    a = random_form(rng, 3, 2, 1)
    b = Form.from_json(json.loads(json.dumps(a.to_json())))
    assert a == b


def test_bad_bidegree():
    with pytest.raises(DimensionError):
        Form(2, 3, 0)
    with pytest.raises(DimensionError):
        Form(3, 1, 1, {((1, 2), (1,)): 1})


def test_multiplication_matrix_matches_wedge(rng):
    om = Form.from_matrix(random_hermitian(rng, 3))
    x = random_form(rng, 3, 1, 0)
    mat = multiplication_matrix(om, 1, 0)
    assert np.allclose(mat @ x.to_vector(), wedge(om, x).to_vector())


def test_multiplication_matrix_overflow_rows():
    mat = multiplication_matrix(power(kahler_form(3), 2), 2, 1)
    assert mat.shape[0] == 0 or not mat.any()


small = st.integers(min_value=1, max_value=4)


@settings(max_examples=40, deadline=None)
@given(n=small, seed=st.integers(0, 2**32 - 1))
def test_graded_commutativity_property(n, seed):
    rng = np.random.default_rng(seed)
    p, q, r, s = (int(x) for x in rng.integers(0, n + 1, 4))
    a, b = random_form(rng, n, p, q), random_form(rng, n, r, s)
    lhs, rhs = wedge(a, b), wedge(b, a) * (-1) ** ((p + q) * (r + s))
    assert lhs.allclose(rhs, atol=1e-12 * max(1.0, lhs.max_abs()))


@settings(max_examples=40, deadline=None)
@given(n=small, seed=st.integers(0, 2**32 - 1))
def test_conjugate_is_multiplicative(n, seed):
    rng = np.random.default_rng(seed)
    p, q, r, s = (int(x) for x in rng.integers(0, n + 1, 4))
    a, b = random_form(rng, n, p, q), random_form(rng, n, r, s)
    lhs = conjugate(wedge(a, b))
    rhs = wedge(conjugate(a), conjugate(b))
    assert lhs.allclose(rhs, atol=1e-12 * max(1.0, lhs.max_abs()))
    assert conjugate(conjugate(a)).allclose(a, atol=1e-13)
