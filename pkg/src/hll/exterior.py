"""Sparse exterior algebra of constant-coefficient (p,q)-forms on C^n.

A form of bidegree (p, q) is stored as a map ``(I, J) -> coefficient`` where
``I`` and ``J`` are strictly increasing tuples of 1-based indices.  The
coefficient is taken against the *normalized* monomial

    e(I, J) = c(p, q) * dz_I ^ dzbar_J,
    c(p, q) = (i/2)^m * (-1)^(m(m-1)/2),   m = min(p, q),

so that ``e({u}, {v}) = (i/2) dz_u ^ dzbar_v`` (the coefficient matrix of a
(1,1)-form is the usual Hermitian matrix) and ``e(I, I) = V_I`` where
``V_j = (i/2) dz_j ^ dzbar_j`` and ``V_I`` is the ordered wedge of the V_j.
The top monomial ``e((1..n), (1..n))`` is the euclidean volume form.
"""

from __future__ import annotations

import math
from functools import lru_cache
from itertools import combinations
from typing import Iterable, Mapping

import numpy as np

__all__ = [
    "DimensionError",
    "Form",
    "basis_enumerate",
    "basis_index",
    "conjugate",
    "dz",
    "dzbar",
    "kahler_form",
    "monomial",
    "multiplication_matrix",
    "power",
    "volume",
    "volume_coefficient",
    "V",
    "wedge",
]

ZERO_CLEANUP = 1e-14

Key = tuple[tuple[int, ...], tuple[int, ...]]


class DimensionError(ValueError):
    """Raised when dimensions or bidegrees of forms do not fit together."""


@lru_cache(maxsize=None)
def _norm_constant(p: int, q: int) -> complex:
    m = min(p, q)
    return (0.5j) ** m * (-1) ** (m * (m - 1) // 2)


def _merge_sign(a: tuple[int, ...], b: tuple[int, ...]) -> int:
    """Sign of the permutation sorting the concatenation ``a + b``.

    Both inputs are sorted; returns 0 if they share an index.
    """
    inversions = 0
    j = 0
    for x in a:
        while j < len(b) and b[j] < x:
            j += 1
        if j < len(b) and b[j] == x:
            return 0
        inversions += j
    # each x in a jumps over the j entries of b smaller than it
    return -1 if inversions % 2 else 1


@lru_cache(maxsize=1 << 20)
def _product(i: tuple, j: tuple, k: tuple, l: tuple) -> tuple[complex, Key] | None:
    """e(I,J) ^ e(K,L) = factor * e(I+K, J+L), or None if it vanishes."""
    s1 = _merge_sign(i, k)
    if not s1:
        return None
    s2 = _merge_sign(j, l)
    if not s2:
        return None
    p, q, pp, qq = len(i), len(j), len(k), len(l)
    sign = s1 * s2 * (-1) ** (q * pp)
    factor = (
        sign
        * _norm_constant(p, q)
        * _norm_constant(pp, qq)
        / _norm_constant(p + pp, q + qq)
    )
    return factor, (tuple(sorted(i + k)), tuple(sorted(j + l)))


def _check_index(n: int, idx: Iterable[int]) -> tuple[int, ...]:
    t = tuple(int(x) for x in idx)
    if any(b <= a for a, b in zip(t, t[1:])):
        raise DimensionError(f"multi-index {t} is not strictly increasing")
    if t and (t[0] < 1 or t[-1] > n):
        raise DimensionError(f"multi-index {t} out of range 1..{n}")
    return t


class Form:
    """Constant-coefficient (p,q)-form on C^n.

    Forms are immutable values; arithmetic returns new forms.  ``a ^ b`` is
    the wedge product.
    """

    __slots__ = ("n", "p", "q", "_terms")

    def __init__(self, n: int, p: int, q: int, terms: Mapping[Key, complex] | None = None):
        if n < 0 or not (0 <= p <= n and 0 <= q <= n):
            raise DimensionError(f"bidegree ({p},{q}) invalid for n={n}")
        self.n, self.p, self.q = n, p, q
        cleaned: dict[Key, complex] = {}
        if terms:
            for (i, j), c in terms.items():
                i, j = _check_index(n, i), _check_index(n, j)
                if len(i) != p or len(j) != q:
                    raise DimensionError(
                        f"monomial {(i, j)} does not have bidegree ({p},{q})"
                    )
                cleaned[(i, j)] = cleaned.get((i, j), 0) + complex(c)
        self._terms = _cleanup(cleaned)

    @classmethod
    def _raw(cls, n: int, p: int, q: int, terms: dict[Key, complex]) -> "Form":
        obj = cls.__new__(cls)
        obj.n, obj.p, obj.q = n, p, q
        obj._terms = _cleanup(terms)
        return obj

    @classmethod
    def zero(cls, n: int, p: int, q: int) -> "Form":
        return cls._raw(n, p, q, {})

    @classmethod
    def scalar(cls, n: int, value: complex = 1.0) -> "Form":
        return cls._raw(n, 0, 0, {((), ()): complex(value)})

    @classmethod
    def from_matrix(cls, a) -> "Form":
        """(1,1)-form ``sum a[u,v] (i/2) dz_u ^ dzbar_v`` (0-based array)."""
        a = np.asarray(a, dtype=complex)
        n = a.shape[0]
        if a.shape != (n, n):
            raise DimensionError("coefficient matrix must be square")
        terms = {
            ((u + 1,), (v + 1,)): a[u, v]
            for u in range(n)
            for v in range(n)
            if a[u, v] != 0
        }
        return cls._raw(n, 1, 1, terms)

    @classmethod
    def from_vector(cls, x, n: int, p: int, q: int) -> "Form":
        """Inverse of :meth:`to_vector` in the ``basis_enumerate`` order."""
        x = np.asarray(x, dtype=complex)
        basis = basis_enumerate(n, p, q)
        if x.shape != (len(basis),):
            raise DimensionError(f"expected vector of length {len(basis)}")
        return cls._raw(n, p, q, {key: c for key, c in zip(basis, x) if c != 0})

    @property
    def terms(self) -> dict[Key, complex]:
        return dict(self._terms)

    @property
    def bidegree(self) -> tuple[int, int]:
        return self.p, self.q

    def items(self):
        return self._terms.items()

    def __len__(self) -> int:
        return len(self._terms)

    def __getitem__(self, key) -> complex:
        i, j = key
        return self._terms.get((tuple(i), tuple(j)), 0j)

    def is_zero(self) -> bool:
        return not self._terms

    def max_abs(self) -> float:
        return max((abs(c) for c in self._terms.values()), default=0.0)

    def matrix(self) -> np.ndarray:
        """Coefficient matrix of a (1,1)-form (0-based)."""
        if (self.p, self.q) != (1, 1):
            raise DimensionError("matrix() is only defined for (1,1)-forms")
        a = np.zeros((self.n, self.n), dtype=complex)
        for ((u,), (v,)), c in self._terms.items():
            a[u - 1, v - 1] = c
        return a

    def to_vector(self) -> np.ndarray:
        index = basis_index(self.n, self.p, self.q)
        x = np.zeros(len(index), dtype=complex)
        for key, c in self._terms.items():
            x[index[key]] = c
        return x

    def _same_space(self, other: "Form") -> None:
        if (self.n, self.p, self.q) != (other.n, other.p, other.q):
            raise DimensionError(
                f"cannot combine forms in V^({self.p},{self.q}) n={self.n} "
                f"and V^({other.p},{other.q}) n={other.n}"
            )

    def __add__(self, other: "Form") -> "Form":
        if not isinstance(other, Form):
            return NotImplemented
        self._same_space(other)
        terms = dict(self._terms)
        for key, c in other._terms.items():
            terms[key] = terms.get(key, 0) + c
        return Form._raw(self.n, self.p, self.q, terms)

    def __neg__(self) -> "Form":
        return Form._raw(self.n, self.p, self.q, {k: -c for k, c in self._terms.items()})

    def __sub__(self, other: "Form") -> "Form":
        if not isinstance(other, Form):
            return NotImplemented
        return self + (-other)

    def __mul__(self, scalar) -> "Form":
        if isinstance(scalar, Form):
            return NotImplemented
        s = complex(scalar)
        return Form._raw(self.n, self.p, self.q, {k: s * c for k, c in self._terms.items()})

    __rmul__ = __mul__

    def __truediv__(self, scalar) -> "Form":
        return self * (1 / complex(scalar))

    def __xor__(self, other: "Form") -> "Form":
        return wedge(self, other)

    def conjugate(self) -> "Form":
        return conjugate(self)

    def is_real(self, tol: float = 1e-12) -> bool:
        return self.allclose(conjugate(self), atol=tol * max(1.0, self.max_abs()))

    def allclose(self, other: "Form", atol: float = 1e-12) -> bool:
        self._same_space(other)
        keys = set(self._terms) | set(other._terms)
        return all(abs(self[k] - other[k]) <= atol for k in keys)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Form):
            return NotImplemented
        return (self.n, self.p, self.q) == (other.n, other.p, other.q) and self._terms == other._terms

    __hash__ = None

    def __repr__(self) -> str:
        shown = ", ".join(f"{k}: {c:.6g}" for k, c in sorted(self._terms.items())[:6])
        more = " ..." if len(self._terms) > 6 else ""
        return f"Form(n={self.n}, ({self.p},{self.q}), {{{shown}{more}}})"

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "p": self.p,
            "q": self.q,
            "terms": [
                {"I": list(i), "J": list(j), "re": c.real, "im": c.imag}
                for (i, j), c in sorted(self._terms.items())
            ],
        }

    @classmethod
    def from_json(cls, data: Mapping) -> "Form":
        terms: dict[Key, complex] = {}
        for t in data["terms"]:
            key = (tuple(t["I"]), tuple(t["J"]))
            terms[key] = terms.get(key, 0) + complex(t["re"], t["im"])
        return cls(int(data["n"]), int(data["p"]), int(data["q"]), terms)


def _cleanup(terms: dict[Key, complex]) -> dict[Key, complex]:
    if not terms:
        return {}
    scale = max(abs(c) for c in terms.values()) or 1.0
    cut = ZERO_CLEANUP * scale
    return {k: c for k, c in terms.items() if abs(c) >= cut and c != 0}


@lru_cache(maxsize=None)
def _basis(n: int, p: int, q: int) -> tuple[Key, ...]:
    rows = list(combinations(range(1, n + 1), p))
    cols = list(combinations(range(1, n + 1), q))
    return tuple((i, j) for i in rows for j in cols)


def basis_enumerate(n: int, p: int, q: int) -> list[Key]:
    """All (I, J) monomial keys of V^{p,q}, lexicographic in (I, J)."""
    if n < 0 or not (0 <= p <= n and 0 <= q <= n):
        raise DimensionError(f"bidegree ({p},{q}) invalid for n={n}")
    return list(_basis(n, p, q))


@lru_cache(maxsize=None)
def _basis_index(n: int, p: int, q: int) -> dict[Key, int]:
    return {key: a for a, key in enumerate(_basis(n, p, q))}


def basis_index(n: int, p: int, q: int) -> dict[Key, int]:
    if n < 0 or not (0 <= p <= n and 0 <= q <= n):
        raise DimensionError(f"bidegree ({p},{q}) invalid for n={n}")
    return _basis_index(n, p, q)


def wedge(a: Form, b: Form) -> Form:
    if a.n != b.n:
        raise DimensionError(f"wedge of forms on C^{a.n} and C^{b.n}")
    n = a.n
    p, q = a.p + b.p, a.q + b.q
    if p > n or q > n:
        return _OverflowZero(n, p, q)
    out: dict[Key, complex] = {}
    for (i, j), x in a._terms.items():
        for (k, l), y in b._terms.items():
            prod = _product(i, j, k, l)
            if prod is None:
                continue
            f, key = prod
            out[key] = out.get(key, 0) + f * x * y
    return Form._raw(n, p, q, out)


class _OverflowZero(Form):
    """Zero form whose bidegree exceeds n in one slot (V^{p,q} = 0)."""

    def __init__(self, n: int, p: int, q: int):
        self.n, self.p, self.q = n, p, q
        self._terms = {}

    def __repr__(self) -> str:
        return f"Form(n={self.n}, ({self.p},{self.q}), 0)"


@lru_cache(maxsize=None)
def _conj_factor(p: int, q: int) -> complex:
    c = _norm_constant(p, q)
    return (-1) ** (p * q) * c.conjugate() / c


def conjugate(a: Form) -> Form:
    """Complex conjugate; maps V^{p,q} to V^{q,p}."""
    f = _conj_factor(a.p, a.q)
    terms = {(j, i): f * c.conjugate() for (i, j), c in a._terms.items()}
    return Form._raw(a.n, a.q, a.p, terms)


def dz(n: int, i: int) -> Form:
    return Form(n, 1, 0, {((i,), ()): 1.0})


def dzbar(n: int, i: int) -> Form:
    return Form(n, 0, 1, {((), (i,)): 1.0})


def V(n: int, *idx: int) -> Form:
    """V_{j1,...,js} = V_{j1} ^ ... ^ V_{js} with V_j = (i/2) dz_j ^ dzbar_j."""
    out = Form.scalar(n)
    for j in idx:
        out = out ^ Form(n, 1, 1, {((j,), (j,)): 1.0})
    return out


def monomial(n: int, i: Iterable[int], j: Iterable[int], coeff: complex = 1.0) -> Form:
    """The raw monomial ``coeff * dz_I ^ dzbar_J`` (I, J in any order)."""
    out = Form.scalar(n, coeff)
    for x in i:
        out = out ^ dz(n, x)
    for x in j:
        out = out ^ dzbar(n, x)
    return out


def kahler_form(n: int) -> Form:
    """The standard Kahler form ``omega = V_1 + ... + V_n``."""
    if n < 1:
        raise DimensionError("n must be at least 1")
    return Form.from_matrix(np.eye(n))


def power(a: Form, m: int) -> Form:
    if m < 0:
        raise ValueError("power must be non-negative")
    out = Form.scalar(a.n)
    for _ in range(m):
        out = out ^ a
    return out


def volume(n: int) -> Form:
    full = tuple(range(1, n + 1))
    return Form(n, n, n, {(full, full): 1.0})


def volume_coefficient(a: Form) -> complex:
    """Coefficient of a top-degree form against V_{1,...,n} (the Hodge star)."""
    if (a.p, a.q) != (a.n, a.n):
        raise DimensionError(f"expected an ({a.n},{a.n})-form, got ({a.p},{a.q})")
    full = tuple(range(1, a.n + 1))
    return a[(full, full)]


@lru_cache(maxsize=4096)
def _monomial_action(n: int, p: int, q: int, k: tuple, l: tuple):
    """Sparse matrix of ``x -> x ^ e(K, L)`` from V^{p,q} to V^{p+|K|, q+|L|}."""
    src = _basis(n, p, q)
    dst = _basis_index(n, p + len(k), q + len(l))
    rows, cols, vals = [], [], []
    for a, (i, j) in enumerate(src):
        prod = _product(i, j, k, l)
        if prod is None:
            continue
        f, key = prod
        rows.append(dst[key])
        cols.append(a)
        vals.append(f)
    return (
        np.asarray(rows, dtype=np.intp),
        np.asarray(cols, dtype=np.intp),
        np.asarray(vals, dtype=complex),
    )


def multiplication_matrix(b: Form, p: int, q: int) -> np.ndarray:
    """Matrix of ``x -> x ^ b`` on V^{p,q} in the ``basis_enumerate`` bases.

    Returns an array of shape ``(dim V^{p+b.p, q+b.q}, dim V^{p,q})``; the
    target dimension is 0 when the degree overflows n.
    """
    n = b.n
    src_dim = len(basis_enumerate(n, p, q))
    tp, tq = p + b.p, q + b.q
    if tp > n or tq > n:
        return np.zeros((0, src_dim), dtype=complex)
    out = np.zeros((len(_basis(n, tp, tq)), src_dim), dtype=complex)
    for (k, l), c in b._terms.items():
        rows, cols, vals = _monomial_action(n, p, q, k, l)
        out[rows, cols] += c * vals
    return out


def dimension(n: int, p: int, q: int) -> int:
    if not (0 <= p <= n and 0 <= q <= n):
        return 0
    return math.comb(n, p) * math.comb(n, q)
