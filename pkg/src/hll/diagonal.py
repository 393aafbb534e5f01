"""Closed forms for the diagonalized 2 x 2 family.

With layers B^(l) = [[1, b_l], [conj(b_l), |b_l|^2 + t_l]] the determinant
is det(M) = sum_{i<j} Omega_ij V_ij with Omega_ij = |b_i - b_j|^2 + t_i + t_j.
Indices here are 1-based to match the V_ij labels.
"""

from __future__ import annotations

from fractions import Fraction
from itertools import combinations

import numpy as np

from .exterior import Form

__all__ = [
    "exact_det",
    "exact_pair_block_det",
    "g_block",
    "heron_product",
    "heron_sides",
    "omega_coefficients",
    "omega_form",
    "pair_block",
    "ptolemy_gap",
    "triangle_gaps",
]


def omega_coefficients(b, t) -> dict[tuple[int, int], float]:
    b = np.asarray(b, dtype=complex)
    t = np.asarray(t, dtype=float)
    n = len(b)
    return {
        (i, j): float(abs(b[i - 1] - b[j - 1]) ** 2 + t[i - 1] + t[j - 1])
        for i, j in combinations(range(1, n + 1), 2)
    }


def omega_form(b, t) -> Form:
    coeffs = omega_coefficients(b, t)
    n = len(b)
    return Form(n, 2, 2, {((i, j), (i, j)): c for (i, j), c in coeffs.items()})


def _om(coeffs, a, b):
    return coeffs[(min(a, b), max(a, b))]


def g_block(coeffs, quad) -> np.ndarray:
    """The 4 x 4 block G_{i1,i2,i3,i4}: entry (r, c) is Omega over the two
    indices of ``quad`` other than quad[r] and quad[c]."""
    g = np.zeros((4, 4))
    for r in range(4):
        for c in range(4):
            if r != c:
                rest = [x for k, x in enumerate(quad) if k not in (r, c)]
                g[r, c] = _om(coeffs, *rest)
    return g


def heron_sides(coeffs, quad) -> tuple[float, float, float]:
    """A = sqrt(O34 O12), B = sqrt(O24 O13), C = sqrt(O23 O14) for quad (1,2,3,4)."""
    i1, i2, i3, i4 = quad
    a = np.sqrt(_om(coeffs, i3, i4) * _om(coeffs, i1, i2))
    b = np.sqrt(_om(coeffs, i2, i4) * _om(coeffs, i1, i3))
    c = np.sqrt(_om(coeffs, i2, i3) * _om(coeffs, i1, i4))
    return float(a), float(b), float(c)


def heron_product(a: float, b: float, c: float) -> float:
    """-(A+B+C)(A+B-C)(A-B+C)(-A+B+C)."""
    return -(a + b + c) * (a + b - c) * (a - b + c) * (-a + b + c)


def triangle_gaps(a: float, b: float, c: float) -> tuple[float, float, float]:
    """A+B-C, A-B+C, -A+B+C; all positive iff (A, B, C) is a strict triangle."""
    return a + b - c, a - b + c, -a + b + c


def ptolemy_gap(b, quad) -> float:
    """|b34 b12| + |b24 b13| - |b23 b14| for b_ij = b_i - b_j (>= 0 always)."""
    b = np.asarray(b, dtype=complex)
    i1, i2, i3, i4 = (x - 1 for x in quad)

    def d(x, y):
        return b[x] - b[y]

    return float(
        abs(d(i3, i4) * d(i1, i2)) + abs(d(i2, i4) * d(i1, i3)) - abs(d(i2, i3) * d(i1, i4))
    )


def pair_block(coeffs, n: int = 6) -> np.ndarray:
    """Omega ^ V_a on the span of the V_a, a a pair, at n = 6.

    Row c (a pair, standing for the 4-set complementary to it) and column a
    hold Omega over the complement of a | c when a and c are disjoint.
    """
    if n != 6:
        raise ValueError("the pair block is the (2,2) block at n = 6")
    pairs = list(combinations(range(1, n + 1), 2))
    out = np.zeros((len(pairs), len(pairs)))
    for r, c in enumerate(pairs):
        for s, a in enumerate(pairs):
            if not set(a) & set(c):
                rest = tuple(sorted(set(range(1, n + 1)) - set(a) - set(c)))
                out[r, s] = coeffs[rest]
    return out


def exact_det(rows) -> Fraction:
    """Determinant of a square matrix of Fractions by exact elimination."""
    a = [list(map(Fraction, r)) for r in rows]
    n = len(a)
    det = Fraction(1)
    for col in range(n):
        piv = next((r for r in range(col, n) if a[r][col] != 0), None)
        if piv is None:
            return Fraction(0)
        if piv != col:
            a[col], a[piv] = a[piv], a[col]
            det = -det
        det *= a[col][col]
        for r in range(col + 1, n):
            f = a[r][col] / a[col][col]
            if f:
                a[r] = [x - f * y for x, y in zip(a[r], a[col])]
    return det


def exact_pair_block_det(b, t, max_denominator: int = 1000):
    """Exact determinant of :func:`pair_block` for rational approximations of (b, t).

    Returns ``(det, b_rational, t_rational)``; the rational data is itself a
    valid diagonalized sample whenever every t stays positive.
    """
    br = [(Fraction(float(z.real)).limit_denominator(max_denominator),
           Fraction(float(z.imag)).limit_denominator(max_denominator)) for z in np.asarray(b, dtype=complex)]
    tr = [Fraction(float(x)).limit_denominator(max_denominator) for x in t]
    n = len(br)
    coeffs = {
        (i, j): (br[i - 1][0] - br[j - 1][0]) ** 2 + (br[i - 1][1] - br[j - 1][1]) ** 2 + tr[i - 1] + tr[j - 1]
        for i, j in combinations(range(1, n + 1), 2)
    }
    pairs = list(combinations(range(1, n + 1), 2))
    rows = []
    for c in pairs:
        row = []
        for a in pairs:
            if set(a) & set(c):
                row.append(Fraction(0))
            else:
                row.append(coeffs[tuple(sorted(set(range(1, n + 1)) - set(a) - set(c)))])
        rows.append(row)
    return exact_det(rows), br, tr
