"""Lefschetz maps, the Hodge-Riemann form Q, primitive subspaces and signatures.

Coordinates follow :func:`hll.exterior.basis_enumerate`.  For the Lefschetz
matrix each domain monomial e(I, J) is split as D = I & J, A = I - D,
B = J - D, R = complement of I | J, and the two bases used are

    g_b = e(A, B) ^ V_D          (= +-e(I, J), domain)
    f_b = e(A, B) ^ V_R          (= +-e(J^c, I^c), codomain)

f_b is the only codomain monomial pairing nontrivially with conj(g_b), so
row b holds the coordinate of the image along the dual of the b-th domain
element.  For a diagonalized Omega every entry is then 0 or some Omega_ij
with a plus sign: the diagonal and G-block matrices of the diagonalized
case come out literally.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .exterior import (
    DimensionError,
    Form,
    _basis,
    _basis_index,
    _conj_factor,
    _product,
    basis_enumerate,
    kahler_form,
    multiplication_matrix,
    power,
    wedge,
)
from .hyperdet import PreconditionError
from .positivity import FormMatrix, det_form

__all__ = [
    "DeformationReport",
    "LDReport",
    "LefschetzReport",
    "PrimitiveBasis",
    "SignatureReport",
    "block_decomposition",
    "check_hrr",
    "check_ld",
    "hodge_riemann_deformation_check",
    "hodge_sign",
    "is_lefschetz",
    "lefschetz_matrix",
    "primitive_basis",
    "q_gram",
    "signature",
]

BASIS_ID = "lex e(A,B)^V_D -> e(A,B)^V_R"
ISO_THRESHOLD = 1e-9
NULL_TOL = 1e-9


def _complement(n: int, idx: tuple[int, ...]) -> tuple[int, ...]:
    s = set(idx)
    return tuple(x for x in range(1, n + 1) if x not in s)


@lru_cache(maxsize=None)
def _dual_rows(n: int, p: int, q: int) -> np.ndarray:
    """Index of f_b = e(J^c, I^c) in the lexicographic basis of V^{n-q, n-p}."""
    target = _basis_index(n, n - q, n - p)
    return np.array(
        [target[(_complement(n, j), _complement(n, i))] for i, j in _basis(n, p, q)],
        dtype=np.intp,
    )


@lru_cache(maxsize=None)
def _dual_pairing(n: int, p: int, q: int) -> np.ndarray:
    """d_b = volume coefficient of f_b ^ conj(e_b)."""
    cf = _conj_factor(p, q)
    out = []
    for i, j in _basis(n, p, q):
        factor, _ = _product(_complement(n, j), _complement(n, i), j, i)
        out.append(cf * factor)
    return np.array(out, dtype=complex)


def _check_bidegree(omega: Form, p: int, q: int) -> int:
    n = omega.n
    if p < 0 or q < 0 or p + q > n:
        raise DimensionError(f"bidegree ({p},{q}) invalid for n={n}")
    k = n - p - q
    if (omega.p, omega.q) != (k, k):
        raise DimensionError(
            f"Omega has bidegree ({omega.p},{omega.q}); bidegree ({p},{q}) needs ({k},{k})"
        )
    return k


@lru_cache(maxsize=None)
def _adapted_signs(n: int, p: int, q: int) -> tuple[np.ndarray, np.ndarray]:
    """Signs s, t with g_b = s_b e(I, J) and f_b = t_b e(J^c, I^c)."""
    dom, cod = [], []
    for i, j in _basis(n, p, q):
        d = tuple(x for x in i if x in j)
        a = tuple(x for x in i if x not in d)
        b = tuple(x for x in j if x not in d)
        r = _complement(n, tuple(sorted(set(i) | set(j))))
        dom.append(_product(a, b, d, d)[0])
        cod.append(_product(a, b, r, r)[0])
    return np.real(np.array(dom)), np.real(np.array(cod))


def _lefschetz_standard(omega: Form, p: int, q: int) -> np.ndarray:
    """Matrix of ``^ Omega`` from e(I, J) to the coordinates along e(J^c, I^c)."""
    full = multiplication_matrix(omega, p, q)
    return full[_dual_rows(omega.n, p, q)]


def lefschetz_matrix(omega: Form, p: int, q: int) -> np.ndarray:
    """Square matrix of ``x -> x ^ Omega`` from V^{p,q} to V^{n-q,n-p}.

    Columns follow the domain basis g_b, rows the codomain basis f_b (see the
    module docstring); both enumerate in ``basis_enumerate(n, p, q)`` order.
    """
    _check_bidegree(omega, p, q)
    s, t = _adapted_signs(omega.n, p, q)
    return _lefschetz_standard(omega, p, q) * s[None, :] / t[:, None]


@dataclass
class LefschetzReport:
    p: int
    q: int
    dim: int
    min_singular_value: float
    scale: float
    is_isomorphism: bool
    threshold: float = ISO_THRESHOLD
    basis_id: str = BASIS_ID

    @property
    def ratio(self) -> float:
        return self.min_singular_value / self.scale if self.scale > 0 else 0.0

    def to_json(self) -> dict:
        return {
            "p": self.p,
            "q": self.q,
            "dim": self.dim,
            "min_singular_value": self.min_singular_value,
            "scale": self.scale,
            "ratio": self.ratio,
            "is_isomorphism": self.is_isomorphism,
            "threshold": self.threshold,
            "basis_id": self.basis_id,
        }


def singular_report(mat: np.ndarray, p: int, q: int, threshold: float = ISO_THRESHOLD) -> LefschetzReport:
    sv = np.linalg.svd(mat, compute_uv=False) if mat.size else np.zeros(0)
    dim = mat.shape[0]
    smax = float(sv[0]) if sv.size else 0.0
    smin = float(sv[-1]) if sv.size else 0.0
    ok = smax > 0 and smin / smax > threshold
    return LefschetzReport(p, q, dim, smin, smax, bool(ok), threshold)


def is_lefschetz(omega: Form, p: int, q: int, threshold: float = ISO_THRESHOLD) -> LefschetzReport:
    """SVD verdict on whether ``^ Omega`` is an isomorphism V^{p,q} -> V^{n-q,n-p}."""
    return singular_report(lefschetz_matrix(omega, p, q), p, q, threshold)


def hodge_sign(p: int, q: int) -> complex:
    """(sqrt(-1))^(p-q) (-1)^((p+q)(p+q-1)/2)."""
    return 1j ** ((p - q) % 4) * (-1) ** ((p + q) * (p + q - 1) // 2)


def q_gram(omega: Form, p: int, q: int) -> np.ndarray:
    """Gram matrix H[a, b] = Q(e_a, e_b) of the Hodge-Riemann form on V^{p,q}.

    Q(x, y) = x^T H conj(y) for coordinate vectors x, y.
    """
    _check_bidegree(omega, p, q)
    if not omega.is_real():
        raise PreconditionError("Q is only Hermitian for a real Omega")
    lmat = _lefschetz_standard(omega, p, q)
    d = _dual_pairing(omega.n, p, q)
    # vol(e_a ^ conj(e_b) ^ Omega) = L[b, a] d_b, Omega having even degree
    return hodge_sign(p, q) * (lmat * d[:, None]).T


@dataclass
class SignatureReport:
    n_plus: int
    n_minus: int
    n_zero: int
    tolerance: float
    min_eigenvalue: float = math.nan
    max_abs_eigenvalue: float = math.nan

    @property
    def triple(self) -> tuple[int, int, int]:
        return self.n_plus, self.n_minus, self.n_zero

    def to_json(self) -> dict:
        return {
            "n_plus": self.n_plus,
            "n_minus": self.n_minus,
            "n_zero": self.n_zero,
            "tolerance": self.tolerance,
            "min_eigenvalue": self.min_eigenvalue,
            "max_abs_eigenvalue": self.max_abs_eigenvalue,
        }


def signature(h: np.ndarray, tol: float = 1e-9) -> SignatureReport:
    """Inertia of a Hermitian matrix; eigenvalues within tol * max|eig| count as zero."""
    h = np.asarray(h, dtype=complex)
    if h.size == 0:
        return SignatureReport(0, 0, 0, tol)
    ev = np.linalg.eigvalsh((h + h.conj().T) / 2)
    scale = float(np.abs(ev).max()) or 1.0
    cut = tol * scale
    return SignatureReport(
        int(np.sum(ev > cut)),
        int(np.sum(ev < -cut)),
        int(np.sum(np.abs(ev) <= cut)),
        tol,
        float(ev[0]),
        float(np.abs(ev).max()),
    )


@dataclass
class PrimitiveBasis:
    p: int
    q: int
    vectors: np.ndarray  # columns are orthonormal coordinate vectors in V^{p,q}
    against: Form
    aux: Form
    residual: float = 0.0

    @property
    def dim(self) -> int:
        return self.vectors.shape[1]


def null_space(mat: np.ndarray, tol: float = NULL_TOL) -> np.ndarray:
    cols = mat.shape[1]
    if mat.shape[0] == 0:
        return np.eye(cols, dtype=complex)
    u, s, vh = np.linalg.svd(mat)
    smax = s[0] if s.size else 0.0
    rank = int(np.sum(s > tol * smax)) if smax > 0 else 0
    return vh[rank:].conj().T


def column_space(mat: np.ndarray, tol: float = NULL_TOL) -> np.ndarray:
    if mat.size == 0:
        return np.zeros((mat.shape[0], 0), dtype=complex)
    u, s, _ = np.linalg.svd(mat, full_matrices=False)
    smax = s[0] if s.size else 0.0
    rank = int(np.sum(s > tol * smax)) if smax > 0 else 0
    return u[:, :rank]


def primitive_basis(omega: Form, aux: Form, p: int, q: int, tol: float = NULL_TOL) -> PrimitiveBasis:
    """Orthonormal basis of {x in V^{p,q} : x ^ Omega ^ aux = 0}."""
    _check_bidegree(omega, p, q)
    if (aux.p, aux.q) != (1, 1):
        raise DimensionError("the auxiliary form must have bidegree (1,1)")
    mat = multiplication_matrix(wedge(omega, aux), p, q)
    basis = null_space(mat, tol)
    residual = float(np.abs(mat @ basis).max(initial=0.0)) if mat.size else 0.0
    return PrimitiveBasis(p, q, basis, omega, aux, residual)


def restricted_gram(h: np.ndarray, vectors: np.ndarray) -> np.ndarray:
    """Gram matrix of Q on the span of the given columns: R = N^T H conj(N)."""
    r = vectors.T @ h @ vectors.conj()
    return (r + r.conj().T) / 2


def check_hrr(omega: Form, aux: Form, p: int, q: int, tol: float = 1e-9) -> tuple[bool, SignatureReport]:
    """Is Q positive definite on the primitive subspace P^{p,q}?"""
    h = q_gram(omega, p, q)
    prim = primitive_basis(omega, aux, p, q)
    r = restricted_gram(h, prim.vectors)
    sig = signature(r, tol)
    if prim.dim == 0:
        return True, sig
    # scale-aware against the whole form, not just the restriction
    scale = float(np.abs(np.linalg.eigvalsh(h)).max()) or 1.0
    return bool(sig.min_eigenvalue > tol * scale), sig


@dataclass
class LDReport:
    holds: bool
    image_dim: int
    primitive_dim: int
    total_dim: int
    combined_rank: int
    orthogonality_residual: float

    def __bool__(self) -> bool:
        return self.holds

    def to_json(self) -> dict:
        return dict(self.__dict__)


def check_ld(omega: Form, aux: Form, p: int, q: int, tol: float = 1e-9) -> LDReport:
    """V^{p,q} = (aux ^ V^{p-1,q-1}) (+) P^{p,q}, orthogonal for Q."""
    n = omega.n
    total = len(basis_enumerate(n, p, q))
    if p >= 1 and q >= 1:
        img = column_space(multiplication_matrix(aux, p - 1, q - 1))
    else:
        img = np.zeros((total, 0), dtype=complex)
    prim = primitive_basis(omega, aux, p, q).vectors
    both = np.hstack([img, prim])
    combined = int(column_space(both).shape[1]) if both.shape[1] else 0
    h = q_gram(omega, p, q)
    hnorm = float(np.linalg.norm(h, 2)) or 1.0
    cross = img.T @ h @ prim.conj()
    residual = float(np.abs(cross).max(initial=0.0)) / hnorm
    holds = (
        img.shape[1] + prim.shape[1] == total
        and combined == total
        and residual <= tol
    )
    return LDReport(bool(holds), img.shape[1], prim.shape[1], total, combined, residual)


@dataclass
class DeformationReport:
    p: int
    q: int
    passed: bool
    min_ratio: float
    worst_t: float
    worst_r: int
    first_failure: tuple[float, int] | None
    rows: list = field(default_factory=list)  # (t, r, ratio, verdict)

    def to_json(self) -> dict:
        return {
            "p": self.p,
            "q": self.q,
            "passed": self.passed,
            "min_ratio": self.min_ratio,
            "worst_t": self.worst_t,
            "worst_r": self.worst_r,
            "first_failure": self.first_failure,
            "checks": len(self.rows),
        }


def deformation_path(m: FormMatrix, t: float) -> Form:
    """Omega_t = det((1 - t) M + t omega Id_k)."""
    return det_form((1 - t) * m + t * FormMatrix.identity(m.k, m.n))


def hodge_riemann_deformation_check(
    m: FormMatrix,
    p: int,
    q: int,
    t_steps: int = 21,
    threshold: float = ISO_THRESHOLD,
    refine: bool = True,
) -> DeformationReport:
    """Check that Omega_t ^ omega^{2r} is Lefschetz for (p-r, q-r) along the path.

    t runs over a uniform grid of ``t_steps`` points in [0, 1]; when the
    worst ratio drops by more than 10x between neighbours the midpoint is
    checked as well (one refinement level).
    """
    n, k = m.n, m.k
    if p < 0 or q < 0 or p + q != n - k:
        raise DimensionError(f"bidegree ({p},{q}) needs p + q = n - k = {n - k}")
    omega = kahler_form(n)
    powers = {r: power(omega, 2 * r) for r in range(min(p, q) + 1)}

    def at(t: float):
        om_t = deformation_path(m, t)
        out = []
        for r, wr in powers.items():
            rep = is_lefschetz(wedge(om_t, wr), p - r, q - r, threshold)
            out.append((t, r, rep.ratio, rep.is_isomorphism))
        return out

    grid = np.linspace(0.0, 1.0, max(t_steps, 2)) if t_steps > 1 else np.array([0.0])
    per_t = {float(t): at(float(t)) for t in grid}
    if refine:
        ts = sorted(per_t)
        for a, b in zip(ts, ts[1:]):
            ra = min(x[2] for x in per_t[a])
            rb = min(x[2] for x in per_t[b])
            if min(ra, rb) <= 0 or max(ra, rb) / min(ra, rb) > 10:
                mid = (a + b) / 2
                per_t[mid] = at(mid)
    rows = [row for t in sorted(per_t) for row in per_t[t]]
    worst = min(rows, key=lambda x: x[2])
    fail = next(((t, r) for t, r, _, ok in rows if not ok), None)
    return DeformationReport(
        p, q, fail is None, float(worst[2]), float(worst[0]), int(worst[1]), fail, rows
    )


def block_decomposition(mat: np.ndarray, tol: float = 0.0) -> list[list[int]]:
    """Index blocks of a square matrix from its sparsity pattern.

    Indices a and b are linked when mat[a, b] or mat[b, a] exceeds tol; the
    returned blocks are the connected components, each sorted, ordered by
    their smallest index.
    """
    size = mat.shape[0]
    link = (np.abs(mat) > tol) | (np.abs(mat.T) > tol)
    parent = list(range(size))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for a, b in zip(*np.nonzero(link)):
        ra, rb = find(int(a)), find(int(b))
        if ra != rb:
            parent[max(ra, rb)] = min(ra, rb)
    groups: dict[int, list[int]] = {}
    for a in range(size):
        groups.setdefault(find(a), []).append(a)
    return sorted(groups.values(), key=lambda g: g[0])
