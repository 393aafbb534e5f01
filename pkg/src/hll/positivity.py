"""Griffiths-positive matrices of (1,1)-forms.

A k x k matrix M = (alpha_ij) of (1,1)-forms on C^n is stored as one array
``coeffs`` of shape (k, k, n, n) with

    alpha_ij = sum_{u,v} coeffs[i, j, u, v] (i/2) dz_u ^ dzbar_v.

M is Hermitian when ``coeffs[i, j] == coeffs[j, i].conj().T``, and Griffiths
positive when ``A(theta) = sum theta_i conj(theta_j) coeffs[i, j]`` is positive
definite for every nonzero theta in C^k.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from itertools import permutations

import numpy as np

from .exterior import Form, wedge
from .hyperdet import PreconditionError, permutation_sign

__all__ = [
    "FormMatrix",
    "PositivityCertificate",
    "PreconditionError",
    "det_form",
    "det_form_laplace",
    "diagonal_layers",
    "griffiths_min_quadratic",
    "is_griffiths_positive_diagonalized",
    "layers_from_bt",
    "normal_form",
    "normalize_gl_k",
    "normalize_gl_n",
    "random_kahler_matrix",
    "sample_diagonalized",
    "sample_general",
]

PD_TOL = 1e-10


@dataclass(frozen=True)
class FormMatrix:
    coeffs: np.ndarray

    def __post_init__(self):
        arr = np.asarray(self.coeffs, dtype=complex)
        if arr.ndim != 4 or arr.shape[0] != arr.shape[1] or arr.shape[2] != arr.shape[3]:
            raise ValueError(f"FormMatrix coefficients must have shape (k,k,n,n), got {arr.shape}")
        object.__setattr__(self, "coeffs", arr)

    @property
    def k(self) -> int:
        return self.coeffs.shape[0]

    @property
    def n(self) -> int:
        return self.coeffs.shape[2]

    def entry(self, i: int, j: int) -> Form:
        """alpha_{i,j} (0-based) as a Form."""
        return Form.from_matrix(self.coeffs[i, j])

    @property
    def entries(self) -> list[list[Form]]:
        return [[self.entry(i, j) for j in range(self.k)] for i in range(self.k)]

    @classmethod
    def from_forms(cls, entries) -> "FormMatrix":
        k = len(entries)
        n = entries[0][0].n
        arr = np.zeros((k, k, n, n), dtype=complex)
        for i in range(k):
            for j in range(k):
                arr[i, j] = entries[i][j].matrix()
        return cls(arr)

    @classmethod
    def identity(cls, k: int, n: int) -> "FormMatrix":
        """omega * Id_k."""
        arr = np.zeros((k, k, n, n), dtype=complex)
        for i in range(k):
            arr[i, i] = np.eye(n)
        return cls(arr)

    @classmethod
    def from_layers(cls, layers) -> "FormMatrix":
        """Diagonalized matrix ``sum_l B^(l) V_l`` from layers of shape (n, k, k)."""
        layers = np.asarray(layers, dtype=complex)
        n, k, _ = layers.shape
        arr = np.zeros((k, k, n, n), dtype=complex)
        for l in range(n):
            arr[:, :, l, l] = layers[l]
        return cls(arr)

    def hermitian_defect(self) -> float:
        other = self.coeffs.transpose(1, 0, 3, 2).conj()
        return float(np.abs(self.coeffs - other).max(initial=0.0))

    def is_hermitian(self, tol: float = 1e-12) -> bool:
        return self.hermitian_defect() <= tol * max(1.0, float(np.abs(self.coeffs).max()))

    def quadratic(self, theta) -> np.ndarray:
        """Coefficient matrix A(theta) of theta . M . conj(theta)^t."""
        theta = np.asarray(theta, dtype=complex)
        return np.einsum("i,j,ijuv->uv", theta, theta.conj(), self.coeffs)

    def congruence(self, c) -> "FormMatrix":
        """``C . M . C^H``."""
        c = np.asarray(c, dtype=complex)
        return FormMatrix(np.einsum("ia,abuv,jb->ijuv", c, self.coeffs, c.conj()))

    def change_coordinates(self, p) -> "FormMatrix":
        """Rewrite every entry in coordinates w with z = P w.

        Each coefficient matrix a becomes ``P^T a conj(P)``.
        """
        p = np.asarray(p, dtype=complex)
        return FormMatrix(p.T @ self.coeffs @ p.conj())

    def __add__(self, other: "FormMatrix") -> "FormMatrix":
        return FormMatrix(self.coeffs + other.coeffs)

    def __mul__(self, s) -> "FormMatrix":
        return FormMatrix(complex(s) * self.coeffs)

    __rmul__ = __mul__

    def is_diagonalized(self, tol: float = 0.0) -> bool:
        return not _off_diagonal_terms(self, tol)

    def to_json(self) -> dict:
        return {
            "k": self.k,
            "n": self.n,
            "entries": [[f.to_json() for f in row] for row in self.entries],
        }

    @classmethod
    def from_json(cls, data) -> "FormMatrix":
        entries = [[Form.from_json(f) for f in row] for row in data["entries"]]
        m = cls.from_forms(entries)
        if (m.k, m.n) != (int(data.get("k", m.k)), int(data.get("n", m.n))):
            raise ValueError("declared (k, n) do not match the entries")
        return m


def _off_diagonal_terms(m: FormMatrix, tol: float):
    scale = max(1.0, float(np.abs(m.coeffs).max(initial=0.0)))
    mask = ~np.eye(m.n, dtype=bool)
    bad = np.argwhere((np.abs(m.coeffs) > tol * scale) & mask[None, None])
    return [tuple(int(x) for x in row) for row in bad]


def diagonal_layers(m: FormMatrix) -> np.ndarray:
    """Layers B^(l) of a diagonalized matrix, shape (n, k, k)."""
    bad = _off_diagonal_terms(m, ZERO_TOL)
    if bad:
        i, j, u, v = bad[0]
        raise PreconditionError(
            f"entry ({i + 1},{j + 1}) is not diagonalized: monomial "
            f"dz_{u + 1} ^ dzbar_{v + 1} has coefficient {m.coeffs[i, j, u, v]:.3g}"
        )
    idx = np.arange(m.n)
    return m.coeffs[:, :, idx, idx].transpose(2, 0, 1)


ZERO_TOL = 1e-14


@dataclass
class PositivityCertificate:
    verdict: str  # "positive", "not_positive" or "inconclusive"
    min_value: float
    witness_theta: np.ndarray
    witness_direction: np.ndarray
    samples_used: int
    exact: bool = False
    tolerance: float = PD_TOL

    @property
    def positive(self) -> bool:
        return self.verdict == "positive"

    def to_json(self) -> dict:
        def cvec(x):
            return [[complex(z).real, complex(z).imag] for z in np.asarray(x).ravel()]

        return {
            "verdict": self.verdict,
            "exact": self.exact,
            "min_value": float(self.min_value),
            "witness_theta": cvec(self.witness_theta),
            "witness_direction": cvec(self.witness_direction),
            "samples_used": int(self.samples_used),
            "tolerance": self.tolerance,
        }


def is_griffiths_positive_diagonalized(m: FormMatrix, tol: float = PD_TOL) -> PositivityCertificate:
    """Exact test: M is Griffiths positive iff every layer B^(l) is positive definite."""
    layers = diagonal_layers(m)
    best = (math.inf, 0, None)
    for l, b in enumerate(layers):
        w, vecs = np.linalg.eigh(b)
        if w[0] < best[0]:
            best = (float(w[0]), l, vecs[:, 0])
    value, l, vec = best
    scale = float(np.abs(layers).max(initial=0.0)) or 1.0
    direction = np.zeros(m.n, dtype=complex)
    direction[l] = 1.0
    return PositivityCertificate(
        verdict="positive" if value > tol * scale else "not_positive",
        min_value=value,
        # theta . B . conj(theta)^t = v^H B v for theta = conj(v)
        witness_theta=np.conj(vec),
        witness_direction=direction,
        samples_used=m.n,
        exact=True,
        tolerance=tol,
    )


def _unit(x: np.ndarray) -> np.ndarray:
    return x / np.linalg.norm(x)


def _refine(m: FormMatrix, theta: np.ndarray, iters: int):
    """Alternating exact minimization over v (for fixed theta) and theta (for fixed v)."""
    value = math.inf
    v = None
    converged = False
    for _ in range(max(iters, 1)):
        w, vecs = np.linalg.eigh(m.quadratic(theta))
        v = vecs[:, 0]
        new = float(w[0])
        if abs(value - new) <= 1e-14 * max(1.0, abs(new)):
            value = new
            converged = True
            break
        value = new
        # sum theta_i conj(theta_j) K_ij with K_ij = v^H A_ij v; minimized by theta = conj(phi)
        kmat = np.einsum("u,ijuv,v->ij", v.conj(), m.coeffs, v)
        _, tv = np.linalg.eigh((kmat + kmat.conj().T) / 2)
        theta = np.conj(tv[:, 0])
    return value, theta, v, converged


def griffiths_min_quadratic(
    m: FormMatrix,
    grid: int = 200,
    refine_iters: int = 50,
    seed: int = 0,
    tol: float = PD_TOL,
    starts: int = 5,
) -> PositivityCertificate:
    """Numerically minimize v^H A(theta) v over unit theta in C^k and unit v in C^n.

    ``grid`` seeded directions theta are scored by the smallest eigenvalue of
    A(theta); the best ``starts`` of them (plus the coordinate directions) are
    refined by alternating minimization, which never increases the value.  A
    value <= tol is a concrete violation; a positive value only means that no
    violation was found.
    """
    rng = np.random.default_rng(seed)
    k = m.k
    cands = [np.eye(k, dtype=complex)[i] for i in range(k)]
    if grid > 0:
        raw = rng.standard_normal((grid, k)) + 1j * rng.standard_normal((grid, k))
        cands.extend(raw / np.linalg.norm(raw, axis=1, keepdims=True))
    scores = [float(np.linalg.eigvalsh(m.quadratic(t))[0]) for t in cands]
    order = np.argsort(scores, kind="stable")[: max(starts, 1)]
    best = None
    all_converged = True
    for idx in order:
        value, theta, v, conv = _refine(m, cands[idx], refine_iters)
        all_converged &= conv
        if best is None or value < best[0]:
            best = (value, theta, v)
    value, theta, v = best
    scale = float(np.abs(m.coeffs).max(initial=0.0)) or 1.0
    if value <= tol * scale:
        verdict = "not_positive"
    elif all_converged:
        verdict = "positive"
    else:
        verdict = "inconclusive"
    return PositivityCertificate(
        verdict=verdict,
        min_value=value,
        witness_theta=_unit(theta),
        witness_direction=v,
        samples_used=len(cands),
        exact=verdict == "not_positive",
        tolerance=tol,
    )


def det_form(m: FormMatrix) -> Form:
    """Leibniz expansion sum_sigma sgn(sigma) alpha_{1,sigma(1)} ^ ... ^ alpha_{k,sigma(k)}."""
    entries = m.entries
    total = Form.zero(m.n, m.k, m.k) if m.k <= m.n else None
    for sigma in permutations(range(m.k)):
        term = Form.scalar(m.n, permutation_sign(sigma))
        for i, j in enumerate(sigma):
            term = wedge(term, entries[i][j])
        total = term if total is None else total + term
    return total


def det_form_laplace(m: FormMatrix) -> Form:
    """Cofactor expansion along the first row (independent of :func:`det_form`)."""

    def expand(rows: list[int], cols: list[int]) -> Form:
        if not rows:
            return Form.scalar(m.n)
        r, rest = rows[0], rows[1:]
        total = None
        for pos, c in enumerate(cols):
            minor = expand(rest, cols[:pos] + cols[pos + 1:])
            term = wedge(m.entry(r, c), minor) * (-1) ** pos
            total = term if total is None else total + term
        return total

    return expand(list(range(m.k)), list(range(m.k)))


def _hermitian_sqrt_inv(a: np.ndarray, tol: float = PD_TOL) -> np.ndarray:
    w, u = np.linalg.eigh((a + a.conj().T) / 2)
    if w[0] <= tol * max(1.0, float(np.abs(a).max())):
        raise PreconditionError(
            f"coefficient matrix is not positive definite (min eigenvalue {w[0]:.3e})"
        )
    return (u / np.sqrt(w)) @ u.conj().T


def normalize_gl_n(m: FormMatrix) -> tuple[FormMatrix, np.ndarray]:
    """Change coordinates so that alpha_11 = omega and alpha_22 is diagonal.

    Returns ``(M', P)`` with coordinates z = P w; alpha_11's coefficient
    matrix is sent to the identity by its inverse square root, then a unitary
    diagonalizes the transformed alpha_22 with ascending positive entries.
    """
    s = _hermitian_sqrt_inv(m.coeffs[0, 0])
    w = np.eye(m.n, dtype=complex)
    if m.k >= 2:
        a22 = s @ m.coeffs[1, 1] @ s
        _, w = np.linalg.eigh((a22 + a22.conj().T) / 2)
    p = np.conj(s @ w)
    out = m.change_coordinates(p)
    # exact cleanup of the normal-form entries
    coeffs = out.coeffs.copy()
    coeffs[0, 0] = np.eye(m.n)
    if m.k >= 2:
        coeffs[1, 1] = np.diag(np.real(np.diag(coeffs[1, 1])))
    return FormMatrix(coeffs), p


def omega_component(a: np.ndarray) -> complex:
    """lambda with a = lambda * I + (traceless part); the omega part of a (1,1)-form."""
    return complex(np.trace(a)) / a.shape[0]


@dataclass
class GLkNormalization:
    matrix: FormMatrix
    c: np.ndarray
    det_factor: float  # |det C|^2
    pivots: np.ndarray = field(default_factory=lambda: np.zeros(0))


def normalize_gl_k(m: FormMatrix, tol: float = PD_TOL) -> GLkNormalization:
    """Congruence ``C M C^H`` reaching  alpha'_11 = omega, alpha'_jj = omega + rho_jj,
    alpha'_ij = rho_ij (i != j) with every rho primitive.

    C is the product of unit lower-triangular eliminations of the omega
    components followed by a positive diagonal dilation, i.e. the inverse of
    the LDL^H factor of the matrix of omega components.
    """
    n, k = m.n, m.k
    if not np.allclose(m.coeffs[0, 0], np.eye(n), atol=1e-10):
        raise PreconditionError("normalize_gl_k needs alpha_11 == omega")
    lam = np.array([[omega_component(m.coeffs[i, j]) for j in range(k)] for i in range(k)])
    c = np.eye(k, dtype=complex)
    work = lam.copy()
    pivots = np.ones(k)
    for col in range(k):
        pivot = work[col, col].real
        if pivot <= tol:
            raise PreconditionError(
                f"pivot {col + 1} of the omega components is {pivot:.3e}; M is not Griffiths positive"
            )
        pivots[col] = pivot
        step = np.eye(k, dtype=complex)
        for row in range(col + 1, k):
            step[row, col] = -work[row, col] / pivot
        work = step @ work @ step.conj().T
        c = step @ c
    dil = np.diag(1 / np.sqrt(pivots))
    c = dil @ c
    out = m.congruence(c)
    coeffs = out.coeffs.copy()
    coeffs[0, 0] = np.eye(n)
    return GLkNormalization(FormMatrix(coeffs), c, float(1 / np.prod(pivots)), pivots)


def normal_form(m: FormMatrix) -> tuple[FormMatrix, np.ndarray, np.ndarray]:
    """GL_n then GL_k then a unitary GL_n step: the fully normalized representative.

    Returns ``(M', P, C)``; afterwards alpha'_11 = omega, alpha'_22 = omega + rho_22
    with rho_22 diagonal, traceless and with entries > -1 (for k >= 2).
    """
    m1, p1 = normalize_gl_n(m)
    g = normalize_gl_k(m1)
    m3, p2 = normalize_gl_n(g.matrix)
    return m3, p1 @ p2, g.c


def layers_from_bt(b, t) -> np.ndarray:
    """Layers [[1, b_l], [conj(b_l), |b_l|^2 + t_l]], shape (n, 2, 2)."""
    b = np.asarray(b, dtype=complex)
    t = np.asarray(t, dtype=float)
    layers = np.empty((len(b), 2, 2), dtype=complex)
    layers[:, 0, 0] = 1
    layers[:, 0, 1] = b
    layers[:, 1, 0] = b.conj()
    layers[:, 1, 1] = np.abs(b) ** 2 + t
    return layers


def sample_bt(n: int, seed: int, radius: float = 2.0, t_range=(1e-2, 1e2)):
    rng = np.random.default_rng(seed)
    r = radius * np.sqrt(rng.random(n))
    phi = rng.uniform(0, 2 * np.pi, n)
    b = r * np.exp(1j * phi)
    lo, hi = np.log(t_range[0]), np.log(t_range[1])
    t = np.exp(rng.uniform(lo, hi, n))
    return b, t


def sample_diagonalized(k: int, n: int, seed: int, radius: float = 2.0, t_range=(1e-2, 1e2)) -> FormMatrix:
    """Random diagonalized Griffiths-positive 2 x 2 matrix with alpha_11 = omega."""
    if k != 2:
        raise ValueError("sample_diagonalized covers the k=2 (b, t) family only")
    b, t = sample_bt(n, seed, radius, t_range)
    return FormMatrix.from_layers(layers_from_bt(b, t))


def _random_hermitian_form_matrix(rng, k: int, n: int) -> np.ndarray:
    r = rng.standard_normal((k, k, n, n)) + 1j * rng.standard_normal((k, k, n, n))
    return (r + r.transpose(1, 0, 3, 2).conj()) / 2


def sample_general(k: int, n: int, seed: int, margin: float = 0.3) -> FormMatrix:
    """``omega Id_k + eps R`` with Griffiths margin at least ``margin``.

    R is a random Hermitian FormMatrix; eps = (1 - margin) / ||R~|| where R~
    is the kn x kn Hermitian matrix R~[(i,u),(j,v)] = R[i,j,u,v].  Since
    v^H R(theta) v = x^H R~ x for the unit vector x = conj(theta) (x) v, every
    A(theta) then has smallest eigenvalue >= margin.
    """
    if not 0 < margin < 1:
        raise ValueError("margin must lie in (0, 1)")
    rng = np.random.default_rng(seed)
    r = _random_hermitian_form_matrix(rng, k, n)
    big = r.transpose(0, 2, 1, 3).reshape(k * n, k * n)
    eps = (1 - margin) / np.linalg.norm(big, 2)
    return FormMatrix.identity(k, n) + FormMatrix(eps * r)


def random_well_conditioned(rng, size: int, lo: float = 0.5, hi: float = 2.0) -> np.ndarray:
    """Random complex matrix with singular values in [lo, hi]."""
    g = rng.standard_normal((size, size)) + 1j * rng.standard_normal((size, size))
    u, s, vh = np.linalg.svd(g)
    s = np.exp(rng.uniform(np.log(lo), np.log(hi), size))
    return (u * s) @ vh


def random_kahler_matrix(rng, n: int) -> np.ndarray:
    """Coefficient matrix P P^H of a random Kahler form (singular values of P in [0.5, 2])."""
    p = random_well_conditioned(rng, n)
    a = p @ p.conj().T
    return (a + a.conj().T) / 2


def sample_general_mixed(k: int, n: int, seed: int, margin_range=(0.05, 0.9)) -> FormMatrix:
    """Griffiths-positive sample moved off the identity by random GL_n and GL_k actions."""
    rng = np.random.default_rng(seed)
    margin = rng.uniform(*margin_range)
    base = sample_general(k, n, int(rng.integers(2**63)), margin)
    p = random_well_conditioned(rng, n)
    c = random_well_conditioned(rng, k)
    return base.change_coordinates(p).congruence(c)
