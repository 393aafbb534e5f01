"""Hyperdeterminants of k x k x k hypermatrices with eigenvalue bounds."""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import permutations

import numpy as np

__all__ = [
    "Hypermatrix",
    "PreconditionError",
    "hdet",
    "hdet_bounds",
    "hdet_permutation_sum",
    "hdet_recursive",
    "permutation_sign",
]

# double-permutation sum is (k!)^2 k; past this size the recursion is used
DIRECT_MAX_K = 4


class PreconditionError(ValueError):
    pass


@dataclass(frozen=True)
class Hypermatrix:
    """Stack of k complex k x k layers ``B^(1), ..., B^(k)``."""

    layers: np.ndarray  # shape (k, k, k): layers[l, i, j] = b^(l+1)_{i+1, j+1}

    def __post_init__(self):
        arr = np.asarray(self.layers, dtype=complex)
        if arr.ndim != 3 or not (arr.shape[0] == arr.shape[1] == arr.shape[2]):
            raise ValueError(f"hypermatrix must have shape (k, k, k), got {arr.shape}")
        object.__setattr__(self, "layers", arr)

    @property
    def k(self) -> int:
        return self.layers.shape[0]

    def is_hermitian(self, tol: float = 1e-12) -> bool:
        scale = max(1.0, float(np.abs(self.layers).max(initial=0.0)))
        return bool(np.all(np.abs(self.layers - self.layers.conj().transpose(0, 2, 1)) <= tol * scale))

    def left(self, u) -> "Hypermatrix":
        """Layerwise product ``U B``."""
        return Hypermatrix(np.einsum("ij,ljk->lik", np.asarray(u, dtype=complex), self.layers))

    def right(self, u) -> "Hypermatrix":
        """Layerwise product ``B U``."""
        return Hypermatrix(self.layers @ np.asarray(u, dtype=complex))

    def swap_layers(self, a: int, b: int) -> "Hypermatrix":
        order = list(range(self.k))
        order[a], order[b] = order[b], order[a]
        return Hypermatrix(self.layers[order])

    def to_json(self) -> dict:
        return {
            "k": self.k,
            "layers": [
                [[[z.real, z.imag] for z in row] for row in layer] for layer in self.layers
            ],
        }

    @classmethod
    def from_json(cls, data) -> "Hypermatrix":
        raw = np.asarray(data["layers"], dtype=float)
        h = cls(raw[..., 0] + 1j * raw[..., 1])
        if "k" in data and int(data["k"]) != h.k:
            raise ValueError(f"declared k={data['k']} but layers have k={h.k}")
        return h


def permutation_sign(perm) -> int:
    perm = list(perm)
    sign = 1
    seen = [False] * len(perm)
    for start in range(len(perm)):
        if seen[start]:
            continue
        length = 0
        j = start
        while not seen[j]:
            seen[j] = True
            j = perm[j]
            length += 1
        if length % 2 == 0:
            sign = -sign
    return sign


def hdet_permutation_sum(h: Hypermatrix) -> complex:
    """sum over sigma, tau of sgn(sigma) prod_j b^{(tau(j))}_{j, sigma(j)}."""
    b = h.layers
    k = h.k
    perms = list(permutations(range(k)))
    signs = [permutation_sign(s) for s in perms]
    rows = np.arange(k)
    total = 0j
    for sigma, sgn in zip(perms, signs):
        for tau in perms:
            total += sgn * np.prod(b[list(tau), rows, list(sigma)])
    return complex(total)


def _drop(h: np.ndarray, row: int, col: int) -> np.ndarray:
    """Remove layer 0, the given row and the given column."""
    rest = np.delete(h[1:], row, axis=1)
    return np.delete(rest, col, axis=2)


def _recursive(b: np.ndarray) -> complex:
    k = b.shape[0]
    if k == 1:
        return complex(b[0, 0, 0])
    first = b[0]
    if np.allclose(first, first.conj().T, rtol=0, atol=1e-13 * max(1.0, np.abs(first).max())):
        # unitary change making the first layer diagonal; hdet(U B U^H) = hdet(B)
        _, u = np.linalg.eigh(first)
        b = u.conj().T @ b @ u
        return complex(sum(b[0, j, j] * _recursive(_drop(b, j, j)) for j in range(k)))
    # general layer: cofactor expansion along the first layer
    total = 0j
    for j in range(k):
        for c in range(k):
            if b[0, j, c] != 0:
                total += (-1) ** (j + c) * b[0, j, c] * _recursive(_drop(b, j, c))
    return total


def hdet_recursive(h: Hypermatrix) -> complex:
    """Hyperdeterminant by expansion along the first layer.

    A Hermitian first layer is unitarily diagonalized first, so the expansion
    only runs over the diagonal; otherwise the full cofactor expansion is used.
    """
    return _recursive(h.layers.copy())


def hdet(h: Hypermatrix) -> complex:
    if h.k <= DIRECT_MAX_K:
        return hdet_permutation_sum(h)
    return hdet_recursive(h)


def hdet_bounds(h: Hypermatrix, tol: float = 1e-10) -> tuple[float, float]:
    """``(k! prod mu_l, k! prod lambda_l)`` for Hermitian PSD layers.

    ``mu_l`` and ``lambda_l`` are the extreme eigenvalues of layer l.
    """
    if not h.is_hermitian():
        raise PreconditionError("hdet bounds need Hermitian layers")
    lows, highs = [], []
    for idx, layer in enumerate(h.layers):
        ev = np.linalg.eigvalsh(layer)
        scale = max(1.0, float(np.abs(layer).max()))
        if ev[0] < -tol * scale:
            raise PreconditionError(
                f"layer {idx} is not positive semidefinite (min eigenvalue {ev[0]:.3e})"
            )
        lows.append(max(ev[0], 0.0))
        highs.append(ev[-1])
    f = math.factorial(h.k)
    return f * float(np.prod(lows)), f * float(np.prod(highs))
