"""Hard Lefschetz checks for determinants of Griffiths-positive matrices of (1,1)-forms."""

from .exterior import (
    DimensionError,
    Form,
    V,
    basis_enumerate,
    conjugate,
    kahler_form,
    monomial,
    multiplication_matrix,
    power,
    volume_coefficient,
    wedge,
)
from .hyperdet import Hypermatrix, PreconditionError, hdet, hdet_bounds
from .lefschetz import (
    check_hrr,
    check_ld,
    hodge_riemann_deformation_check,
    is_lefschetz,
    lefschetz_matrix,
    q_gram,
    signature,
)
from .positivity import (
    FormMatrix,
    det_form,
    griffiths_min_quadratic,
    is_griffiths_positive_diagonalized,
    normal_form,
    normalize_gl_k,
    normalize_gl_n,
)

__version__ = "0.1.0"

__all__ = [
    "DimensionError",
    "Form",
    "FormMatrix",
    "Hypermatrix",
    "PreconditionError",
    "V",
    "basis_enumerate",
    "check_hrr",
    "check_ld",
    "conjugate",
    "det_form",
    "griffiths_min_quadratic",
    "hdet",
    "hdet_bounds",
    "hodge_riemann_deformation_check",
    "is_griffiths_positive_diagonalized",
    "is_lefschetz",
    "kahler_form",
    "lefschetz_matrix",
    "monomial",
    "multiplication_matrix",
    "normal_form",
    "normalize_gl_k",
    "normalize_gl_n",
    "power",
    "q_gram",
    "signature",
    "volume_coefficient",
    "wedge",
]
