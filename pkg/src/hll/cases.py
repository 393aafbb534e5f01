"""Seeded reproductions of the theorems and the open n=6 exploration.

Every case draws one integer seed per trial from the root seed (counter-based
split via :class:`numpy.random.SeedSequence`), so any failing trial can be
rerun alone from the ``seed`` recorded in its row.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field

import numpy as np

from . import diagonal
from .exterior import (
    Form,
    basis_enumerate,
    conjugate,
    kahler_form,
    power,
    volume_coefficient,
    wedge,
)
from .hyperdet import Hypermatrix, hdet
from .lefschetz import (
    ISO_THRESHOLD,
    block_decomposition,
    check_hrr,
    check_ld,
    hodge_riemann_deformation_check,
    is_lefschetz,
    lefschetz_matrix,
    q_gram,
    signature,
    singular_report,
)
from .positivity import (
    FormMatrix,
    det_form,
    diagonal_layers,
    is_griffiths_positive_diagonalized,
    layers_from_bt,
    normalize_gl_k,
    normalize_gl_n,
    random_kahler_matrix,
    sample_bt,
    sample_general_mixed,
)

__all__ = [
    "CASE_IDS",
    "CaseReport",
    "explore_n6_22",
    "negative_witness",
    "run_case",
    "trial_seed",
    "verify_classical_and_mixed",
    "verify_classical_hlt",
    "verify_diag_family",
    "verify_n2k2",
    "verify_n3k2",
]

CASE_IDS = (
    "n2k2",
    "n3k2",
    "n4k2_diag",
    "n5k2_diag",
    "hlt_partial_diag",
    "n6_explore",
    "timorin_mixed",
    "classical_hlt",
)

CSV_COLUMNS = ("case", "n", "k", "p", "q", "seed", "t", "r", "min_sv_ratio", "verdict")


def trial_seed(root: int, index: int) -> int:
    ss = np.random.SeedSequence(root, spawn_key=(index,))
    return int(ss.generate_state(1, np.uint64)[0])


@dataclass
class CaseReport:
    case_id: str
    trials: int
    failures: int = 0
    worst_margin: float = math.inf
    worst_seed: int | None = None
    elapsed: float = 0.0
    n: int | None = None
    seed: int = 0
    rows: list = field(default_factory=list)
    witnesses: list = field(default_factory=list)
    extra: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return self.failures == 0

    def add_row(self, seed, n, k, p, q, t, r, ratio, ok: bool):
        self.rows.append(
            {
                "case": self.case_id,
                "n": n,
                "k": k,
                "p": p,
                "q": q,
                "seed": seed,
                "t": t,
                "r": r,
                "min_sv_ratio": ratio,
                "verdict": "pass" if ok else "fail",
            }
        )

    def record_trial(self, seed: int, margin: float, problems: list[str], witness=None):
        if margin < self.worst_margin:
            self.worst_margin = float(margin)
            self.worst_seed = seed
        if problems:
            self.failures += 1
            entry = {"seed": seed, "problems": problems}
            if witness is not None:
                entry["witness"] = witness
            self.witnesses.append(entry)

    def summary(self) -> dict:
        """Deterministic summary; wall-clock data lives under "timing" only."""
        return {
            "case_id": self.case_id,
            "n": self.n,
            "seed": self.seed,
            "trials": self.trials,
            "failures": self.failures,
            "worst_margin": None if math.isinf(self.worst_margin) else self.worst_margin,
            "worst_seed": self.worst_seed,
            "failure_witnesses": self.witnesses[:10],
            "extra": self.extra,
            "timing": {"elapsed_s": self.elapsed},
        }


def _timed(report: CaseReport, start: float) -> CaseReport:
    report.elapsed = time.perf_counter() - start
    return report


def _rel(a: float, b: float) -> float:
    return abs(a - b) / max(abs(a), abs(b), 1e-300)


# -- k = 2, n = 2 ------------------------------------------------------------


def _n2k2_trial(m: FormMatrix, tol: float = 1e-9):
    """Checks for one Griffiths-positive 2x2 matrix on C^2; returns (margin, problems, info)."""
    problems = []
    omega = kahler_form(2)
    big = det_form(m)
    vol = volume_coefficient(big)
    lef = is_lefschetz(big, 0, 0)
    if not (vol.real > 0 and abs(vol.imag) <= tol * abs(vol)):
        problems.append(f"volume coefficient of det(M) is {vol:.6g}")
    if not lef.is_isomorphism:
        problems.append("det(M) is not Lefschetz for (0,0)")

    m1, p = normalize_gl_n(m)
    g = normalize_gl_k(m1)
    mn = g.matrix
    rho12 = mn.entry(0, 1)
    rho22 = mn.entry(1, 1) - omega
    mid = volume_coefficient(wedge(omega, rho22))
    cross = wedge(rho12, conjugate(rho12))
    lam = -volume_coefficient(cross).real / 2
    decomposed = power(omega, 2) + wedge(omega, rho22) - cross
    om_n = det_form(mn)
    scale = max(1.0, om_n.max_abs())
    if abs(mid) > tol * scale:
        problems.append(f"omega ^ rho22 = {mid:.3g} is not zero")
    if not om_n.allclose(decomposed, atol=tol * scale):
        problems.append("det(M') differs from omega^2 + omega^rho22 - rho12^conj(rho12)")
    if lam < -tol:
        problems.append(f"lambda = {lam:.3g} < 0")
    if _rel(volume_coefficient(om_n).real, 2 * (1 + lam)) > tol:
        problems.append("volume coefficient of det(M') is not 2(1 + lambda)")
    # GL_k scales det by |det C|^2 and the coordinate change scales Vol by |det P|^2
    expect = g.det_factor * abs(np.linalg.det(p)) ** 2 * vol.real
    if _rel(volume_coefficient(om_n).real, expect) > tol:
        problems.append("transport of det(M) under the normalization is inconsistent")
    return 1 + lam, problems, {"lambda": lam, "ratio": lef.ratio}


def verify_n2k2(trials: int = 100, seed: int = 0) -> CaseReport:
    """det(M) is Lefschetz for (0,0) and equals (1 + lambda) omega^2 after normalization."""
    start = time.perf_counter()
    rep = CaseReport("n2k2", trials, n=2, seed=seed)
    for i in range(trials):
        s = trial_seed(seed, i)
        m = sample_general_mixed(2, 2, s)
        margin, problems, info = _n2k2_trial(m)
        rep.add_row(s, 2, 2, 0, 0, "", 0, info["ratio"], not problems)
        rep.record_trial(s, margin, problems)
    return _timed(rep, start)


# -- k = 2, n = 3 ------------------------------------------------------------


def frame_along(direction: np.ndarray) -> np.ndarray:
    """Unitary U whose first column is direction / |direction|."""
    d = np.asarray(direction, dtype=complex)
    n = d.size
    basis = np.column_stack([d, np.eye(n, dtype=complex)])
    q, r = np.linalg.qr(basis)
    # fix the phase so that the first column is exactly the normalized direction
    q[:, 0] *= r[0, 0] / abs(r[0, 0])
    return q


def n3_reduction_quantities(mn: FormMatrix, alpha: np.ndarray) -> dict:
    """Quantities of the n=3 positivity argument for alpha in V^{1,0}.

    ``mn`` must have alpha_11 = omega and rho_12 primitive.  Coordinates are
    rotated unitarily so that alpha = lambda dz_1.
    """
    u = frame_along(alpha)
    rot = mn.change_coordinates(np.conj(u))  # coefficient matrices a -> U^H a U
    wp = rot.coeffs[1, 1]
    rho = rot.coeffs[0, 1]
    a = wp[1, 1].real
    b = wp[1, 2]
    t = a * wp[2, 2].real - abs(b) ** 2
    c22, c23, c32, c33 = rho[1, 1], rho[1, 2], rho[2, 1], rho[2, 2]
    lam2 = float(np.vdot(alpha, alpha).real)
    predicted = 2 * lam2 * (
        a + (abs(b) ** 2 + t) / a - 2 * (c22 * np.conj(c33)).real + abs(c23) ** 2 + abs(c32) ** 2
    )
    return {
        "a": a,
        "b": b,
        "t": t,
        "c22": c22,
        "c33": c33,
        "gap22": a - abs(c22) ** 2,
        "gap33": (abs(b) ** 2 + t) / a - abs(c33) ** 2,
        "q_predicted": float(predicted),
    }


def verify_n3k2(trials: int = 100, seed: int = 0, t_steps: int = 11) -> CaseReport:
    """Q is positive definite on V^{1,0}; det(M) is Lefschetz and Hodge-Riemann."""
    start = time.perf_counter()
    rep = CaseReport("n3k2", trials, n=3, seed=seed)
    worst_gap = math.inf
    for i in range(trials):
        s = trial_seed(seed, i)
        rng = np.random.default_rng(s)
        m = sample_general_mixed(2, 3, s)
        problems = []
        big = det_form(m)
        h = q_gram(big, 1, 0)
        ev, vecs = np.linalg.eigh(h)
        qmargin = ev[0] / ev[-1]
        if not ev[0] > 1e-9 * ev[-1]:
            problems.append(f"Q on V^(1,0) has min eigenvalue {ev[0]:.3g}")
        ratios = []
        for p, q in ((1, 0), (0, 1)):
            lef = is_lefschetz(big, p, q)
            ratios.append(lef.ratio)
            rep.add_row(s, 3, 2, p, q, "", 0, lef.ratio, lef.is_isomorphism)
            if not lef.is_isomorphism:
                problems.append(f"not Lefschetz for ({p},{q})")
            dfm = hodge_riemann_deformation_check(m, p, q, t_steps)
            ratios.append(dfm.min_ratio)
            if not dfm.passed:
                problems.append(f"deformation check failed for ({p},{q}) at t={dfm.first_failure}")
        # sub-inequalities of the unitary reduction along the Q-minimizing direction and a random one
        m1, _ = normalize_gl_n(m)
        mn = normalize_gl_k(m1).matrix
        # Q is invariant under the normalization only up to a positive factor, so
        # directions are taken in the normalized coordinates
        hn = q_gram(det_form(mn), 1, 0)
        _, vn = np.linalg.eigh(hn.T)  # x^T H conj(x) = conj(x)^H H^T conj(x)
        directions = [np.conj(vn[:, 0]), rng.standard_normal(3) + 1j * rng.standard_normal(3)]
        for alpha in directions:
            info = n3_reduction_quantities(mn, alpha)
            worst_gap = min(worst_gap, info["gap22"], info["gap33"])
            if not (info["gap22"] > 0 and info["gap33"] > 0):
                problems.append(f"|c22|^2 < a or |c33|^2 < (|b|^2+t)/a fails: {info}")
            actual = float((alpha @ hn @ np.conj(alpha)).real)
            if _rel(actual, info["q_predicted"]) > 1e-9:
                problems.append(f"Q(alpha, alpha) = {actual:.6g} != {info['q_predicted']:.6g}")
        rep.record_trial(s, min([qmargin] + ratios), problems)
    rep.extra["worst_subinequality_gap"] = worst_gap
    return _timed(rep, start)


# -- diagonalized family -----------------------------------------------------


def _expected_dual_coefficient(coeffs, n, i, j) -> float:
    """Omega over the complement of I | J (the (n-2, 0) diagonal entry)."""
    rest = [x for x in range(1, n + 1) if x not in set(i) | set(j)]
    return coeffs[tuple(rest)]


def check_n_minus_2_structure(omega: Form, coeffs, n: int, tol: float = 1e-12) -> list[str]:
    """(n-2, 0): diagonal with entries Omega over the complementary pair."""
    problems = []
    mat = lefschetz_matrix(omega, n - 2, 0)
    expected = np.array(
        [_expected_dual_coefficient(coeffs, n, i, j) for i, j in basis_enumerate(n, n - 2, 0)]
    )
    scale = max(coeffs.values())
    if np.abs(mat - np.diag(expected)).max() > tol * scale:
        problems.append(f"(n-2,0) matrix is not diag(Omega_complement) at n={n}")
    return problems


def check_n_minus_3_structure(omega: Form, coeffs, n: int, b, tol: float = 1e-12):
    """(n-3, 1): blocks G_F for each 4-set F, 1 x 1 blocks otherwise.

    Returns (problems, margin); the margin is the worst of the triangle gaps
    relative to the side lengths.
    """
    problems = []
    mat = lefschetz_matrix(omega, n - 3, 1)
    basis = basis_enumerate(n, n - 3, 1)
    scale = max(coeffs.values())
    blocks = block_decomposition(mat, tol * scale)
    fours = [blk for blk in blocks if len(blk) == 4]
    if sorted({len(blk) for blk in blocks}) not in ([1, 4], [4]):
        problems.append(f"unexpected block sizes {sorted({len(x) for x in blocks})}")
    if len(fours) != math.comb(n, 4):
        problems.append(f"{len(fours)} G blocks, expected C({n},4)")
    margin = math.inf
    for blk in blocks:
        if len(blk) == 1:
            (a,) = blk
            if not mat[a, a].real > 0:
                problems.append(f"1x1 block {basis[a]} is {mat[a, a]:.3g}")
            continue
        if len(blk) != 4:
            continue
        # each member is e(D + {m}, {m}); F is the complement of the base D
        ms = [basis[a][1][0] for a in blk]
        base = set(basis[blk[0]][0]) - {ms[0]}
        quad = tuple(sorted(set(range(1, n + 1)) - base))
        order = [blk[ms.index(x)] for x in quad]
        sub = mat[np.ix_(order, order)]
        g = diagonal.g_block(coeffs, quad)
        if np.abs(sub - g).max() > tol * scale:
            problems.append(f"block for {quad} is not G")
        a_, b_, c_ = diagonal.heron_sides(coeffs, quad)
        det_g = float(np.linalg.det(g))
        heron = diagonal.heron_product(a_, b_, c_)
        if _rel(det_g, heron) > 1e-9:
            problems.append(f"Heron mismatch for {quad}: det {det_g:.6g} vs {heron:.6g}")
        if not det_g < 0:
            problems.append(f"det G_{quad} = {det_g:.3g} is not negative")
        gaps = diagonal.triangle_gaps(a_, b_, c_)
        if min(gaps) <= 0:
            problems.append(f"sides {a_, b_, c_} for {quad} violate the triangle inequality")
        if diagonal.ptolemy_gap(b, quad) < -1e-12 * max(1.0, float(np.abs(b).max()) ** 2):
            problems.append(f"Ptolemy inequality fails for {quad}")
        margin = min(margin, min(gaps) / max(a_, b_, c_))
    return problems, margin


def diag_bidegrees(n: int, full: bool) -> list[tuple[int, int]]:
    if full:
        return [(p, n - 2 - p) for p in range(n - 2, -1, -1)]
    return sorted({(n - 2, 0), (n - 3, 1), (1, n - 3), (0, n - 2)}, reverse=True)


def diag_trial(b, t, seed: int, rep: CaseReport | None = None, full: bool | None = None, t_steps: int = 21):
    n = len(b)
    full = n <= 5 if full is None else full
    problems = []
    m = FormMatrix.from_layers(layers_from_bt(b, t))
    cert = is_griffiths_positive_diagonalized(m)
    if not cert.positive:
        problems.append("sample is not Griffiths positive")
    omega = det_form(m)
    coeffs = diagonal.omega_coefficients(b, t)
    if not omega.allclose(diagonal.omega_form(b, t), atol=1e-12 * max(coeffs.values())):
        problems.append("det(M) differs from sum Omega_ij V_ij")
    layers = diagonal_layers(m)
    for (i, j), c in list(coeffs.items())[:6]:
        hv = hdet(Hypermatrix(layers[[i - 1, j - 1]]))
        if _rel(hv.real, c) > 1e-12 or abs(hv.imag) > 1e-12 * c:
            problems.append(f"hdet(B{i}, B{j}) = {hv:.6g} != Omega_{i}{j} = {c:.6g}")
    margins = []
    for p, q in diag_bidegrees(n, full):
        lef = is_lefschetz(omega, p, q)
        margins.append(lef.ratio)
        if rep is not None:
            rep.add_row(seed, n, 2, p, q, "", 0, lef.ratio, lef.is_isomorphism)
        if not lef.is_isomorphism:
            problems.append(f"not Lefschetz for ({p},{q}), ratio {lef.ratio:.3g}")
        if full:
            dfm = hodge_riemann_deformation_check(m, p, q, t_steps)
            margins.append(dfm.min_ratio)
            if rep is not None:
                for tt, r, ratio, ok in dfm.rows:
                    if tt > 0:
                        rep.add_row(seed, n, 2, p, q, round(tt, 12), r, ratio, ok)
            if not dfm.passed:
                problems.append(f"deformation check fails for ({p},{q}) at {dfm.first_failure}")
    problems += check_n_minus_2_structure(omega, coeffs, n)
    more, tri = check_n_minus_3_structure(omega, coeffs, n, b)
    problems += more
    return min(margins), tri, problems


def verify_diag_family(n: int, trials: int = 100, seed: int = 0, t_steps: int = 21, full: bool | None = None) -> CaseReport:
    """Diagonalized 2x2 family: Lefschetz (and Hodge-Riemann for n <= 5) plus structure."""
    if n < 4:
        raise ValueError("the diagonalized family is checked for n >= 4")
    start = time.perf_counter()
    full = n <= 5 if full is None else full
    case = {4: "n4k2_diag", 5: "n5k2_diag"}.get(n, "hlt_partial_diag") if full else "hlt_partial_diag"
    rep = CaseReport(case, trials, n=n, seed=seed)
    worst_triangle = math.inf
    for i in range(trials):
        s = trial_seed(seed, i)
        b, t = sample_bt(n, s)
        margin, tri, problems = diag_trial(b, t, s, rep, full, t_steps)
        worst_triangle = min(worst_triangle, tri)
        rep.record_trial(s, margin, problems, {"b": _cjson(b), "t": list(map(float, t))})
    rep.extra["worst_triangle_gap"] = worst_triangle
    rep.extra["bidegrees"] = [list(x) for x in diag_bidegrees(n, full)]
    return _timed(rep, start)


def _cjson(z) -> list:
    return [[float(x.real), float(x.imag)] for x in np.asarray(z, dtype=complex)]


# -- products of Kahler forms ------------------------------------------------


def _valid_bidegrees(n: int):
    for p in range(n + 1):
        for q in range(n + 1 - p):
            yield p, q


def classical_signature_check(n: int) -> tuple[int, int, int]:
    return signature(q_gram(power(kahler_form(n), n - 2), 1, 1)).triple


def verify_classical_hlt(n_max: int = 5, seed: int = 0) -> CaseReport:
    """omega^k is Lefschetz for every (p, q) with p + q = n - k, n <= n_max."""
    start = time.perf_counter()
    rep = CaseReport("classical_hlt", 1, n=n_max, seed=seed)
    problems = []
    margin = math.inf
    for n in range(1, n_max + 1):
        om = kahler_form(n)
        for p, q in _valid_bidegrees(n):
            k = n - p - q
            lef = is_lefschetz(power(om, k), p, q)
            rep.add_row(seed, n, k, p, q, "", 0, lef.ratio, lef.is_isomorphism)
            margin = min(margin, lef.ratio)
            if not lef.is_isomorphism or lef.ratio <= 1e-6:
                problems.append(f"omega^{k} not Lefschetz for ({p},{q}) at n={n}")
        if 2 <= n <= 4 and classical_signature_check(n) != (n * n - 1, 1, 0):
            problems.append(f"signature of Q on V^(1,1) at n={n} is not ({n * n - 1}, 1)")
    rep.record_trial(seed, margin, problems)
    return _timed(rep, start)


def mixed_trial(n: int, p: int, q: int, seed: int):
    rng = np.random.default_rng(seed)
    k = n - p - q
    factors = [Form.from_matrix(random_kahler_matrix(rng, n)) for _ in range(k)]
    aux = Form.from_matrix(random_kahler_matrix(rng, n))
    omega = Form.scalar(n)
    for f in factors:
        omega = wedge(omega, f)
    problems = []
    lef = is_lefschetz(omega, p, q)
    if not lef.is_isomorphism:
        problems.append(f"HLT fails for ({p},{q})")
    ok, sig = check_hrr(omega, aux, p, q)
    if not ok:
        problems.append(f"HRR fails for ({p},{q}): signature {sig.triple}")
    ld = check_ld(omega, aux, p, q)
    if not ld:
        problems.append(f"LD fails for ({p},{q}): {ld.to_json()}")
    hrr_margin = sig.min_eigenvalue / sig.max_abs_eigenvalue if sig.n_plus else 1.0
    return lef, min(lef.ratio, hrr_margin), problems, ld


def verify_classical_and_mixed(n_max: int = 4, trials: int = 100, seed: int = 0) -> CaseReport:
    """Products of random Kahler forms satisfy HLT and HRR (with LD) for every bidegree."""
    start = time.perf_counter()
    rep = CaseReport("timorin_mixed", trials, n=n_max, seed=seed)
    classical = verify_classical_hlt(min(n_max, 5), seed)
    worst_ld = 0.0
    combos = [(n, p, q) for n in range(1, n_max + 1) for p, q in _valid_bidegrees(n)]
    for i in range(trials):
        s = trial_seed(seed, i)
        problems = []
        margin = math.inf
        for c, (n, p, q) in enumerate(combos):
            sub = trial_seed(s, c)
            lef, mg, probs, ld = mixed_trial(n, p, q, sub)
            worst_ld = max(worst_ld, ld.orthogonality_residual)
            rep.add_row(sub, n, n - p - q, p, q, "", 0, lef.ratio, not probs)
            margin = min(margin, mg)
            problems += [f"n={n}: {x}" for x in probs]
        rep.record_trial(s, margin, problems)
    if classical.failures:
        rep.failures += classical.failures
        rep.witnesses += classical.witnesses
    rep.extra["classical_worst_ratio"] = classical.worst_margin
    rep.extra["worst_ld_residual"] = worst_ld
    rep.extra["combinations"] = len(combos)
    return _timed(rep, start)


# -- the negative witness ----------------------------------------------------


def negative_witness() -> complex:
    """-star(alpha ^ conj(alpha) ^ beta ^ conj(beta)) for alpha = dz1^dz2,
    beta = 2 V1 - V3 - V4 on C^4 (beta is primitive, the value is negative)."""
    from .exterior import V, monomial

    n = 4
    alpha = monomial(n, [1, 2], [])
    beta = 2 * V(n, 1) - V(n, 3) - V(n, 4)
    return -volume_coefficient(wedge(wedge(alpha, conjugate(alpha)), wedge(beta, conjugate(beta))))


# -- n = 6, bidegree (2,2) ---------------------------------------------------


HIST_EDGES = np.concatenate([[0.0], np.logspace(-12, 0, 25)])


def diagonal_block_indices(n: int) -> list[int]:
    """Positions of the V_ij-type monomials e({i,j},{i,j}) in the (2,2) basis."""
    return [a for a, (i, j) in enumerate(basis_enumerate(n, 2, 2)) if i == j]


def check_diagonal_block(block: np.ndarray, coeffs, tol: float = 1e-12) -> list[str]:
    problems = []
    allowed = np.array([0.0] + list(coeffs.values()))
    scale = max(coeffs.values())
    if np.abs(block - block.T).max() > tol * scale:
        problems.append("15x15 block is not symmetric")
    dist = np.abs(block.real[..., None] - allowed).min(axis=-1)
    if dist.max() > tol * scale or np.abs(block.imag).max() > tol * scale:
        problems.append("15x15 block has entries outside {0, Omega_ij}")
    if np.abs(block - diagonal.pair_block(coeffs)).max() > tol * scale:
        problems.append("15x15 block differs from the pair rule")
    return problems


def _segment(b0, t0, b1, t1, s):
    return (1 - s) * b0 + s * b1, (1 - s) * t0 + s * t1


def locate_block_singularity(b0, t0, b1, t1, iters: int = 200) -> dict:
    """Bisect the segment between two samples whose 15x15 block determinants
    have opposite signs.  The segment stays inside the diagonalized
    Griffiths-positive family (b convex, t > 0), so the determinant vanishes
    somewhere on it.
    """

    def sign(s):
        b, t = _segment(b0, t0, b1, t1, s)
        return np.linalg.slogdet(diagonal.pair_block(diagonal.omega_coefficients(b, t)))[0]

    lo, hi = 0.0, 1.0
    s_lo = sign(lo)
    if s_lo == sign(hi):
        raise ValueError("endpoints have the same determinant sign")
    for _ in range(iters):
        mid = (lo + hi) / 2
        if mid in (lo, hi):
            break
        if sign(mid) == s_lo:
            lo = mid
        else:
            hi = mid
    b, t = _segment(b0, t0, b1, t1, lo)
    coeffs = diagonal.omega_coefficients(b, t)
    omega = det_form(FormMatrix.from_layers(layers_from_bt(b, t)))
    mat = lefschetz_matrix(omega, 2, 2)
    strict = singular_report(mat, 2, 2, 1e-12)
    # kernel vector x = sum x_a V_a and the residual |Omega ^ x| / (|Omega| |x|)
    _, sv, vh = np.linalg.svd(diagonal.pair_block(coeffs))
    idx = diagonal_block_indices(6)
    x = np.zeros(mat.shape[1], dtype=complex)
    x[idx] = vh[-1]
    residual = float(np.linalg.norm(mat @ x) / np.linalg.norm(mat, 2))
    return {
        "s": lo,
        "b": _cjson(b),
        "t": [float(v) for v in t],
        "min_t": float(np.min(t)),
        "max_abs_b": float(np.abs(b).max()),
        "ratio": strict.ratio,
        "block_ratio": float(sv[-1] / sv[0]),
        "kernel_residual": residual,
        "condition_bound": max(coeffs.values()) / min(coeffs.values()),
        "strict_threshold": 1e-12,
        "singular_at_strict": not strict.is_isomorphism,
    }


def explore_n6_22(trials: int = 1000, seed: int = 0, threshold: float = ISO_THRESHOLD, keep: int = 10) -> CaseReport:
    """Margins of det(M) at n=6, bidegree (2,2), over the diagonalized family.

    Exploratory: a margin at or below ``threshold`` is re-verified at 1e-12
    with a condition-number bound and reported as a candidate, never as a
    theorem failure.  The sign of the 15 x 15 block determinant is tracked as
    well; once both signs occur, :func:`sign_change_witness` certifies (in
    exact arithmetic) and locates a singular instance between the first
    positive and the first negative sample.
    """
    start = time.perf_counter()
    n = 6
    rep = CaseReport("n6_explore", trials, n=n, seed=seed)
    idx = diagonal_block_indices(n)
    entries = []
    shape_problems = 0
    candidates = []
    first_sign = {}
    for i in range(trials):
        s = trial_seed(seed, i)
        b, t = sample_bt(n, s)
        omega = det_form(FormMatrix.from_layers(layers_from_bt(b, t)))
        mat = lefschetz_matrix(omega, 2, 2)
        if np.abs(mat.imag).max() == 0:
            mat = mat.real
        lef = singular_report(mat, 2, 2, threshold)
        block = mat[np.ix_(idx, idx)]
        block_rep = singular_report(block, 2, 2, threshold)
        coeffs = diagonal.omega_coefficients(b, t)
        if check_diagonal_block(block, coeffs):
            shape_problems += 1
        sgn = int(np.linalg.slogdet(block.real)[0])
        first_sign.setdefault(sgn, (s, b, t))
        rep.add_row(s, n, 2, 2, 2, "", 0, lef.ratio, lef.is_isomorphism)
        entries.append((lef.ratio, s, b, t, block_rep.ratio))
        if lef.ratio < rep.worst_margin:
            rep.worst_margin, rep.worst_seed = lef.ratio, s
        if not lef.is_isomorphism:
            strict = singular_report(mat, 2, 2, 1e-12)
            cond_ok = max(coeffs.values()) / min(coeffs.values()) < 1e8
            if not strict.is_isomorphism and cond_ok:
                candidates.append(s)
    ratios = np.array([e[0] for e in entries])
    block_ratios = np.array([e[4] for e in entries])
    hist, _ = np.histogram(ratios, bins=HIST_EDGES)
    worst = sorted(entries, key=lambda e: (e[0], e[1]))[:keep]
    rep.extra = {
        "histogram": {"edges": [float(x) for x in HIST_EDGES], "counts": [int(c) for c in hist]},
        "min_margin": float(ratios.min()) if ratios.size else None,
        "median_margin": float(np.median(ratios)) if ratios.size else None,
        "min_block_margin": float(block_ratios.min()) if block_ratios.size else None,
        "shape_problems": shape_problems,
        "candidates": candidates,
        "threshold": threshold,
    }
    rep.extra["block_det_signs"] = sorted(first_sign)
    rep.extra["sign_change"] = None
    if 1 in first_sign and -1 in first_sign:
        rep.extra["sign_change"] = sign_change_witness(first_sign[1], first_sign[-1])
    rep.extra["singular_instance_confirmed"] = bool(rep.extra["sign_change"] and rep.extra["sign_change"]["confirmed"])
    rep.witnesses = []
    rep.extra["worst"] = [
        {
            "seed": s,
            "margin": float(r),
            "block_margin": float(br),
            "b": _cjson(b),
            "t": [float(x) for x in t],
            "omega": {f"{i}{j}": c for (i, j), c in diagonal.omega_coefficients(b, t).items()},
        }
        for r, s, b, t, br in worst
    ]
    return _timed(rep, start)


def sign_change_witness(pos, neg, max_denominator: int = 1000) -> dict:
    """Exact certificate plus a located singular instance between two samples.

    The endpoints are replaced by rational approximations (still valid
    samples when every t stays positive) and their block determinants are
    computed exactly; opposite signs prove that a singular instance lies on
    the segment joining them, which is then located by bisection.
    """
    ends, floats = [], []
    for s, b, t in (pos, neg):
        det, br, tr = diagonal.exact_pair_block_det(b, t, max_denominator)
        ends.append(
            {
                "seed": s,
                "b": [[str(x), str(y)] for x, y in br],
                "t": [str(x) for x in tr],
                "det_sign": (det > 0) - (det < 0),
                "det": float(det),
            }
        )
        floats.append((np.array([complex(x, y) for x, y in br]), np.array([float(x) for x in tr])))
    valid = all(min(f[1]) > 0 and np.abs(f[0]).max() <= 2 for f in floats)
    opposite = ends[0]["det_sign"] * ends[1]["det_sign"] == -1
    root = locate_block_singularity(*floats[0], *floats[1]) if opposite else None
    confirmed = bool(
        valid and opposite and root["singular_at_strict"] and root["condition_bound"] < 1e8
    )
    return {"endpoints": ends, "exact_opposite_signs": opposite, "root": root, "confirmed": confirmed}


def run_case(case_id: str, trials: int, seed: int, n: int | None = None, t_steps: int = 21, threshold: float = ISO_THRESHOLD) -> CaseReport:
    if case_id == "n2k2":
        return verify_n2k2(trials, seed)
    if case_id == "n3k2":
        return verify_n3k2(trials, seed, t_steps=t_steps)
    if case_id == "n4k2_diag":
        return verify_diag_family(4, trials, seed, t_steps)
    if case_id == "n5k2_diag":
        return verify_diag_family(5, trials, seed, t_steps)
    if case_id == "hlt_partial_diag":
        return verify_diag_family(n or 6, trials, seed, t_steps, full=False)
    if case_id == "timorin_mixed":
        return verify_classical_and_mixed(min(n or 4, 5), trials, seed)
    if case_id == "classical_hlt":
        return verify_classical_hlt(min(n or 5, 5), seed)
    if case_id == "n6_explore":
        return explore_n6_22(trials, seed, threshold)
    raise ValueError(f"unknown case {case_id!r}; choose from {', '.join(CASE_IDS)}")
