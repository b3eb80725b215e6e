"""Intrinsic Levi form of closed orbits, its quadratic blocks and the Levi cone.

Levi values live in the transversal space.  At a strongly regular point this
is c^C and values are given as complex coordinates in ``datum.c_basis``; the
real structure is coordinatewise conjugation, so a Hermitian Levi matrix
satisfies ``L[q, p] = conj(L[p, q])``.  Cone vectors use the same real
coordinates, which are also coordinates on i·t ⊕ a under t_k -> i·t_k.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import linprog

from .errors import InconclusiveVerdict, NearSingular, NotComplexTangent, UnsupportedCase
from .orbit import orbit_profile
from .tolerances import DEFAULT_TOL

__all__ = [
    "LeviBlock",
    "LeviReport",
    "ConeResult",
    "ConeVerdictWarning",
    "levi_pairing",
    "pairing_matrix",
    "quadratic_blocks",
    "levi_matrix",
    "cone_generators",
    "cone_test",
    "cone_verdict",
    "inertia",
]

CASE_TAGS = ("real", "imag_a1", "imag_am1", "imag_other", "complex_a1", "complex_am1", "complex_other", "null")
CONE_CASES = ("noncompact_full", "compact_nontrivial_a_full", "hermitian_pointed",
              "hermitian_outside_cmax_full", "nonhermitian_full")


class ConeVerdictWarning(UserWarning):
    """The generator test disagrees with the predicted case of the cone trichotomy."""


@dataclass(frozen=True, eq=False)
class LeviBlock:
    index_set: tuple          # (weight index, vector index) pairs
    matrix: np.ndarray        # (n, n, dim c) complex
    case_tag: str
    representative: int

    @property
    def size(self):
        return len(self.index_set)

    def hermitian_residual(self):
        m = self.matrix
        return float(np.max(np.abs(m - np.conj(m.transpose(1, 0, 2)))))


@dataclass(frozen=True, eq=False)
class ConeResult:
    generators: np.ndarray
    tags: tuple
    rank: int
    full: bool
    pointed: bool
    certificate: np.ndarray | None


@dataclass(frozen=True, eq=False)
class LeviReport:
    profile: object
    tangent: tuple
    matrix: np.ndarray
    blocks: tuple
    cross_block_residual: float
    block_deviation: float
    scalar_unit: np.ndarray | None = None
    scalar_matrix: np.ndarray | None = None
    eigenvalues: np.ndarray | None = None
    inertia: tuple | None = None
    cone: ConeResult | None = None
    cone_case: str | None = None
    cone_full: bool | None = None
    prediction_agrees: bool | None = None
    stein_obstruction: bool | None = None
    irreducible: bool | None = None
    notes: list = field(default_factory=list)


# -- pairing path -------------------------------------------------------------

def _phi(system, base, i):
    w = system.weights[i]
    return complex(w.a * np.exp(-2j * complex(w.lam @ base.eta)) - 1.0)


def _transversal_basis(system, lt):
    """Rows: c_basis followed by the other Λ̃(z) spaces."""
    parts = [system.datum.c_basis]
    for i in lt:
        if i != system.zero_index:
            parts.append(system.weights[i].vectors)
    return np.vstack(parts)


def _coords(basis, v):
    coef, *_ = np.linalg.lstsq(basis.T, v, rcond=None)
    if np.max(np.abs(basis.T @ coef - v), initial=0.0) > 1e-8 * max(1.0, np.max(np.abs(v))):
        raise UnsupportedCase("Levi value outside the transversal space", invariant="[ξ, σ2 ξ'] ∈ Fix(τ_z)")
    return coef


def _pair(system, base, lt, tb, i, ki, j, kj, tol):
    wi, wj = system.weights[i], system.weights[j]
    target = system.find(wi.lam + wj.lam.conj(), wi.a * wj.a)
    if target is None or target not in lt:
        return np.zeros(len(tb), dtype=complex)
    phi = _phi(system, base, i)
    if abs(phi) < tol.singular:
        raise NearSingular(f"|a e^(-2iλ(η)) - 1| = {abs(phi):.2e}", invariant="coefficient nonsingular",
                           module="leviform", op="levi_pairing")
    alg = system.algebra
    val = 1j / phi * alg.bracket(wi.vectors[ki], system.setup.sigma2(wj.vectors[kj]))
    return _coords(tb, val)


def levi_pairing(system, base, i, j, ki=0, kj=0, profile=None, tol=DEFAULT_TOL):
    """𝓛_z(ξ_i, ξ_j) in transversal coordinates."""
    if not system.levi:
        raise UnsupportedCase("Levi basis not installed", invariant="Levi basis")
    profile = profile or orbit_profile(system, base, tol)
    lt = profile.lambda_tilde_z
    for k in (i, j):
        if k in lt:
            raise NotComplexTangent(f"weight {k} lies in Λ̃(z)", invariant="(λ,a) ∉ Λ̃(z)",
                                    module="leviform", op="levi_pairing")
    return _pair(system, base, lt, _transversal_basis(system, lt), i, ki, j, kj, tol)


def _tangent(system, profile):
    return tuple((i, k) for i in profile.complex_tangent_indices for k in range(system.weights[i].dim))


def pairing_matrix(system, base, profile=None, tol=DEFAULT_TOL):
    """Full Levi matrix on the complex tangent, one entry per pair of basis vectors."""
    profile = profile or orbit_profile(system, base, tol)
    lt = profile.lambda_tilde_z
    tb = _transversal_basis(system, lt)
    tan = _tangent(system, profile)
    n = len(tan)
    out = np.zeros((n, n, len(tb)), dtype=complex)
    for p, (i, ki) in enumerate(tan):
        for q, (j, kj) in enumerate(tan):
            out[p, q] = _pair(system, base, lt, tb, i, ki, j, kj, tol)
    return tan, out


# -- block path ---------------------------------------------------------------------

def _case_tag(w):
    if w.reality == "zero":
        return "null"
    if w.reality == "real":
        return "real"
    kind = "imag" if w.reality == "imaginary" else "complex"
    if w.a == 1:
        return f"{kind}_a1"
    if w.a == -1:
        return f"{kind}_am1"
    return f"{kind}_other"


def _orbits(system, indices):
    s2, tp = system.sigma2_action, system.theta_partner
    left = set(indices)
    out = []
    for i in sorted(indices):
        if i not in left:
            continue
        orb = {i, s2[i], tp[i], s2[tp[i]]}
        left -= orb
        out.append(sorted(orb))
    return out


def quadratic_blocks(system, base, profile=None, tol=DEFAULT_TOL):
    """Hermitian blocks of the Levi form from the case-by-case formulas."""
    profile = profile or orbit_profile(system, base, tol)
    if not profile.strongly_regular:
        raise UnsupportedCase("quadratic blocks need a strongly regular base point",
                              invariant="Λ̃(z) = {(0,1)}", module="leviform", op="quadratic_blocks")
    if not system.levi:
        raise UnsupportedCase("Levi basis not installed", invariant="Levi basis")
    alg = system.algebra
    s2, tp = system.sigma2_action, system.theta_partner
    ws = system.weights
    r = system.datum.dim

    def X(i, j):
        return system.c_coords(alg.bracket(ws[i].xi, ws[j].xi))

    blocks = []
    for orb in _orbits(system, profile.complex_tangent_indices):
        w0 = ws[orb[0]]
        tag = _case_tag(w0)
        if tag == "null":
            blocks.append(_null_block(system, base, orb, profile, tol))
            continue
        pos = [i for i in orb if i in system.positive]
        i = pos[0]
        w = ws[i]
        p, s = tp[i], s2[i]
        sp = s2[p]
        lam_eta = complex(w.lam @ base.eta)
        e = np.exp(-2j * lam_eta)
        em = np.exp(2j * lam_eta)
        a = w.a
        for den in (a * e - 1, np.conj(a) * em - 1, e + 1, em + 1):
            if abs(den) < tol.singular:
                raise NearSingular(f"Levi coefficient denominator {abs(den):.2e}", invariant="coefficient nonsingular",
                                   module="leviform", op="quadratic_blocks")
        if tag == "real":
            idx = [i, p]
            m = np.zeros((2, 2, r), complex)
            m[0, 1] = 1j * X(i, p) / (a * e - 1)
        elif tag == "imag_a1":
            idx = [i, p]
            m = np.zeros((2, 2, r), complex)
            m[0, 0] = 1j * X(i, p) / (e - 1)
            m[1, 1] = -1j * X(i, p) / (em - 1)
        elif tag == "imag_am1":
            idx = [i, p]
            m = np.zeros((2, 2, r), complex)
            m[0, 0] = -1j * X(i, p) / (e + 1)
            m[1, 1] = 1j * X(i, p) / (em + 1)
        elif tag == "imag_other":
            # i = (λ, a), sp = (λ, 1/a), s = (−λ, a), p = (−λ, 1/a)
            idx = [i, sp, s, p]
            m = np.zeros((4, 4, r), complex)
            m[0, 1] = 1j * X(i, p) / (a * e - 1)
            m[2, 3] = 1j * X(s, sp) / (a * em - 1)
        elif tag == "complex_a1":
            idx = [i, s, p, sp]
            m = np.zeros((4, 4, r), complex)
            m[0, 3] = 1j * X(i, p) / (e - 1)
            m[2, 1] = -1j * X(i, p) / (em - 1)
        elif tag == "complex_am1":
            idx = [i, s, p, sp]
            m = np.zeros((4, 4, r), complex)
            m[2, 1] = 1j * X(i, p) / (em + 1)
            m[0, 3] = -1j * X(i, p) / (e + 1)
        else:  # complex_other
            idx = [i, s, p, sp]
            m = np.zeros((4, 4, r), complex)
            m[0, 3] = 1j * X(i, p) / (a * e - 1)
            m[2, 1] = -1j * X(i, p) / (np.conj(a) * em - 1)
        # Hermitian completion: off-diagonal conjugates, diagonal entries are already real
        for u in range(len(idx)):
            for v in range(u + 1, len(idx)):
                if np.any(m[u, v]) and not np.any(m[v, u]):
                    m[v, u] = np.conj(m[u, v])
                elif np.any(m[v, u]) and not np.any(m[u, v]):
                    m[u, v] = np.conj(m[v, u])
        blocks.append(LeviBlock(tuple((k, 0) for k in idx), m, tag, i))
    return blocks


def _null_block(system, base, orb, profile, tol):
    """Zero-weight spaces with a != 1: no displayed formula, use the pairing formula."""
    lt = profile.lambda_tilde_z
    tb = _transversal_basis(system, lt)
    idx = [(i, k) for i in orb for k in range(system.weights[i].dim)]
    n = len(idx)
    m = np.zeros((n, n, len(tb)), complex)
    for p, (i, ki) in enumerate(idx):
        for q, (j, kj) in enumerate(idx):
            m[p, q] = _pair(system, base, lt, tb, i, ki, j, kj, tol)
    return LeviBlock(tuple(idx), m, "null", orb[0])


def inertia(h, tol=DEFAULT_TOL.inertia):
    """(n+, n-, n0) of a Hermitian matrix with absolute eigenvalue threshold."""
    h = np.asarray(h)
    if h.size == 0:
        return (0, 0, 0), np.zeros(0)
    w = np.linalg.eigvalsh(0.5 * (h + h.conj().T))
    return (int(np.sum(w > tol)), int(np.sum(w < -tol)), int(np.sum(np.abs(w) <= tol))), w


def _scalar_unit(system, blocks):
    """Transversal unit for rank-one data, taken from the first positive weight."""
    alg = system.algebra
    ws = system.weights
    for i in sorted(system.positive):
        w = ws[i]
        p = system.theta_partner[i]
        x = system.c_coords(alg.bracket(w.xi, ws[p].xi))
        if w.reality == "real":
            u = x
        elif w.reality == "imaginary" and w.a in (1, -1):
            u = 1j * x
        else:
            eta = w.coroot
            cc = system.c_coords(eta)
            dt = system.datum.dim_t
            u = np.concatenate([-1j * cc[:dt], cc[dt:]])
        return u.real
    return None


def levi_matrix(system, base, tol=DEFAULT_TOL, profile=None):
    """Block assembly of the Levi form plus the cross-check against the pairing formula."""
    profile = profile or orbit_profile(system, base, tol)
    blocks = quadratic_blocks(system, base, profile, tol)
    tan, full = pairing_matrix(system, base, profile, tol)
    pos = {t: k for k, t in enumerate(tan)}
    assembled = np.zeros_like(full)
    dev = 0.0
    for b in blocks:
        ids = [pos[t] for t in b.index_set]
        sub = full[np.ix_(ids, ids)]
        dev = max(dev, float(np.max(np.abs(sub - b.matrix), initial=0.0)))
        assembled[np.ix_(ids, ids)] = b.matrix
    mask = np.ones(full.shape[:2], bool)
    for b in blocks:
        ids = [pos[t] for t in b.index_set]
        mask[np.ix_(ids, ids)] = False
    cross = float(np.max(np.abs(full[mask]), initial=0.0))
    notes = []
    kw = {}
    if system.datum.dim == 1:
        unit = _scalar_unit(system, blocks)
        if unit is not None:
            s = full[:, :, 0] / unit[0]
            iner, ev = inertia(s, tol.inertia)
            kw = dict(scalar_unit=unit, scalar_matrix=s, eigenvalues=ev, inertia=iner)
    return LeviReport(profile=profile, tangent=tan, matrix=full, blocks=tuple(blocks),
                      cross_block_residual=cross, block_deviation=dev, notes=notes, **kw)


# -- Levi cone ---------------------------------------------------------------------

def cone_generators(system, base, profile=None, tol=DEFAULT_TOL):
    """Generators of the Levi cone per weight type, with the rule that produced each."""
    profile = profile or orbit_profile(system, base, tol)
    if not profile.strongly_regular:
        raise UnsupportedCase("cone generators need a strongly regular base point", invariant="Λ̃(z) = {(0,1)}")
    alg = system.algebra
    ws = system.weights
    tp = system.theta_partner
    gens, tags = [], []

    def add(v, tag):
        v = np.asarray(v)
        if np.max(np.abs(v.imag), initial=0.0) > 1e-8 * max(1.0, np.max(np.abs(v))):
            raise InconclusiveVerdict("cone generator is not real", invariant="generator in c")
        v = v.real
        if np.max(np.abs(v)) > tol.rank:
            gens.append(v)
            tags.append(tag)

    for i in profile.complex_tangent_indices:
        w = ws[i]
        if w.is_zero:
            continue
        x = system.c_coords(alg.bracket(w.xi, ws[tp[i]].xi))
        if w.reality == "real":
            add(x, "real")
            add(-x, "real")
        elif w.reality == "imaginary" and w.a == 1:
            lam_eta = complex(w.lam @ base.eta)
            s = (1j * lam_eta).real
            if abs(s) < tol.singular:
                raise NearSingular("λ(η) = 0 for an imaginary weight with a = 1", invariant="λ(η) != 0",
                                   module="leviform", op="cone_generators")
            add(-1j * x if s > 0 else 1j * x, "imag_a1_pos" if s > 0 else "imag_a1_neg")
        elif w.reality == "imaginary" and w.a == -1:
            add(1j * x, "imag_am1")
            add(-1j * x, "imag_am1")
        else:
            tag = "imag_other" if w.reality == "imaginary" else "complex"
            for v in (x.real, -x.real, x.imag, -x.imag):
                add(v.astype(complex), tag)
    # zero-weight spaces with a != 1 contribute their quadratic values
    for b in quadratic_blocks(system, base, profile, tol):
        if b.case_tag != "null":
            continue
        m = b.matrix
        for u in range(b.size):
            add(m[u, u], "null")
            for v in range(u + 1, b.size):
                for z in (m[u, v].real, -m[u, v].real, m[u, v].imag, -m[u, v].imag):
                    add(z.astype(complex), "null")
    r = system.datum.dim
    g = np.array(gens).reshape(-1, r)
    return g, tuple(tags)


def cone_test(generators, tol=DEFAULT_TOL):
    """Positive spanning test.

    The cone is the whole space iff the generators have full rank and some
    combination with all coefficients >= 1 vanishes.  Otherwise a Farkas
    certificate ℓ != 0 with ℓ·g <= 0 for every generator is returned.
    """
    g = np.atleast_2d(np.asarray(generators, float))
    m, r = g.shape
    if m == 0:
        return ConeResult(g, (), 0, r == 0, True, None)
    rank = int(np.linalg.matrix_rank(g, tol=1e-8 * max(1.0, np.max(np.abs(g)))))
    if rank < r:
        _, _, vh = np.linalg.svd(g)
        cert = vh[-1]
        full = False
    else:
        res = linprog(np.zeros(m), A_eq=g.T, b_eq=np.zeros(r), bounds=[(1, None)] * m, method="highs")
        if res.status == 0:
            full, cert = True, None
        elif res.status == 2:
            full = False
            # ℓ·g_i <= 0, Σ ℓ·g_i = −1, |ℓ| <= 1e6
            sol = linprog(np.zeros(r), A_ub=g, b_ub=np.zeros(m), A_eq=g.sum(0)[None, :], b_eq=[-1.0],
                          bounds=[(-1e6, 1e6)] * r, method="highs")
            if sol.status != 0:
                raise InconclusiveVerdict("no Farkas certificate found for a non-full cone",
                                          invariant="Farkas alternative", module="leviform", op="cone_verdict")
            cert = sol.x
        else:
            raise InconclusiveVerdict(f"LP status {res.status}: {res.message}", invariant="LP solvable",
                                      module="leviform", op="cone_verdict")
    # pointed iff some ℓ has ℓ·g_i <= −1 for all i
    pt = linprog(np.zeros(r), A_ub=g, b_ub=-np.ones(m), bounds=[(None, None)] * r, method="highs")
    pointed = pt.status == 0
    if cert is not None:
        cert = cert / np.max(np.abs(cert))
    return ConeResult(g, (), rank, bool(full), bool(pointed), cert)


def predict_case(system, base, tol=DEFAULT_TOL):
    """Predicted case of the cone trichotomy from the structural data."""
    from .domains import cmax_membership, hermitian_type

    if not system.datum.is_compact:
        return "noncompact_full"
    if any(w.a != 1 for w in system.weights):
        return "compact_nontrivial_a_full"
    s1 = system.setup.sigma1.operator
    s2 = system.setup.sigma2.operator
    if np.max(np.abs(s1 - s2)) > 1e-10:
        raise InconclusiveVerdict("all a = 1 on a compact Cartan but sigma1 != sigma2",
                                  invariant="a = 1 everywhere forces sigma1 = sigma2")
    if len(system.setup.p1) == 0:
        # compact g: no noncompact weights, so C_max is all of t
        return "hermitian_pointed"
    if not hermitian_type(system.setup):
        return "nonhermitian_full"
    defined, inside, _ = cmax_membership(system, base.eta)
    if not defined:
        raise InconclusiveVerdict("no good ordering available for C_max", invariant="good ordering exists")
    return "hermitian_pointed" if inside else "hermitian_outside_cmax_full"


def cone_verdict(system, base, tol=DEFAULT_TOL, profile=None, report=None):
    """Cone generators, the positive-spanning verdict and the predicted case."""
    from .weights import is_irreducible

    profile = profile or orbit_profile(system, base, tol)
    gens, tags = cone_generators(system, base, profile, tol)
    res = cone_test(gens, tol)
    res = ConeResult(res.generators, tags, res.rank, res.full, res.pointed, res.certificate)
    case = predict_case(system, base, tol)
    predicted_full = case != "hermitian_pointed"
    agrees = predicted_full == res.full
    irreducible = is_irreducible(system, tol)
    notes = []
    if not irreducible:
        notes.append("algebra is not (sigma1, sigma2)-irreducible; trichotomy applies per factor")
    if not agrees:
        msg = f"generator test gives full={res.full} but predicted case is {case}"
        warnings.warn(msg, ConeVerdictWarning, stacklevel=2)
        notes.append(msg)
    if report is None:
        report = levi_matrix(system, base, tol, profile)
    return LeviReport(
        **{k: getattr(report, k) for k in ("profile", "tangent", "matrix", "blocks", "cross_block_residual",
                                           "block_deviation", "scalar_unit", "scalar_matrix", "eigenvalues",
                                           "inertia")},
        cone=res, cone_case=case, cone_full=res.full, prediction_agrees=agrees,
        stein_obstruction=res.full, irreducible=irreducible, notes=report.notes + notes,
    )
