"""Rank-one Levi signatures, weight compactness, Hermitian type, C_max and q counts."""
from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from .cartan import centralizer_in, fundamental_cartan
from .errors import InvalidArgument, UnsupportedCase
from .leviform import inertia
from .tolerances import DEFAULT_TOL
from .weights import positive_system

__all__ = [
    "DomainReport",
    "rank1_signature",
    "classify_weight_compactness",
    "hermitian_type",
    "good_ordering",
    "cmax_membership",
    "q_completeness_count",
    "domain_report",
]


@dataclass(frozen=True, eq=False)
class DomainReport:
    rank1: dict | None = None
    cmax_defined: bool = False
    eta_in_cmax: bool | None = None
    eta_in_cmax_interior: bool | None = None
    q_complete: int | None = None
    q_complete_variant: int | None = None
    q_discrepancy: bool | None = None
    hermitian_type: bool | None = None
    compactness_flags: dict = field(default_factory=dict)
    notes: list = field(default_factory=list)


# -- rank one ------------------------------------------------------------------

def rank1_signature(report, system):
    """(n+, n-, n0, q) of a rank-one hypersurface orbit, with the counting formula.

    The transversal orientation is fixed so that blocks of imaginary weights
    with a = 1 are positive; q is then the number of negative eigenvalues.
    """
    if system.datum.dim != 1 or report.profile.codim != 1 or report.scalar_matrix is None:
        raise UnsupportedCase("rank-one signature needs dim c = 1 and a hypersurface orbit",
                              invariant="dim c = 1 and codim = 1", module="domains", op="rank1_signature")
    s = report.scalar_matrix
    pos = {t: k for k, t in enumerate(report.tangent)}
    orient = 1.0
    for b in report.blocks:
        if b.case_tag == "imag_a1":
            k = pos[b.index_set[0]]
            if s[k, k].real < 0:
                orient = -1.0
            break
    (npos, nneg, nzero), ev = inertia(orient * s)
    ws = system.weights
    positive = system.positive
    if system.datum.is_compact:
        minus = sum(1 for i in positive if ws[i].a == -1)
        formula = minus + sum(1 for w in ws if not w.is_zero and w.a not in (1, -1))
        # same count with the a != ±1 term also restricted to Λ⁺
        formula_pos = minus + sum(1 for i in positive if ws[i].a not in (1, -1))
        branch = "compact"
    else:
        formula = formula_pos = len(positive)
        branch = "noncompact"
    return {
        "n_plus": npos,
        "n_minus": nneg,
        "n_zero": nzero,
        "q": nneg,
        "q_formula": int(formula),
        "q_formula_positive": int(formula_pos),
        "branch": branch,
        "agrees": nneg == formula,
        "orientation": int(orient),
        "eigenvalues": ev,
    }


# -- compactness and Hermitian type ----------------------------------------------

def classify_weight_compactness(system, i):
    """'compact' iff the Killing form is negative definite on the real sl2-copy of (±λ, 1)."""
    if not system.datum.is_compact:
        raise UnsupportedCase("weight compactness needs a compact Cartan", invariant="c compact")
    w = system.weights[i]
    if w.is_zero:
        raise InvalidArgument("zero weight", invariant="λ != 0")
    if w.a != 1:
        raise UnsupportedCase(f"weight {i} has a = {w.a}, compactness needs a = 1", invariant="a = 1",
                              module="domains", op="classify_weight_compactness")
    setup = system.setup
    alg = setup.algebra
    xi = w.xi
    s2 = setup.sigma2(xi)
    cand = [xi + s2, 1j * (xi - s2), 1j * w.coroot]
    # keep only directions lying in g1 ∩ g2
    basis = []
    for v in cand:
        if np.max(np.abs(v)) < 1e-10:
            continue
        if (np.max(np.abs(setup.sigma1(v) - v)) < 1e-8 and np.max(np.abs(setup.sigma2(v) - v)) < 1e-8):
            basis.append(v)
    if len(basis) < 3:
        raise UnsupportedCase("sl2-copy of the weight is not contained in g1 ∩ g2", invariant="s_λ ⊂ g1 ∩ g2")
    b = np.array([[alg.B(x, y).real for y in basis] for x in basis])
    ev = np.linalg.eigvalsh(0.5 * (b + b.T))
    return "compact" if np.all(ev < -1e-8) else "noncompact"


def hermitian_type(setup, tol=DEFAULT_TOL):
    """Whether g1 = g2 has a maximal compact subalgebra with nonzero center.

    Returns None when sigma1 != sigma2 (not applicable).
    """
    if np.max(np.abs(setup.sigma1.operator - setup.sigma2.operator)) > 1e-10:
        return None
    k = setup.k1
    if len(k) == 0:
        return False
    center = centralizer_in(setup.algebra, k, k, tol)
    return len(center) >= 1


def _compactness(system):
    """Per λ-class: compact/noncompact; classes with no a = 1 member count as noncompact."""
    flags = {}
    for cl in system.lambda_classes():
        ones = [i for i in cl if system.weights[i].a == 1]
        kind = classify_weight_compactness(system, ones[0]) if ones else "noncompact"
        for i in cl:
            flags[i] = kind
    return flags


def good_ordering(system, seed=42, draws=50, tol=DEFAULT_TOL):
    """Search a positive system in which positive noncompact weights dominate compact ones.

    Returns (system with Λ⁺ installed, found flag).
    """
    if not system.datum.is_compact:
        raise UnsupportedCase("good ordering is defined for a compact Cartan", invariant="c compact")
    flags = _compactness(system)
    hats = {i: system.lam_hat(i) for i in system.nonzero}
    comp = [hats[i] for i in hats if flags[i] == "compact"]
    r = system.datum.dim
    if comp:
        _, s, vh = np.linalg.svd(np.array(comp))
        k = int(np.sum(s > 1e-8))
        z = vh[k:].sum(0) if k < r else np.zeros(r)
    else:
        z = np.zeros(r)
    rng = np.random.default_rng(seed)
    for t in range(draws):
        sign = 1.0 if t % 2 == 0 else -1.0
        cand = np.round(rng.uniform(-1, 1, r) + 100.0 * sign * z, 6)
        vals = {i: h @ cand for i, h in hats.items()}
        if any(abs(v) <= tol.regular for v in vals.values()):
            continue
        pos_nc = [vals[i] for i in vals if vals[i] > 0 and flags[i] == "noncompact"]
        pos_c = [vals[i] for i in vals if vals[i] > 0 and flags[i] == "compact"]
        if not pos_c or not pos_nc or min(pos_nc) > max(pos_c):
            out = positive_system(system, cand, tol=tol)
            return replace(out, good_ordering=True), True, flags
    return replace(positive_system(system, seed=seed, tol=tol), good_ordering=False), False, flags


def cmax_membership(system, eta, seed=42, tol=DEFAULT_TOL):
    """(defined, inside, interior) for C_max = {iλ(η) >= 0 for noncompact λ ∈ Λ⁺}."""
    if not system.datum.is_compact:
        raise UnsupportedCase("C_max needs a compact Cartan", invariant="c compact")
    eta = np.asarray(eta, float).reshape(-1)
    if eta.shape[0] != system.datum.dim:
        raise InvalidArgument("eta length must equal dim c", invariant="eta length = dim c")
    sys_go, found, flags = good_ordering(system, seed, tol=tol)
    if not found:
        return False, None, None
    vals = [(1j * complex(sys_go.weights[i].lam @ eta)).real
            for i in sys_go.positive if flags[i] == "noncompact"]
    inside = all(v >= -1e-10 for v in vals)
    interior = all(v > 1e-8 for v in vals)
    return True, inside, interior


def q_completeness_count(system, seed=42, tol=DEFAULT_TOL):
    """Two q-completeness counts of the invariant domain over C_max.

    primary: rk(g1 ∩ g2) + #{(λ, ±1) ∈ Λ⁺} + #{nonzero (λ, a), a != ±1}
    variant: dim t + #{nonzero (λ, 1)} + #{(λ, −1) ∈ Λ⁺} + #{nonzero (λ, a), a != ±1}

    Returns (q_primary, q_variant, discrepancy).
    """
    if not system.datum.is_compact:
        raise UnsupportedCase("q-completeness count needs a compact Cartan", invariant="c compact",
                              module="domains", op="q_completeness_count")
    sys_go, found, _ = good_ordering(system, seed, tol=tol)
    if not found:
        raise UnsupportedCase("no good ordering found", invariant="good ordering exists")
    ws = sys_go.weights
    pos = sys_go.positive
    rk = fundamental_cartan(system.setup, seed, tol).dim
    n1 = sum(1 for i in pos if ws[i].a == 1)
    nm1 = sum(1 for i in pos if ws[i].a == -1)
    nother = sum(1 for w in ws if not w.is_zero and w.a not in (1, -1))
    q_main = rk + n1 + nm1 + nother
    n1_all = sum(1 for w in ws if not w.is_zero and w.a == 1)
    q_alt = system.datum.dim_t + n1_all + nm1 + nother
    return int(q_main), int(q_alt), q_main != q_alt


def domain_report(system, base, levi_report=None, seed=42, tol=DEFAULT_TOL):
    """Everything the domains module can say about a base point."""
    notes = []
    kw = {}
    herm = hermitian_type(system.setup, tol)
    kw["hermitian_type"] = herm
    if levi_report is not None and system.datum.dim == 1 and levi_report.profile.codim == 1 \
            and levi_report.scalar_matrix is not None:
        r1 = rank1_signature(levi_report, system)
        kw["rank1"] = r1
        if not r1["agrees"]:
            notes.append(f"measured q = {r1['q']} differs from the counting formula {r1['q_formula']} "
                         f"(count over positive weights only: {r1['q_formula_positive']})")
    if system.datum.is_compact:
        try:
            kw["compactness_flags"] = _compactness(system)
        except UnsupportedCase as exc:
            notes.append(str(exc))
        try:
            defined, inside, interior = cmax_membership(system, base.eta, seed, tol)
            kw.update(cmax_defined=defined, eta_in_cmax=inside, eta_in_cmax_interior=interior)
            q, qp, disc = q_completeness_count(system, seed, tol)
            kw.update(q_complete=q, q_complete_variant=qp, q_discrepancy=disc)
            if disc:
                notes.append(f"q-completeness: primary count {q}, variant count {qp}")
        except UnsupportedCase as exc:
            notes.append(str(exc))
    return DomainReport(notes=notes, **kw)
