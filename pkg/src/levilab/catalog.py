"""Concrete triples (U^C, σ1, σ2): SL(2) and SL(3) pairs and their k-fold twisted products.

Case names follow ``base:pair:k=K`` with an optional ``:untwisted`` suffix,
e.g. ``sl2:s11-theta:k=1`` or ``sl2:s11-s11:k=2:untwisted``.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .cartan import fundamental_cartan, make_datum
from .errors import InvalidArgument, ValidationError
from .liecore import (Involution, LieAlgebra, build_sl, make_setup, sl_conjugation, sl_coords, sl_theta,
                      sl_unitary)
from .tolerances import DEFAULT_TOL

__all__ = ["CaseSpec", "build_case", "parse_case", "case_names", "standard_cartan_menu", "power_algebra",
           "SL2_PAIRS", "SL3_PAIRS"]

SL2_PAIRS = ("s11-s11", "s11-theta", "theta-s11", "theta-theta")
SL3_PAIRS = ("sl3",)


@dataclass(frozen=True)
class CaseSpec:
    base_type: str = "sl2"
    pair: str = "s11-theta"
    k: int = 1
    twisted: bool = True
    overrides: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        if self.base_type not in ("sl2", "sl3"):
            raise InvalidArgument(f"unknown base type {self.base_type!r}", invariant="base_type in {sl2, sl3}")
        allowed = SL2_PAIRS if self.base_type == "sl2" else SL3_PAIRS
        if self.pair not in allowed:
            raise InvalidArgument(f"pair {self.pair!r} not available for {self.base_type}",
                                  invariant=f"pair in {allowed}", module="catalog", op="build_case")
        if not isinstance(self.k, (int, np.integer)) or self.k < 1:
            raise InvalidArgument("k must be a positive integer", invariant="k >= 1")

    @property
    def name(self):
        s = f"{self.base_type}:{self.pair}:k={self.k}"
        return s if self.twisted else s + ":untwisted"


def parse_case(name):
    parts = str(name).split(":")
    if len(parts) not in (3, 4) or not parts[2].startswith("k="):
        raise InvalidArgument(f"malformed case name {name!r}", invariant="name = base:pair:k=K[:untwisted]")
    twisted = True
    if len(parts) == 4:
        if parts[3] != "untwisted":
            raise InvalidArgument(f"unknown case suffix {parts[3]!r}", invariant="suffix = untwisted")
        twisted = False
    try:
        k = int(parts[2][2:])
    except ValueError:
        raise InvalidArgument(f"malformed k in {name!r}", invariant="k integer") from None
    return CaseSpec(parts[0], parts[1], k, twisted)


def case_names():
    """Catalog cases shipped as the regression corpus."""
    out = [f"sl2:{p}:k=1" for p in SL2_PAIRS] + ["sl3:sl3:k=1"]
    out += [f"sl2:{p}:k=2" for p in ("s11-s11", "s11-theta")]
    out += ["sl2:s11-s11:k=2:untwisted", "sl2:theta-theta:k=2:untwisted"]
    return out


# -- building blocks -----------------------------------------------------------

def power_algebra(alg, k):
    """k-fold direct sum with labels prefixed '1.', '2.', ..."""
    if k == 1:
        return alg
    d = alg.dim_complex
    n = k * d
    c = np.zeros((n, n, n), dtype=complex)
    kill = np.zeros((n, n), dtype=complex)
    mb = alg.matrix_basis
    m = mb.shape[1]
    mats = np.zeros((n, k * m, k * m), dtype=complex)
    for b in range(k):
        s = slice(b * d, (b + 1) * d)
        c[s, s, s] = alg.structure
        kill[s, s] = alg.killing
        mats[s, b * m:(b + 1) * m, b * m:(b + 1) * m] = mb
    labels = tuple(f"{b + 1}.{x}" for b in range(k) for x in alg.basis_labels)
    return LieAlgebra(labels, c, killing=kill, matrix_basis=mats)


def _base(spec):
    """(algebra, theta, sigma, tau) of the simple factor."""
    if spec.base_type == "sl2":
        alg = build_sl(2)
        th = sl_theta(alg)
        s11 = sl_unitary(alg, [1, -1], "sigma_1,1")
        table = {"s11": s11, "theta": th}
        a, b = spec.pair.split("-")
        return alg, th, table[a], table[b]
    alg = build_sl(3)
    return alg, sl_theta(alg), sl_conjugation(alg), sl_unitary(alg, [1, 1, -1], "I21.theta.I21")


def _assemble(d, k, slots, name):
    """Block operator whose output block i is phi(input block j) for slots[i] = (j, phi)."""
    m = np.zeros((k * d, k * d), dtype=complex)
    for i, (j, phi) in enumerate(slots):
        m[i * d:(i + 1) * d, j * d:(j + 1) * d] = phi.matrix
    return Involution(m, True, name)


def _twisted_slots(k, th, sig, tau):
    """Slot lists of σ1 and σ2 for the k-fold twisted product (0-based blocks)."""
    if k == 1:
        return [(0, sig)], [(0, tau)]
    s1 = [(0, sig)] + [None] * (k - 1)
    s2 = [None] * k
    if k % 2:
        # σ1 swaps (2,3), (4,5), ...; σ2 swaps (1,2), ..., (k-2,k-1) and applies τ to block k
        for i in range(1, k - 1, 2):
            s1[i], s1[i + 1] = (i + 1, th), (i, th)
        for i in range(0, k - 1, 2):
            s2[i], s2[i + 1] = (i + 1, th), (i, th)
        s2[k - 1] = (k - 1, tau)
    else:
        for i in range(1, k - 1, 2):
            s1[i], s1[i + 1] = (i + 1, th), (i, th)
        s1[k - 1] = (k - 1, tau)
        for i in range(0, k, 2):
            s2[i], s2[i + 1] = (i + 1, th), (i, th)
    return s1, s2


def build_case(spec, tol=DEFAULT_TOL):
    """RealFormSetup of a catalog case (a CaseSpec or its name)."""
    if isinstance(spec, str):
        spec = parse_case(spec)
    alg, th, sig, tau = _base(spec)
    k = spec.k
    d = alg.dim_complex
    big = power_algebra(alg, k)
    theta = _assemble(d, k, [(i, th) for i in range(k)], "theta")
    if spec.twisted:
        s1, s2 = _twisted_slots(k, th, sig, tau)
    else:
        s1, s2 = [(i, sig) for i in range(k)], [(i, tau) for i in range(k)]
    sigma1 = _assemble(d, k, s1, "sigma1")
    sigma2 = _assemble(d, k, s2, "sigma2")
    ov = spec.overrides or {}
    sigma1 = ov.get("sigma1", sigma1)
    sigma2 = ov.get("sigma2", sigma2)
    return make_setup(big, theta, sigma1, sigma2, name=spec.name, tol=tol)


# -- Cartan menu ------------------------------------------------------------------

def _compact_alternative(setup, c0, seed, tol):
    """Compact Cartan of g1 ∩ g2 (ν = 0), when one exists and c0 is not compact."""
    from .cartan import _canonical_basis, _refine, centralizer_in

    kk, _ = setup.intersection_parts(tol)
    rng = np.random.default_rng(seed)
    t = _refine(setup.algebra, kk, rng, tol)
    if len(t) != c0.dim:
        return None
    t = _canonical_basis(setup.algebra, setup.gram, t)
    h_all = centralizer_in(setup.algebra, t, np.vstack([kk, setup.intersection_parts(tol)[1]]), tol)
    if len(h_all) != len(t):
        return None
    return make_datum(setup, None, t, label="compact", tol=tol, seed=seed, c0_dim=c0.dim)


def standard_cartan_menu(setup, seed=42, tol=DEFAULT_TOL):
    """Fundamental datum plus the compact alternative when g1 ∩ g2 has one."""
    c0 = fundamental_cartan(setup, seed, tol)
    menu = [make_datum(setup, c0.nu, c0.c_basis, label="fundamental", tol=tol, seed=seed, c0_dim=c0.dim)]
    if not c0.is_compact:
        try:
            alt = _compact_alternative(setup, c0, seed, tol)
        except ValidationError as exc:
            raise ValidationError(f"curated compact datum failed validation: {exc}",
                                  invariant="menu entries validate", module="catalog",
                                  op="standard_cartan_menu") from exc
        if alt is not None:
            menu.append(alt)
    return menu


def sl_matrix_vector(setup, m):
    """Coefficient vector of an explicit (block) matrix."""
    return sl_coords(setup.algebra, m)
