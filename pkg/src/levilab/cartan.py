"""Fundamental Cartan subalgebra of g1 ∩ g2, standard Cartan data and base points."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import expm

from .errors import DegenerateSetup, InvalidArgument, ValidationError
from .liecore import RealLinear, null_space, real_null_space, realify
from .tolerances import DEFAULT_TOL

__all__ = [
    "CartanDatum",
    "BasePoint",
    "max_abelian_subspace",
    "fundamental_cartan",
    "make_datum",
    "ad_exp",
    "twisted_sigma1",
]

DEFAULT_SEED = 42


def _bracket_matrix(algebra, x, basis):
    """Real 2d x m matrix of y -> [x, y] restricted to the real span of ``basis``."""
    if len(basis) == 0:
        return np.zeros((2 * algebra.dim_complex, 0))
    ad = algebra.ad(x)
    return realify(basis @ ad.T).T


def is_abelian(algebra, basis, tol=1e-9):
    return abelian_residual(algebra, basis) < tol


def abelian_residual(algebra, basis):
    m = len(basis)
    res = 0.0
    for i in range(m):
        for j in range(i + 1, m):
            res = max(res, float(np.max(np.abs(algebra.bracket(basis[i], basis[j])))))
    return res


def centralizer_in(algebra, elements, space, tol=DEFAULT_TOL):
    """Real basis of {y in span_R(space) : [x, y] = 0 for x in elements}."""
    if len(space) == 0:
        return space
    if len(elements) == 0:
        return space
    mats = np.vstack([_bracket_matrix(algebra, x, space) for x in elements])
    coef = null_space(mats, tol.rank)
    return (coef.T @ space) if coef.size else space[:0]


def _refine(algebra, space, rng, tol=DEFAULT_TOL):
    """Iterated centralizer refinement: a maximal abelian subspace of ``space``.

    ``space`` must be closed enough under brackets that the centralizer of a
    generic element inside it is abelian (true for p and for compact k).
    """
    space = np.asarray(space)
    for _ in range(max(len(space), 1) + 1):
        if len(space) <= 1 or is_abelian(algebra, space):
            return space
        x = rng.standard_normal(len(space)) @ space
        space = centralizer_in(algebra, [x], space, tol)
    if not is_abelian(algebra, space):
        raise DegenerateSetup("centralizer refinement did not converge", invariant="refinement terminates")
    return space


def _canonical_basis(algebra, gram, basis):
    """Orthogonalize, scale to ad spectral radius 2 and fix signs."""
    if len(basis) == 0:
        return basis
    g = (basis.conj() @ gram @ basis.T).real
    w, v = np.linalg.eigh(g)
    basis = (v / np.sqrt(w)).T @ basis
    out = []
    for x in basis:
        rad = np.max(np.abs(np.linalg.eigvals(algebra.ad(x))))
        x = x * (2.0 / rad)
        k = int(np.argmax(np.abs(x)))
        lead = x[k]
        ref = lead.real if abs(lead.real) > 1e-9 * abs(lead) else lead.imag
        if ref < 0:
            x = -x
        out.append(x)
    return np.array(out)


def max_abelian_subspace(setup, seed=DEFAULT_SEED, tol=DEFAULT_TOL):
    """Maximal abelian subspace a0 of p1 ∩ p2 by centralizer refinement."""
    _, pp = setup.intersection_parts(tol)
    rng = np.random.default_rng(seed)
    a0 = _refine(setup.algebra, pp, rng, tol)
    return _canonical_basis(setup.algebra, setup.gram, a0)


@dataclass(frozen=True, eq=False)
class CartanDatum:
    """Standard Cartan datum (nu, c) with c = t ⊕ a, n = exp(i nu).

    ``c_basis`` is ``t_basis`` followed by ``a_basis``; coordinates of base
    points refer to that ordering.
    """

    nu: np.ndarray
    t_basis: np.ndarray
    a_basis: np.ndarray
    label: str = "fundamental"

    @property
    def c_basis(self):
        d = self.nu.shape[0]
        parts = [b for b in (self.t_basis, self.a_basis) if len(b)]
        return np.vstack(parts) if parts else np.zeros((0, d), dtype=complex)

    @property
    def dim(self):
        return len(self.t_basis) + len(self.a_basis)

    @property
    def dim_t(self):
        return len(self.t_basis)

    @property
    def is_compact(self):
        return len(self.a_basis) == 0

    @property
    def is_noncompact_present(self):
        return len(self.a_basis) > 0

    def to_dict(self):
        def enc(a):
            return [[[float(z.real), float(z.imag)] for z in row] for row in a]

        return {
            "label": self.label,
            "nu": [[float(z.real), float(z.imag)] for z in self.nu],
            "t_basis": enc(self.t_basis),
            "a_basis": enc(self.a_basis),
            "dim": self.dim,
            "is_compact": self.is_compact,
        }


@dataclass(frozen=True, eq=False)
class BasePoint:
    """z = n exp(i eta) with eta given by real coordinates in ``datum.c_basis``."""

    datum: CartanDatum
    eta: np.ndarray

    def __post_init__(self):
        eta = np.asarray(self.eta, dtype=float).reshape(-1)
        if eta.shape[0] != self.datum.dim:
            raise InvalidArgument(
                f"eta has length {eta.shape[0]}, expected dim c = {self.datum.dim}",
                invariant="eta length = dim c",
            )
        if not np.all(np.isfinite(eta)):
            raise InvalidArgument("eta must be finite", invariant="eta real")
        object.__setattr__(self, "eta", eta)

    @property
    def vector(self):
        """η as a coefficient vector of the algebra."""
        return self.eta @ self.datum.c_basis if self.datum.dim else np.zeros(self.datum.nu.shape, complex)


def ad_exp(algebra, x, factor=1.0, check=True):
    """exp(factor * ad x) with a round-trip residual check."""
    a = factor * algebra.ad(x)
    e = expm(a)
    if check:
        res = np.max(np.abs(e @ expm(-a) - np.eye(a.shape[0])))
        if res > 1e-10 * max(1.0, np.max(np.abs(e)) ** 2):
            raise DegenerateSetup(f"matrix exponential residual {res:.2e}", invariant="exp(A)exp(-A) = I")
    return e


def twisted_sigma1(setup, nu):
    """Ad(n^-1) σ1 Ad(n) with n = exp(i nu), as a real-linear map."""
    alg = setup.algebra
    if np.max(np.abs(nu), initial=0.0) == 0.0:
        return setup.sigma1.map
    ep = RealLinear.linear(ad_exp(alg, nu, 1j))
    em = RealLinear.linear(ad_exp(alg, nu, -1j))
    return em @ setup.sigma1.map @ ep


def fundamental_cartan(setup, seed=DEFAULT_SEED, tol=DEFAULT_TOL):
    """Fundamental (maximally noncompact) θ-stable Cartan subalgebra c0 = t0 ⊕ a0 of g1 ∩ g2."""
    alg = setup.algebra
    kk, pp = setup.intersection_parts(tol)
    if len(kk) + len(pp) == 0:
        raise DegenerateSetup("g1 ∩ g2 = 0", invariant="g1 ∩ g2 nonzero", module="cartan", op="fundamental_cartan")
    rng = np.random.default_rng(seed)
    a0 = _refine(alg, pp, rng, tol)
    zk = centralizer_in(alg, a0, kk, tol)
    t0 = _refine(alg, zk, rng, tol)
    gram = setup.gram
    return CartanDatum(
        nu=np.zeros(alg.dim_complex, dtype=complex),
        t_basis=_canonical_basis(alg, gram, t0),
        a_basis=_canonical_basis(alg, gram, a0),
    )


def _fixed_by(phi_map, x, tol):
    return np.max(np.abs(phi_map(x) - x)) <= tol * max(1.0, np.max(np.abs(x)))


def make_datum(setup, nu, c_basis, label="custom", tol=DEFAULT_TOL, seed=DEFAULT_SEED, c0_dim=None):
    """Validate a candidate standard Cartan datum and split c into t ⊕ a."""
    alg = setup.algebra
    d = alg.dim_complex
    nu = np.zeros(d, dtype=complex) if nu is None else np.asarray(nu, dtype=complex).reshape(-1)
    c_basis = np.atleast_2d(np.asarray(c_basis, dtype=complex)) if len(c_basis) else np.zeros((0, d), complex)
    if nu.shape[0] != d or c_basis.shape[1] != d:
        raise InvalidArgument("nu and c_basis must have length dim_complex", invariant="vector length")
    if np.linalg.matrix_rank(realify(c_basis), tol=1e-8) != len(c_basis):
        raise ValidationError("c_basis is not linearly independent over R", invariant="c_basis independent")

    # nu must lie in p1 ∩ p2 so that n = exp(i nu) is in the complexified A0
    if np.max(np.abs(nu)) > 0:
        ok = (_fixed_by(setup.sigma1, nu, 1e-8) and _fixed_by(setup.sigma2, nu, 1e-8)
              and np.max(np.abs(setup.theta(nu) + nu)) < 1e-8)
        if not ok:
            raise ValidationError("nu is not in p1 ∩ p2", invariant="n in exp(i a0)")

    res = abelian_residual(alg, c_basis)
    if res > 1e-9:
        raise ValidationError(f"c is not abelian (residual {res:.2e})", invariant="c abelian")
    s1 = twisted_sigma1(setup, nu)
    for x in c_basis:
        if not _fixed_by(setup.sigma2, x, 1e-8):
            raise ValidationError("c is not fixed by sigma2", invariant="c ⊂ Fix(sigma2)")
        if not _fixed_by(s1, x, 1e-8):
            raise ValidationError("c is not fixed by Ad(n^-1) sigma1 Ad(n)", invariant="c ⊂ Fix(Ad(n^-1) sigma1 Ad(n))")

    # θ split; keep user vectors when they are already θ-eigenvectors
    th = setup.theta
    t_in = [x for x in c_basis if np.max(np.abs(th(x) - x)) < 1e-8]
    a_in = [x for x in c_basis if np.max(np.abs(th(x) + x)) < 1e-8]
    if len(t_in) + len(a_in) == len(c_basis):
        t_basis = np.array(t_in).reshape(-1, d)
        a_basis = np.array(a_in).reshape(-1, d)
    else:
        tp = 0.5 * (c_basis + th(c_basis))
        ap = 0.5 * (c_basis - th(c_basis))
        t_basis = _span(tp)
        a_basis = _span(ap)
        if len(t_basis) + len(a_basis) != len(c_basis):
            raise ValidationError("c is not θ-stable", invariant="c = t ⊕ a")
        t_basis = _canonical_basis(alg, setup.gram, t_basis)
        a_basis = _canonical_basis(alg, setup.gram, a_basis)

    if c0_dim is None:
        c0_dim = fundamental_cartan(setup, seed, tol).dim
    if len(c_basis) != c0_dim:
        raise ValidationError(f"dim c = {len(c_basis)} but dim c0 = {c0_dim}", invariant="dim c = dim c0")

    # maximality inside g2 ∩ Ad(n^-1) g1
    eye = np.eye(2 * d)
    h = real_null_space([setup.sigma2.operator - eye, s1.operator - eye], tol.rank)
    cent = centralizer_in(alg, c_basis, h, tol)
    if len(cent) != len(c_basis):
        raise ValidationError("c is not a Cartan subalgebra of g2 ∩ Ad(n^-1) g1",
                              invariant="Z(c) = c")
    return CartanDatum(nu=nu, t_basis=t_basis, a_basis=a_basis, label=label)


def _span(vectors):
    r = realify(vectors)
    u, s, vh = np.linalg.svd(r, full_matrices=False)
    if not s.size or s[0] == 0:
        return np.zeros((0, vectors.shape[1]), complex)
    k = int(np.sum(s > 1e-8 * s[0]))
    basis = vh[:k]
    d = vectors.shape[1]
    return basis[:, :d] + 1j * basis[:, d:]
