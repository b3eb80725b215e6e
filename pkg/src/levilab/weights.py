"""Extended weight space decomposition with respect to (ad c, τ_n).

Each extended weight (λ, a) carries λ as its values on ``datum.c_basis``
(complex, purely imaginary on t and real on a) and the eigenvalue ``a`` of
τ_n on the weight space.
"""
from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np
from scipy.linalg import cholesky, solve_triangular
from scipy.sparse.csgraph import connected_components

from .cartan import ad_exp
from .errors import (
    BasisConstructionError,
    DegenerateWeight,
    IllConditionedDecomposition,
    InvalidArgument,
    NonRegularElement,
)
from .liecore import RealLinear
from .tolerances import DEFAULT_TOL

__all__ = [
    "ExtendedWeight",
    "WeightSystem",
    "tau_n",
    "extended_decomposition",
    "coroot",
    "sl2_triple",
    "positive_system",
    "levi_basis",
    "rephase",
    "is_irreducible",
    "identity_residuals",
]

MATCH_TOL = 1e-6


@dataclass(frozen=True, eq=False)
class ExtendedWeight:
    index: int
    lam: np.ndarray
    a: complex
    vectors: np.ndarray
    reality: str
    coroot: np.ndarray | None = None

    @property
    def dim(self):
        return len(self.vectors)

    @property
    def xi(self):
        """The weight vector of a one-dimensional space."""
        if self.dim != 1:
            raise InvalidArgument(f"weight {self.index} spans {self.dim} dimensions")
        return self.vectors[0]

    @property
    def is_zero(self):
        return self.reality == "zero"

    def label(self, digits=6):
        lam = ",".join(f"{z.real:+.{digits}g}{z.imag:+.{digits}g}i" for z in self.lam)
        return f"([{lam}], {self.a.real:+.{digits}g}{self.a.imag:+.{digits}g}i)"


@dataclass(frozen=True, eq=False)
class WeightSystem:
    setup: object
    datum: object
    tau: np.ndarray
    weights: tuple
    sigma2_action: tuple
    theta_partner: tuple
    positive: frozenset | None = None
    regular: np.ndarray | None = None
    levi: bool = False
    # sign of B(ξ_λ, ξ_-λ) after normalization, keyed by positive index
    signs: dict = field(default_factory=dict)
    good_ordering: bool | None = None

    def __len__(self):
        return len(self.weights)

    def __getitem__(self, i):
        return self.weights[i]

    @property
    def algebra(self):
        return self.setup.algebra

    @property
    def nonzero(self):
        return [w.index for w in self.weights if not w.is_zero]

    @property
    def zero_index(self):
        for w in self.weights:
            if w.is_zero and abs(w.a - 1) < MATCH_TOL:
                return w.index
        raise DegenerateWeight("no (0, 1) weight space")

    def find(self, lam, a, tol=MATCH_TOL):
        lam = np.asarray(lam)
        for w in self.weights:
            if np.max(np.abs(w.lam - lam), initial=0.0) < tol and abs(w.a - a) < tol:
                return w.index
        return None

    def lam_hat(self, i):
        """λ evaluated on i·t ⊕ a (real)."""
        w = self.weights[i]
        dt = self.datum.dim_t
        return np.concatenate([(1j * w.lam[:dt]).real, w.lam[dt:].real])

    def c_coords(self, x):
        """Complex coordinates of x ∈ c^C in ``datum.c_basis``."""
        cb = self.datum.c_basis
        coef, *_ = np.linalg.lstsq(cb.T, np.asarray(x), rcond=None)
        return coef

    def evaluate(self, i, x):
        """λ_i(x) for x ∈ c^C."""
        return complex(self.weights[i].lam @ self.c_coords(x))

    def is_positive(self, i):
        if self.positive is None:
            raise InvalidArgument("no positive system chosen")
        return i in self.positive

    def lambda_classes(self):
        """Distinct nonzero λ's (as lists of indices sharing λ)."""
        classes = []
        for i in self.nonzero:
            for cl in classes:
                if np.max(np.abs(self.weights[cl[0]].lam - self.weights[i].lam)) < MATCH_TOL:
                    cl.append(i)
                    break
            else:
                classes.append([i])
        return classes


def tau_n(setup, datum):
    """τ_n = exp(-i ad ν) σ1 exp(i ad ν) σ2 as a complex d x d matrix."""
    alg = setup.algebra
    s1 = setup.sigma1.map
    if np.max(np.abs(datum.nu), initial=0.0) > 0:
        ep = RealLinear.linear(ad_exp(alg, datum.nu, 1j))
        em = RealLinear.linear(ad_exp(alg, datum.nu, -1j))
        s1 = em @ s1 @ ep
    t = s1 @ setup.sigma2.map
    if np.max(np.abs(t.anti)) > 1e-9:
        raise IllConditionedDecomposition("τ_n is not C-linear", invariant="τ_n C-linear")
    return t.lin


def _clusters(values, tol):
    """Group sorted real values into clusters separated by gaps > tol."""
    order = np.argsort(values)
    v = values[order]
    groups, start = [], 0
    for k in range(1, len(v) + 1):
        if k == len(v) or v[k] - v[k - 1] > tol:
            groups.append(order[start:k])
            start = k
    # ambiguity: two clusters closer than 10 x tol
    for g, h in zip(groups, groups[1:]):
        gap = values[h].min() - values[g].max()
        if gap < 10 * tol:
            raise IllConditionedDecomposition(
                f"eigenvalue clusters separated by {gap:.2e} < 10 x {tol:.1e}",
                invariant="cluster separation", module="weights", op="extended_decomposition",
            )
    return groups


def _split(spaces, op, tol):
    out = []
    for v in spaces:
        m = v.conj().T @ op @ v
        m = 0.5 * (m + m.conj().T)
        w, u = np.linalg.eigh(m)
        for g in _clusters(w, tol):
            out.append(v @ u[:, g])
    return out


def _classify(lam, dim_t, tol):
    lt, la = lam[:dim_t], lam[dim_t:]
    zt = np.max(np.abs(lt), initial=0.0) < tol
    za = np.max(np.abs(la), initial=0.0) < tol
    if zt and za:
        return "zero"
    if zt and np.max(np.abs(la.imag), initial=0.0) < tol:
        return "real"
    if za and np.max(np.abs(lt.real), initial=0.0) < tol:
        return "imaginary"
    return "complex"


def _snap(a, tol):
    for s in (1.0, -1.0):
        if abs(a - s) < tol:
            return complex(s)
    return a / abs(a)


def extended_decomposition(setup, datum, tol=DEFAULT_TOL):
    """Joint eigendecomposition of {ad(c_k)} and τ_n."""
    alg = setup.algebra
    d = alg.dim_complex
    p = setup.gram
    p = 0.5 * (p + p.conj().T)
    # <x, y> = y^H P x, P = L L^H; orthonormal coordinates u = L^H x
    low = cholesky(p, lower=True)

    def to_on(a):
        # L^H a L^{-H}
        return solve_triangular(low, (low.conj().T @ a).conj().T, lower=True).conj().T

    tau = tau_n(setup, datum)
    ops_t = [to_on(1j * alg.ad(x)) for x in datum.t_basis]
    ops_a = [to_on(alg.ad(x)) for x in datum.a_basis]
    t_on = to_on(tau)
    unitarity = np.max(np.abs(t_on.conj().T @ t_on - np.eye(d)))
    if unitarity > 1e-9:
        raise IllConditionedDecomposition(f"τ_n not unitary (residual {unitarity:.2e})", invariant="τ_n unitary")

    spaces = [np.eye(d, dtype=complex)]
    for op in ops_t + ops_a:
        spaces = _split(spaces, op, tol.cluster)
    spaces = _split(spaces, 0.5 * (t_on + t_on.conj().T), tol.cluster)
    spaces = _split(spaces, -0.5j * (t_on - t_on.conj().T), tol.cluster)

    # back to algebra coordinates: x = L^{-H} u
    def from_on(v):
        return solve_triangular(low.conj().T, v, lower=False)

    raw = []
    ad_ops = [alg.ad(x) for x in datum.c_basis]
    dt = datum.dim_t
    for v in spaces:
        lam = np.array([np.trace(v.conj().T @ to_on(a) @ v) / v.shape[1] for a in ad_ops], dtype=complex)
        a = complex(np.trace(v.conj().T @ t_on @ v) / v.shape[1])
        if abs(abs(a) - 1) > 1e-8:
            raise IllConditionedDecomposition(f"|a| = {abs(a):.12f} != 1", invariant="|a| = 1")
        a = _snap(a, tol.cluster)
        # clean numerical noise in the imaginary/real parts
        lam = np.concatenate([1j * lam[:dt].imag, lam[dt:].real]) if _clean_ok(lam, dt) else lam
        lam[np.abs(lam) < tol.cluster] = 0.0
        vecs = from_on(v).T
        raw.append((lam, a, vecs))

    # deterministic ordering: zero first, then by λ-hat and arg a
    def key(item):
        lam, a, _ = item
        hat = np.concatenate([(1j * lam[:dt]).real, lam[dt:].real])
        return (np.max(np.abs(lam), initial=0.0) > tol.cluster, *np.round(-hat, 7), round(float(np.angle(a)), 7))

    raw.sort(key=key)
    weights = []
    for idx, (lam, a, vecs) in enumerate(raw):
        reality = _classify(lam, dt, tol.reality)
        if reality != "zero" and len(vecs) != 1:
            raise DegenerateWeight(
                f"weight space of λ={lam} a={a} has dimension {len(vecs)}",
                invariant="dim u_(λ,a) = 1", module="weights", op="extended_decomposition",
            )
        vecs = np.array([_phase_fix(x / np.sqrt(_norm2(p, x))) for x in vecs]) if len(vecs) == 1 else vecs
        weights.append(ExtendedWeight(idx, lam, a, vecs, reality))

    sys0 = WeightSystem(setup, datum, tau, tuple(weights), (), ())
    s2, tp = [], []
    for w in weights:
        j = sys0.find(w.lam.conj(), w.a)
        k = sys0.find(-w.lam, 1 / w.a)
        if j is None or k is None:
            raise IllConditionedDecomposition("weight set not closed under σ2 or θ", invariant="σ2/θ index maps")
        s2.append(j)
        tp.append(k)
    weights = [replace(w, coroot=None if w.is_zero else _coroot_vec(setup, w.xi)) for w in weights]
    system = WeightSystem(setup, datum, tau, tuple(weights), tuple(s2), tuple(tp))
    total = sum(w.dim for w in weights)
    if total != d:
        raise IllConditionedDecomposition(f"weight spaces add up to {total} != {d}", invariant="completeness")
    return system


def _clean_ok(lam, dt):
    return np.max(np.abs(lam[:dt].real), initial=0.0) < 1e-9 and np.max(np.abs(lam[dt:].imag), initial=0.0) < 1e-9


def _norm2(p, x):
    return float((x.conj() @ p @ x).real)


def _phase_fix(x):
    k = int(np.argmax(np.abs(x) - 1e-9 * np.arange(len(x))))
    return x * (abs(x[k]) / x[k])


def _coroot_vec(setup, xi):
    return -setup.algebra.bracket(xi, setup.theta(xi))


def coroot(system, i):
    w = system.weights[i]
    if w.is_zero:
        raise InvalidArgument("zero weight has no coroot", invariant="λ != 0")
    p = system.setup.gram
    n = _norm2(p, w.xi)
    return _coroot_vec(system.setup, w.xi / np.sqrt(n))


def sl2_triple(system, i):
    """(h, e, f) with [h,e]=2e, [h,f]=-2f, [e,f]=h."""
    eta = coroot(system, i)
    lev = system.evaluate(i, eta).real
    if lev < 1e-10:
        raise DegenerateWeight(f"λ(η_λ) = {lev:.2e}", invariant="λ(η_λ) > 0")
    w = system.weights[i]
    xi = w.xi / np.sqrt(_norm2(system.setup.gram, w.xi))
    s = np.sqrt(2.0 / lev)
    return 2.0 * eta / lev, s * xi, -s * system.setup.theta(xi)


def positive_system(system, regular=None, seed=42, tol=DEFAULT_TOL, max_draws=200):
    """Choose Λ⁺ = {λ : λ̂(regular) > 0}; ``regular`` has coordinates in i·t ⊕ a."""
    r_dim = system.datum.dim
    hats = {i: system.lam_hat(i) for i in system.nonzero}
    if regular is None:
        rng = np.random.default_rng(seed)
        for _ in range(max_draws):
            cand = rng.integers(-1000, 1001, size=r_dim) / 1000.0
            if all(abs(h @ cand) > tol.regular * max(1.0, np.linalg.norm(h)) for h in hats.values()):
                regular = cand
                break
        else:
            raise NonRegularElement("could not draw a regular element", invariant="regular element exists")
    regular = np.asarray(regular, dtype=float).reshape(-1)
    if regular.shape[0] != r_dim:
        raise InvalidArgument(f"regular element must have length {r_dim}", invariant="length = dim c")
    pos = set()
    for i, h in hats.items():
        v = h @ regular
        if abs(v) <= tol.regular:
            raise NonRegularElement(f"|λ̂(regular)| = {abs(v):.2e} for weight {i}",
                                    invariant="|λ̂(regular)| > 1e-6", module="weights", op="positive_system")
        if v > 0:
            pos.add(i)
    return replace(system, positive=frozenset(pos), regular=regular, levi=False, signs={})


def _sigma2_fix_phase(setup, xi):
    """Multiply xi by a unit scalar so that σ2(xi) = xi (xi spans a σ2-stable line)."""
    s = setup.sigma2(xi)
    k = int(np.argmax(np.abs(xi)))
    c = s[k] / xi[k]
    phi = np.sqrt(c)
    out = phi * xi
    if np.max(np.abs(setup.sigma2(out) - out)) > 1e-8:
        raise BasisConstructionError("σ2-fixed line has no σ2-real generator", invariant="σ2 ξ = ξ")
    return out


def _real_basis(setup, vecs):
    """σ2-real basis of a σ2-stable subspace (rows)."""
    cand = np.vstack([vecs + setup.sigma2(vecs), 1j * (vecs - setup.sigma2(vecs))])
    # rows of the realification span the σ2-real part
    r = np.concatenate([cand.real, cand.imag], axis=1)
    _, _, vv = np.linalg.svd(r, full_matrices=False)
    k = len(vecs)
    d = vecs.shape[1]
    basis = vv[:k]
    out = basis[:, :d] + 1j * basis[:, d:]
    if np.max(np.abs(setup.sigma2(out) - out)) > 1e-8:
        raise BasisConstructionError("could not build a σ2-real basis", invariant="σ2 ξ = ξ")
    return out


def levi_basis(system, tol=DEFAULT_TOL):
    """Install a σ2-compatible basis with B(ξ_λ, ξ_-λ) = ±1 for λ ∈ Λ⁺."""
    if system.positive is None:
        system = positive_system(system)
    setup = system.setup
    alg = setup.algebra
    vec = {}
    for w in system.weights:
        if w.is_zero:
            continue
        vec[w.index] = _phase_fix(w.xi / np.sqrt(_norm2(setup.gram, w.xi)))

    s2 = system.sigma2_action
    tp = system.theta_partner
    done = set()
    for i in sorted(vec):
        if i in done:
            continue
        j = s2[i]
        if j == i:
            vec[i] = _sigma2_fix_phase(setup, vec[i])
        else:
            vec[j] = setup.sigma2(vec[i])
        done.update({i, j})

    signs = {}
    fixed = set()
    for i in sorted(system.positive):
        if i in fixed:
            continue
        p, s = tp[i], s2[i]
        sp = s2[p]
        b = complex(alg.B(vec[i], vec[p]))
        if abs(b) < 1e-10:
            raise BasisConstructionError(f"B(ξ_λ, ξ_-λ) = 0 for weight {i}", invariant="B(ξ_λ, ξ_-λ) != 0")
        if p == s:
            # imaginary λ with a = ±1: ξ_-λ = σ2 ξ_λ, B is real, only |B| can be fixed
            r = 1.0 / np.sqrt(abs(b))
            vec[i] = vec[i] * r
            vec[p] = vec[p] * r
            signs[i] = int(np.sign(b.real))
        else:
            vec[p] = vec[p] / b
            if sp != p:
                vec[sp] = setup.sigma2(vec[p])
            signs[i] = 1
        fixed.update({i, p, s, sp})
        for q in (s, sp):
            if q in system.positive:
                signs[q] = signs[i]

    weights = []
    for w in system.weights:
        if w.is_zero:
            vs = w.vectors if abs(w.a - 1) < MATCH_TOL else _real_basis(setup, w.vectors)
            weights.append(replace(w, vectors=vs))
        else:
            weights.append(replace(w, vectors=vec[w.index][None, :]))
    out = replace(system, weights=tuple(weights), levi=True, signs=signs)
    res = levi_residual(out)
    if res > 1e-9:
        raise BasisConstructionError(f"Levi basis residual {res:.2e}", invariant="σ2 ξ_(λ,a) = ξ_(σ2λ,a)")
    return out


def rephase(system, phases):
    """Multiply positive representatives by unit phases, keeping the Levi basis conditions.

    ``phases`` maps weight index (in Λ⁺) to an angle.  σ2-companions get the
    conjugate phase and θ-partners the inverse, so B(ξ_λ, ξ_-λ) is unchanged.
    Imaginary weights with a = ±1 only admit the phases ±1 and are skipped.
    """
    if not system.levi:
        raise InvalidArgument("rephase needs a Levi basis")
    s2, tp = system.sigma2_action, system.theta_partner
    vec = {w.index: w.vectors.copy() for w in system.weights}
    touched = set()
    for i, ang in sorted(phases.items()):
        p, s = tp[i], s2[i]
        if i in touched or p == s or i not in system.positive:
            continue
        sp = s2[p]
        if s == i:
            # σ2-fixed (real λ): only real factors keep σ2 ξ = ξ; use a sign
            f = -1.0 if np.cos(ang) < 0 else 1.0
        else:
            f = np.exp(1j * ang)
        vec[i] = vec[i] * f
        vec[p] = vec[p] / f
        if s != i:
            vec[s] = vec[s] * np.conj(f)
            vec[sp] = vec[sp] / np.conj(f)
        touched.update({i, p, s, sp})
    weights = tuple(replace(w, vectors=vec[w.index]) for w in system.weights)
    return replace(system, weights=weights)


def levi_residual(system):
    """max |σ2 ξ_(λ,a) − ξ_(σ2λ,a)| over one-dimensional spaces."""
    res = 0.0
    for w in system.weights:
        if w.is_zero:
            continue
        j = system.sigma2_action[w.index]
        res = max(res, float(np.max(np.abs(system.setup.sigma2(w.xi) - system.weights[j].xi))))
    return res


def normalization_residual(system):
    """max |B(ξ_λ, ξ_-λ) − sign| over λ ∈ Λ⁺."""
    res = 0.0
    alg = system.algebra
    for i in system.positive:
        p = system.theta_partner[i]
        b = alg.B(system.weights[i].xi, system.weights[p].xi)
        res = max(res, abs(b - system.signs[i]))
    return float(res)


def is_irreducible(system, tol=DEFAULT_TOL):
    """Connectedness of the graph on ±λ with edges where B(η_λ, η_μ) != 0."""
    classes = system.lambda_classes()
    reps, seen = [], []
    for cl in classes:
        lam = system.weights[cl[0]].lam
        if any(np.max(np.abs(lam + s)) < MATCH_TOL for s in seen):
            continue
        seen.append(lam)
        reps.append(cl[0])
    n = len(reps)
    if n <= 1:
        return True
    alg = system.algebra
    etas = [coroot(system, i) for i in reps]
    adj = np.zeros((n, n))
    for i in range(n):
        for j in range(n):
            if i != j and abs(alg.B(etas[i], etas[j])) > tol.rank:
                adj[i, j] = 1
    ncomp, _ = connected_components(adj, directed=False)
    return ncomp == 1


def identity_residuals(system):
    """Residuals of the weight-space identities over every extended weight.

    Keys: eigen (ad and τ), theta_map, b_orthogonality, coroot_dual,
    bracket_identity, sl2_triple, multiples.
    """
    setup = system.setup
    alg = setup.algebra
    cb = system.datum.c_basis
    tau = system.tau
    out = dict(eigen=0.0, theta_map=0.0, b_orthogonality=0.0, coroot_dual=0.0,
               bracket_identity=0.0, sl2_triple=0.0, coroot_a_independent=0.0)
    ws = system.weights
    for w in ws:
        for x in w.vectors:
            for k, c in enumerate(cb):
                out["eigen"] = max(out["eigen"], float(np.max(np.abs(alg.ad(c) @ x - w.lam[k] * x))))
            out["eigen"] = max(out["eigen"], float(np.max(np.abs(tau @ x - w.a * x))))
            # θ maps (λ, a) into (−λ, a⁻¹)
            partner = ws[system.theta_partner[w.index]]
            y = setup.theta(x)
            proj = partner.vectors.T @ np.linalg.lstsq(partner.vectors.T, y, rcond=None)[0]
            out["theta_map"] = max(out["theta_map"], float(np.max(np.abs(y - proj))))
    for w in ws:
        for v in ws:
            if v.index == system.theta_partner[w.index]:
                continue
            b = w.vectors @ alg.killing @ v.vectors.T
            out["b_orthogonality"] = max(out["b_orthogonality"], float(np.max(np.abs(b))))
    for w in ws:
        if w.is_zero:
            continue
        eta = coroot(system, w.index)
        lam_b = np.array([alg.B(eta, c) for c in cb])
        out["coroot_dual"] = max(out["coroot_dual"], float(np.max(np.abs(lam_b - w.lam))))
        partner = ws[system.theta_partner[w.index]]
        for y in partner.vectors:
            lhs = alg.bracket(w.xi, y)
            rhs = alg.B(w.xi, y) * eta
            out["bracket_identity"] = max(out["bracket_identity"], float(np.max(np.abs(lhs - rhs))))
        h, e, f = sl2_triple(system, w.index)
        r = max(np.max(np.abs(alg.bracket(h, e) - 2 * e)), np.max(np.abs(alg.bracket(h, f) + 2 * f)),
                np.max(np.abs(alg.bracket(e, f) - h)))
        out["sl2_triple"] = max(out["sl2_triple"], float(r))
    for cl in system.lambda_classes():
        etas = [coroot(system, i) for i in cl]
        for e in etas[1:]:
            out["coroot_a_independent"] = max(out["coroot_a_independent"], float(np.max(np.abs(e - etas[0]))))
    return out


def multiples_present(system, mmax=4):
    """Pairs (i, m) for which (mλ_i, a_i^m) is again an extended weight."""
    found = []
    for i in system.nonzero:
        w = system.weights[i]
        for m in range(2, mmax + 1):
            if system.find(m * w.lam, w.a ** m) is not None:
                found.append((i, m))
    return found


def adjoint_reconstruction(system):
    """Rebuild ad(c_k) and τ_n from the weight data; returns max residuals."""
    alg = system.algebra
    vecs = np.vstack([w.vectors for w in system.weights]).T
    inv = np.linalg.inv(vecs)
    out = {}
    for k, c in enumerate(system.datum.c_basis):
        diag = np.concatenate([[w.lam[k]] * w.dim for w in system.weights])
        rec = vecs @ np.diag(diag) @ inv
        out[f"ad[{k}]"] = float(np.max(np.abs(rec - alg.ad(c))))
    diag = np.concatenate([[w.a] * w.dim for w in system.weights])
    out["tau"] = float(np.max(np.abs(vecs @ np.diag(diag) @ inv - system.tau)))
    return out
