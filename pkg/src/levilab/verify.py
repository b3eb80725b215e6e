"""Independent checks: extrinsic finite-difference Levi forms, adjoint reconstruction, formula vs blocks.

The extrinsic probe is the only place where group matrices are formed.  It
works on 2x2 matrices with an explicit (G1 x G2)-invariant defining function
and a holomorphic chart z0 exp(Σ w_k X_k).
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import expm

from .errors import InvalidArgument, SingularPoint, UnstableOracle, ValidationError
from .leviform import inertia, quadratic_blocks, pairing_matrix
from .liecore import null_space
from .orbit import orbit_profile
from .tolerances import DEFAULT_TOL
from .weights import adjoint_reconstruction

__all__ = [
    "DEFINING_FUNCTIONS",
    "ExtrinsicProbe",
    "invariance_residual",
    "make_probe",
    "complex_hessian",
    "extrinsic_levi_inertia",
    "adjoint_crosscheck",
    "formula_equivalence",
    "random_regular_etas",
]

_J = np.diag([1.0, -1.0])


def _rho_theta_s11(z):
    return float(np.trace(z.conj().T @ z @ _J).real)


def _rho_s11_theta(z):
    return float(np.trace(z @ z.conj().T @ _J).real)


def _rho_s11_s11(z):
    return float(np.trace(z.conj().T @ _J @ z @ _J).real)


def _rho_theta_theta(z):
    return float(np.trace(z.conj().T @ z).real)


# keyed by the sl2 pair of a k = 1 catalog case
DEFINING_FUNCTIONS = {
    "theta-s11": _rho_theta_s11,
    "s11-theta": _rho_s11_theta,
    "s11-s11": _rho_s11_s11,
    "theta-theta": _rho_theta_theta,
}

ACTION_CHECK = 1e-9


@dataclass(frozen=True, eq=False)
class ExtrinsicProbe:
    matrix_dim: int
    defining_function: str
    point: np.ndarray
    step: float = 1e-4
    chart: np.ndarray | None = None   # (m, n, n) complex basis of the Lie algebra
    invariance: float = 0.0

    @property
    def rho(self):
        return DEFINING_FUNCTIONS[self.defining_function]


def _group_samples(setup, rng, n, scale):
    """Pairs (g1, g2) = (exp X1, exp X2) with X_j small random elements of g_j."""
    alg = setup.algebra
    out = []
    for _ in range(n):
        pair = []
        for g in (setup.g1, setup.g2):
            x = (scale * rng.standard_normal(len(g))) @ g
            pair.append(expm(alg.to_matrix(x)))
        out.append(tuple(pair))
    return out


def invariance_residual(setup, rho, z, samples=50, seed=42, scale=0.3):
    """max |rho(g1 z g2^-1) - rho(z)| over sampled group pairs near the identity."""
    rng = np.random.default_rng(seed)
    r0 = rho(z)
    res = 0.0
    for g1, g2 in _group_samples(setup, rng, samples, scale):
        res = max(res, abs(rho(g1 @ z @ np.linalg.inv(g2)) - r0))
    return res / max(1.0, abs(r0))


def make_probe(setup, system, base, step=1e-4, seed=42):
    """Probe for a k = 1 SL(2) catalog case at z = n exp(iη)."""
    alg = setup.algebra
    if alg.matrix_basis is None or alg.matrix_basis.shape[1] != 2:
        raise InvalidArgument("extrinsic probe needs an sl(2) matrix realization", invariant="SL(2,C) case",
                              module="verify", op="extrinsic_levi_inertia")
    pair = setup.name.split(":")[1] if setup.name.count(":") >= 2 else setup.name
    if pair not in DEFINING_FUNCTIONS:
        raise InvalidArgument(f"no certified defining function for {setup.name!r}",
                              invariant="certified defining function")
    z = expm(1j * alg.to_matrix(system.datum.nu)) @ expm(1j * alg.to_matrix(base.vector))
    rho = DEFINING_FUNCTIONS[pair]
    res = invariance_residual(setup, rho, z, seed=seed)
    if res > ACTION_CHECK:
        raise ValidationError(f"defining function not invariant (residual {res:.2e})",
                              invariant="rho (G1 x G2)-invariant", module="verify", op="make_probe")
    return ExtrinsicProbe(2, pair, z, step, np.array(alg.matrix_basis), res)


def _chart(probe):
    z0, basis = probe.point, probe.chart
    rho = probe.rho

    def f(x):
        m = len(basis)
        w = x[:m] + 1j * x[m:]
        return rho(z0 @ expm(np.tensordot(w, basis, axes=1)))

    return f


def _derivatives(f, n, h):
    """Gradient and Hessian of f: R^n -> R at 0 by central differences."""
    e = np.eye(n) * h
    f0 = f(np.zeros(n))
    grad = np.array([(f(e[i]) - f(-e[i])) / (2 * h) for i in range(n)])
    hess = np.zeros((n, n))
    for i in range(n):
        hess[i, i] = (f(e[i]) - 2 * f0 + f(-e[i])) / h**2
        for j in range(i + 1, n):
            v = (f(e[i] + e[j]) - f(e[i] - e[j]) - f(-e[i] + e[j]) + f(-e[i] - e[j])) / (4 * h * h)
            hess[i, j] = hess[j, i] = v
    return grad, hess


def complex_hessian(probe, step=None):
    """(∂ρ, ∂∂̄ρ) in chart coordinates, Richardson-extrapolated once."""
    h = probe.step if step is None else step
    m = len(probe.chart)
    f = _chart(probe)
    g1, h1 = _derivatives(f, 2 * m, h)
    g2, h2 = _derivatives(f, 2 * m, h / 2)
    grad = (4 * g2 - g1) / 3
    hess = (4 * h2 - h1) / 3
    gx, gy = grad[:m], grad[m:]
    dz = 0.5 * (gx - 1j * gy)
    hxx, hyy = hess[:m, :m], hess[m:, m:]
    hxy = hess[:m, m:]
    # ∂²/∂w_j ∂w̄_k = (f_xx + f_yy + i (f_x_j y_k − f_y_j x_k)) / 4
    levi = 0.25 * (hxx + hyy + 1j * (hxy - hxy.T))
    return dz, levi


def _restricted(probe, step):
    dz, levi = complex_hessian(probe, step)
    if np.max(np.abs(dz)) < 1e-8:
        raise SingularPoint("gradient of the defining function vanishes", invariant="d rho != 0",
                            module="verify", op="extrinsic_levi_inertia")
    k = null_space(dz[None, :])
    # ∂∂̄ρ(v, v̄) on the complex tangent ker ∂ρ
    h = k.T @ levi @ k.conj()
    return 0.5 * (h + h.conj().T)


def extrinsic_levi_inertia(probe, threshold=1e-4, check_steps=True):
    """Inertia of the complex Hessian of ρ on ker ∂ρ, stable under step halving."""
    h = _restricted(probe, probe.step)
    iner, ev = inertia(h, threshold)
    if check_steps:
        h2 = _restricted(probe, probe.step / 2)
        iner2, _ = inertia(h2, threshold)
        if iner2 != iner:
            raise UnstableOracle(f"inertia {iner} at step {probe.step:g} but {iner2} at half step",
                                 invariant="inertia stable under step halving", module="verify",
                                 op="extrinsic_levi_inertia")
    if np.min(np.abs(ev), initial=np.inf) <= threshold:
        raise UnstableOracle("eigenvalue below the oracle threshold", invariant="|eigenvalue| > threshold")
    return iner, ev


def adjoint_crosscheck(system, threshold=1e-7):
    """Residuals of ad(c_k) and τ_n rebuilt from the weight data, with a pass flag."""
    res = adjoint_reconstruction(system)
    worst = max(res.values(), default=0.0)
    return {"residuals": res, "max": worst, "passed": worst < threshold}


def random_regular_etas(system, n=20, seed=42, tol=DEFAULT_TOL, scale=1.0, max_tries=2000):
    """n random η whose base point is strongly regular and away from the critical locus."""
    from .cartan import BasePoint
    from .orbit import isotropy_gaps

    rng = np.random.default_rng(seed)
    out = []
    zero = system.zero_index
    for _ in range(max_tries):
        eta = rng.uniform(-scale, scale, system.datum.dim)
        gaps = isotropy_gaps(system, BasePoint(system.datum, eta))
        others = np.delete(gaps, zero)
        if others.size == 0 or np.min(others) > 1e-3:
            out.append(eta)
            if len(out) == n:
                break
    return out


def formula_equivalence(system, etas=None, trials=20, seed=42, tamper=None, tol=DEFAULT_TOL):
    """Max entrywise gap between the pairing formula and the block formulas.

    ``tamper`` (block -> matrix) lets a test corrupt the block path.
    Returns (max deviation, max cross-block entry).
    """
    from .cartan import BasePoint

    if etas is None:
        etas = random_regular_etas(system, trials, seed, tol)
    dev = cross = 0.0
    for eta in etas:
        base = BasePoint(system.datum, eta)
        prof = orbit_profile(system, base, tol)
        blocks = quadratic_blocks(system, base, prof, tol)
        if not blocks:
            continue
        tan, full = pairing_matrix(system, base, prof, tol)
        pos = {t: k for k, t in enumerate(tan)}
        mask = np.ones(full.shape[:2], bool)
        for b in blocks:
            ids = [pos[t] for t in b.index_set]
            m = b.matrix if tamper is None else tamper(b)
            dev = max(dev, float(np.max(np.abs(full[np.ix_(ids, ids)] - m), initial=0.0)))
            mask[np.ix_(ids, ids)] = False
        cross = max(cross, float(np.max(np.abs(full[mask]), initial=0.0)))
    return dev, cross
