"""Isotropy set Λ̃(z), codimension and complex tangent space of closed orbits."""
from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np
from scipy.linalg import subspace_angles

from .cartan import ad_exp
from .errors import InvalidArgument
from .liecore import null_space
from .tolerances import DEFAULT_TOL

__all__ = ["OrbitProfile", "NearCriticalWarning", "lambda_tilde", "orbit_profile", "tau_z", "isotropy_gaps"]


class NearCriticalWarning(UserWarning):
    """The base point is close to the locus where Λ̃(z) jumps."""


@dataclass(frozen=True, eq=False)
class OrbitProfile:
    base: object
    lambda_tilde_z: tuple
    codim: int
    strongly_regular: bool
    complex_tangent_indices: tuple
    complex_tangent_dim: int
    min_gap: float
    near_critical: bool
    fixed_space_angle: float

    def to_dict(self):
        return {
            "lambda_tilde_z": list(self.lambda_tilde_z),
            "codim": self.codim,
            "strongly_regular": self.strongly_regular,
            "complex_tangent_indices": list(self.complex_tangent_indices),
            "complex_tangent_dim": self.complex_tangent_dim,
            "min_gap": self.min_gap,
            "near_critical": self.near_critical,
            "fixed_space_angle": self.fixed_space_angle,
        }


def _check_base(system, base):
    if base.datum is not system.datum:
        if base.datum.dim != system.datum.dim or not np.allclose(base.datum.c_basis, system.datum.c_basis):
            raise InvalidArgument("base point lies on a different Cartan datum", invariant="base on datum")


def isotropy_gaps(system, base):
    """|a e^{-2iλ(η)} − 1| per extended weight."""
    _check_base(system, base)
    out = []
    for w in system.weights:
        lam_eta = complex(w.lam @ base.eta)
        out.append(abs(w.a * np.exp(-2j * lam_eta) - 1.0))
    return np.array(out)


def lambda_tilde(system, base, tol=DEFAULT_TOL):
    """Indices of extended weights with a e^{-2iλ(η)} = 1."""
    gaps = isotropy_gaps(system, base)
    return tuple(int(i) for i in np.flatnonzero(gaps < tol.membership))


def tau_z(system, base):
    """τ_z = exp(−i ad η) τ_n exp(−i ad η)."""
    e = ad_exp(system.algebra, base.vector, -1j)
    return e @ system.tau @ e


def orbit_profile(system, base, tol=DEFAULT_TOL):
    _check_base(system, base)
    gaps = isotropy_gaps(system, base)
    lt = tuple(int(i) for i in np.flatnonzero(gaps < tol.membership))
    zero = system.zero_index
    if zero not in lt:
        raise InvalidArgument("(0, 1) not in Λ̃(z)", invariant="(0,1) ∈ Λ̃(z)")
    comp = tuple(w.index for w in system.weights if w.index not in lt)
    outside = gaps[list(comp)] if comp else np.array([np.inf])
    min_gap = float(np.min(outside))
    near = bool(min_gap < tol.near_critical)
    if near:
        warnings.warn(f"base point within {min_gap:.2e} of the isotropy jump locus", NearCriticalWarning,
                      stacklevel=2)

    # Fix(τ_z) must be spanned by the Λ̃(z) spaces
    tz = tau_z(system, base)
    fix = null_space(tz - np.eye(tz.shape[0]), 1e-7)
    span = np.hstack([system.weights[i].vectors.T for i in lt])
    if fix.shape[1] != span.shape[1]:
        angle = float("inf")
    else:
        angle = float(np.max(subspace_angles(fix, span), initial=0.0))

    codim = system.datum.dim + len(lt) - 1
    return OrbitProfile(
        base=base,
        lambda_tilde_z=lt,
        codim=codim,
        strongly_regular=lt == (zero,),
        complex_tangent_indices=comp,
        complex_tangent_dim=int(sum(system.weights[i].dim for i in comp)),
        min_gap=min_gap,
        near_critical=near,
        fixed_space_angle=angle,
    )
