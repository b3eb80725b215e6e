import warnings

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from levilab.cartan import BasePoint
from levilab.errors import InvalidArgument
from levilab.orbit import NearCriticalWarning, isotropy_gaps, lambda_tilde, orbit_profile, tau_z

from conftest import CORPUS, S11_S11, S11_THETA, SL3, THETA_THETA, all_systems, base, menu_of, system_of


def test_generic_codim_one():
    for name in CORPUS:
        for idx in range(len(menu_of(name))):
            s = system_of(name, idx)
            p = orbit_profile(s, base(s, 0.3))
            assert p.strongly_regular and p.codim == s.datum.dim
            assert p.complex_tangent_dim == s.algebra.dim_complex - sum(s[i].dim for i in p.lambda_tilde_z)


def test_critical_points_real_weight():
    # real λ with λ(η) = 2s: e^{-4is} = 1 at s ∈ (π/2) Z
    s = system_of(S11_S11, 0)
    for eta in (0.0, np.pi / 2, -np.pi / 2):
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", NearCriticalWarning)
            p = orbit_profile(s, base(s, eta))
        assert not p.strongly_regular
        assert len(p.lambda_tilde_z) == 3 and p.codim == 3
        assert p.complex_tangent_dim == 0


def test_critical_points_compact():
    # imaginary λ with a = 1: only η = 0 is critical
    s = system_of(S11_S11, 1)
    assert orbit_profile(s, base(s, 0.0)).codim == 3
    assert orbit_profile(s, base(s, np.pi / 2)).codim == 1
    # a = −1 never enters Λ̃(z) on an imaginary weight
    s = system_of(S11_THETA)
    for eta in np.linspace(-2, 2, 41):
        assert orbit_profile(s, base(s, eta)).codim == 1


def test_sl3_critical_line():
    s = system_of(SL3, 0)
    # λ̂ = 1 with a = 1 is hit at η = π, λ̂ = 2 with a = −1 at η = π/4
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", NearCriticalWarning)
        p = orbit_profile(s, base(s, np.pi / 4))
    assert sorted(s[i].a.real for i in p.lambda_tilde_z if not s[i].is_zero) == [-1.0, -1.0]
    assert p.codim == 3


def test_near_critical_warning():
    s = system_of(S11_S11, 0)
    with pytest.warns(NearCriticalWarning):
        p = orbit_profile(s, base(s, np.pi / 2 + 1e-7))
    assert p.near_critical and p.strongly_regular


def test_fixed_space_matches_isotropy():
    for name, idx in all_systems(CORPUS):
        s = system_of(name, idx)
        for eta in (0.3, 0.0, -0.7):
            with warnings.catch_warnings():
                warnings.simplefilter("ignore", NearCriticalWarning)
                p = orbit_profile(s, base(s, eta))
            assert p.fixed_space_angle < 1e-6, (name, idx, eta)


@settings(max_examples=40, deadline=None)
@given(st.sampled_from(all_systems(CORPUS)), st.floats(-3, 3, allow_nan=False))
def test_lambda_tilde_closed_under_addition(case, eta):
    s = system_of(*case)
    b = base(s, eta)
    lt = set(lambda_tilde(s, b))
    assert s.zero_index in lt
    for i in lt:
        # closed under θ: (−λ, a⁻¹)
        assert s.theta_partner[i] in lt
        for j in lt:
            k = s.find(s[i].lam + s[j].lam, s[i].a * s[j].a)
            if k is not None:
                assert k in lt


@settings(max_examples=30, deadline=None)
@given(st.sampled_from(all_systems(CORPUS)), st.floats(-3, 3, allow_nan=False))
def test_tau_z_eigenvalues(case, eta):
    # τ_z acts on the (λ, a) space by a e^{-2iλ(η)}
    s = system_of(*case)
    b = base(s, eta)
    tz = tau_z(s, b)
    for w in s.weights:
        val = w.a * np.exp(-2j * complex(w.lam @ b.eta))
        for x in w.vectors:
            np.testing.assert_allclose(tz @ x, val * x, atol=1e-9 * max(1, abs(val)))


def test_gaps_formula():
    s = system_of(S11_S11, 1)
    g = isotropy_gaps(s, base(s, 0.3))
    assert sorted(np.round(g, 9)) == sorted(np.round([0.0, np.exp(1.2) - 1, 1 - np.exp(-1.2)], 9))


def test_base_on_other_datum_rejected():
    s = system_of(S11_S11, 1)
    other = menu_of(S11_S11)[0]
    with pytest.raises(InvalidArgument):
        orbit_profile(s, BasePoint(other, [0.3]))


def test_profile_serializes():
    s = system_of(THETA_THETA)
    d = orbit_profile(s, base(s, 0.3)).to_dict()
    assert d["codim"] == 1 and d["strongly_regular"] is True
