import numpy as np
import pytest

from levilab.catalog import case_names, standard_cartan_menu
from levilab.errors import InvalidArgument, NonRegularElement
from levilab.liecore import sl_coords
from levilab.tolerances import DEFAULT_TOL
from levilab.weights import (adjoint_reconstruction, coroot, extended_decomposition, is_irreducible, identity_residuals,
                             levi_basis, levi_residual, multiples_present, normalization_residual, positive_system,
                             rephase, sl2_triple, tau_n)

from conftest import CORPUS, S11_S11, S11_THETA, SL3, THETA_S11, THETA_THETA, all_systems, menu_of, setup_of, system_of

J = np.diag([1.0, -1.0])
# matrix realizations of the sl2 involutions
MATRIX_INV = {
    "theta": lambda x: -x.conj().T,
    "s11": lambda x: -J @ x.conj().T @ J,
}


def _table(system):
    """Sorted (λ̂, a) pairs, rounded."""
    rows = []
    for w in system.weights:
        rows.append(tuple(np.round(system.lam_hat(w.index), 6)) + (round(w.a.real, 6), round(w.a.imag, 6), w.dim))
    return sorted(rows)


@pytest.mark.parametrize("pair", ["s11-theta", "theta-s11", "theta-theta", "s11-s11"])
def test_tau_matches_matrix_oracle(pair):
    # with ν = 0, τ_n = σ1 σ2 and both act on 2x2 matrices
    name = f"sl2:{pair}:k=1"
    setup = setup_of(name)
    for datum in menu_of(name):
        if np.max(np.abs(datum.nu), initial=0.0) > 0:
            continue
        s1, s2 = (MATRIX_INV[p] for p in pair.split("-"))
        alg = setup.algebra
        tau = tau_n(setup, datum)
        for k in range(3):
            m = alg.to_matrix(np.eye(3)[k])
            np.testing.assert_allclose(tau[:, k], sl_coords(alg, s1(s2(m))), atol=1e-12)


def test_weight_tables_sl2():
    # spectral radius of ad is 2 on the canonical Cartan basis
    assert _table(system_of(S11_THETA)) == [(-2.0, -1.0, 0.0, 1), (0.0, 1.0, 0.0, 1), (2.0, -1.0, 0.0, 1)]
    assert _table(system_of(THETA_S11)) == _table(system_of(S11_THETA))
    assert _table(system_of(THETA_THETA)) == [(-2.0, 1.0, 0.0, 1), (0.0, 1.0, 0.0, 1), (2.0, 1.0, 0.0, 1)]
    for idx in range(2):
        assert _table(system_of(S11_S11, idx)) == [(-2.0, 1.0, 0.0, 1), (0.0, 1.0, 0.0, 1), (2.0, 1.0, 0.0, 1)]
    assert [w.reality for w in system_of(S11_S11, 0).weights] == ["zero", "real", "real"]
    assert [w.reality for w in system_of(S11_S11, 1).weights] == ["zero", "imaginary", "imaginary"]


def test_weight_tables_sl3_and_products():
    assert _table(system_of(SL3)) == [
        (-2.0, -1.0, 0.0, 1), (-1.0, -1.0, 0.0, 1), (-1.0, 1.0, 0.0, 1), (0.0, -1.0, 0.0, 1),
        (0.0, 1.0, 0.0, 1), (1.0, -1.0, 0.0, 1), (1.0, 1.0, 0.0, 1), (2.0, -1.0, 0.0, 1)]
    tab = _table(system_of("sl2:s11-theta:k=2"))
    assert sorted(r[1:3] for r in tab if r[0] != 0) == [(0.0, -1.0)] * 2 + [(0.0, 1.0)] * 2
    tab = _table(system_of("sl2:s11-s11:k=2"))
    assert sorted(r[1] for r in tab) == [-1.0, -1.0, -1.0, 1.0, 1.0, 1.0]


@pytest.mark.parametrize("name,idx", all_systems())
def test_completeness_and_reconstruction(name, idx):
    s = system_of(name, idx)
    d = s.algebra.dim_complex
    assert sum(w.dim for w in s.weights) == d
    vecs = np.vstack([w.vectors for w in s.weights])
    assert np.linalg.matrix_rank(vecs, tol=1e-8) == d
    assert max(adjoint_reconstruction(s).values()) < 1e-7


@pytest.mark.parametrize("name,idx", all_systems())
def test_identity_residuals(name, idx):
    res = identity_residuals(system_of(name, idx))
    for key, val in res.items():
        assert val < 1e-9, key


@pytest.mark.parametrize("name,idx", all_systems())
def test_tau_unitary_and_weights_unimodular(name, idx):
    s = system_of(name, idx)
    p = s.setup.gram
    # τ_n preserves the Hermitian inner product
    np.testing.assert_allclose(s.tau.conj().T @ p @ s.tau, p, atol=1e-9)
    for w in s.weights:
        assert abs(abs(w.a) - 1) < 1e-9


@pytest.mark.parametrize("name,idx", all_systems())
def test_no_multiples(name, idx):
    assert multiples_present(system_of(name, idx)) == []


@pytest.mark.parametrize("name", CORPUS)
def test_reality_stable_under_tolerance_halving(name):
    setup = setup_of(name)
    for datum in menu_of(name):
        a = extended_decomposition(setup, datum)
        tol = DEFAULT_TOL.override(cluster=DEFAULT_TOL.cluster / 2, reality=DEFAULT_TOL.reality / 2)
        b = extended_decomposition(setup, datum, tol)
        assert [w.reality for w in a.weights] == [w.reality for w in b.weights]
        assert len(a) == len(b)


@pytest.mark.parametrize("name,idx", all_systems())
def test_positive_system_partitions(name, idx):
    s = system_of(name, idx)
    pos = s.positive
    for i in s.nonzero:
        p = s.theta_partner[i]
        # λ and −λ are on opposite sides
        assert (i in pos) != (p in pos)
    assert pos <= set(s.nonzero)


def test_positive_system_explicit_regular():
    s = extended_decomposition(setup_of(S11_THETA), menu_of(S11_THETA)[0])
    a = positive_system(s, regular=[1.0])
    b = positive_system(s, regular=[-1.0])
    assert a.positive.isdisjoint(b.positive)
    assert a.positive | b.positive == set(s.nonzero)
    with pytest.raises(NonRegularElement):
        positive_system(s, regular=[0.0])
    with pytest.raises(InvalidArgument):
        positive_system(s, regular=[1.0, 2.0])


@pytest.mark.parametrize("name,idx", all_systems())
def test_levi_basis(name, idx):
    s = system_of(name, idx)
    assert s.levi
    assert levi_residual(s) < 1e-10
    assert normalization_residual(s) < 1e-10
    assert set(s.signs.values()) <= {-1, 1}
    # reapplying keeps the conditions and the intrinsic signs; vectors may change by allowed phases
    again = levi_basis(s)
    assert again.signs == s.signs
    assert levi_residual(again) < 1e-10
    for w, v in zip(s.weights, again.weights):
        if not w.is_zero:
            assert abs(abs(np.vdot(w.xi, v.xi)) - np.vdot(w.xi, w.xi).real) < 1e-8 * np.vdot(w.xi, w.xi).real


def test_rephase_keeps_levi_conditions(rng):
    for name, idx in all_systems(CORPUS):
        s = system_of(name, idx)
        r = rephase(s, {i: rng.uniform(0, 2 * np.pi) for i in s.positive})
        assert levi_residual(r) < 1e-10
        assert normalization_residual(r) < 1e-10


def test_rephase_requires_levi():
    s = extended_decomposition(setup_of(S11_THETA), menu_of(S11_THETA)[0])
    with pytest.raises(InvalidArgument):
        rephase(s, {})


def test_irreducibility():
    for name in CORPUS:
        assert is_irreducible(system_of(name))
    assert not is_irreducible(system_of("sl2:s11-s11:k=2:untwisted"))
    assert not is_irreducible(system_of("sl2:theta-theta:k=2:untwisted"))


def test_coroot_oracle():
    # t is diagonal here, so the coroot is a multiple of H
    s = system_of(S11_THETA)
    alg = s.algebra
    i = sorted(s.positive)[0]
    eta = coroot(s, i)
    # B(η_λ, c) = λ(c) for every c
    for k, c in enumerate(s.datum.c_basis):
        assert alg.B(eta, c) == pytest.approx(s.weights[i].lam[k], abs=1e-12)
    m = alg.to_matrix(eta)
    assert abs(m[0, 1]) + abs(m[1, 0]) < 1e-12
    # λ(η_λ) = |λ|² = 4 / 8 for B(H, H) = 8
    assert s.evaluate(i, eta).real == pytest.approx(0.5)
    h, e, f = sl2_triple(s, i)
    np.testing.assert_allclose(alg.bracket(e, f), h, atol=1e-12)


@pytest.mark.parametrize("name", case_names())
def test_weights_independent_of_seed(name):
    s0 = system_of(name)
    for seed in (1, 7, 123):
        setup = setup_of(name)
        d = standard_cartan_menu(setup, seed=seed)[0]
        s = extended_decomposition(setup, d)
        assert _table(s) == _table(s0)
