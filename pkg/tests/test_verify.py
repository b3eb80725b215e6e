import numpy as np
import pytest

from levilab.errors import InvalidArgument, ValidationError
from levilab.leviform import levi_matrix
from levilab.verify import (DEFINING_FUNCTIONS, adjoint_crosscheck, extrinsic_levi_inertia, formula_equivalence,
                            invariance_residual, make_probe, random_regular_etas)
from levilab.weights import ExtendedWeight

from conftest import CORPUS, S11_S11, S11_THETA, SL3, THETA_S11, THETA_THETA, all_systems, base, system_of

SL2_K1 = [(THETA_S11, 0), (S11_THETA, 0), (S11_S11, 0), (S11_S11, 1), (THETA_THETA, 0)]


def _unordered(iner):
    return tuple(sorted(iner[:2])) + (iner[2],)


@pytest.mark.parametrize("name,idx", SL2_K1)
@pytest.mark.parametrize("eta", [0.3, 0.7, -0.3])
def test_extrinsic_matches_intrinsic(name, idx, eta):
    s = system_of(name, idx)
    b = base(s, eta)
    probe = make_probe(s.setup, s, b)
    assert probe.invariance < 1e-9
    iner, ev = extrinsic_levi_inertia(probe)
    assert np.min(np.abs(ev)) > 1e-4
    assert _unordered(iner) == _unordered(levi_matrix(s, b).inertia)


def test_extrinsic_frozen_eigenvalues():
    s = system_of(THETA_S11)
    probe = make_probe(s.setup, s, base(s, 0.3))
    for step in (1e-3, 1e-4, 1e-5):
        _, ev = extrinsic_levi_inertia(type(probe)(**{**probe.__dict__, "step": step}))
        np.testing.assert_allclose(ev, [-0.54881167, 1.82211881], atol=1e-4)


def test_defining_functions_invariant():
    for pair, rho in DEFINING_FUNCTIONS.items():
        s = system_of(f"sl2:{pair}:k=1")
        z = np.array([[1.2, 0.3j], [0.1, 0.9]])
        z = z / np.sqrt(np.linalg.det(z))
        assert invariance_residual(s.setup, rho, z) < 1e-9, pair


def test_wrong_defining_function_rejected():
    # tr(z* z) is not SU(1,1)-invariant
    s = system_of(S11_S11, 0)
    z = np.array([[1.2, 0.3j], [0.1, 0.9]])
    assert invariance_residual(s.setup, DEFINING_FUNCTIONS["theta-theta"], z) > 1e-3


def test_probe_needs_sl2():
    s = system_of(SL3)
    with pytest.raises(InvalidArgument):
        make_probe(s.setup, s, base(s, 0.3))


@pytest.mark.parametrize("name,idx", all_systems(CORPUS))
def test_adjoint_crosscheck_passes(name, idx):
    out = adjoint_crosscheck(system_of(name, idx))
    assert out["passed"] and out["max"] < 1e-7


def test_adjoint_crosscheck_detects_perturbed_weight():
    s = system_of(SL3, 1)
    i = s.nonzero[0]
    w = s.weights[i]
    bad = ExtendedWeight(w.index, w.lam + 1e-3, w.a, w.vectors, w.reality, w.coroot)
    tampered = type(s)(**{**s.__dict__, "weights": s.weights[:i] + (bad,) + s.weights[i + 1:]})
    out = adjoint_crosscheck(tampered)
    assert not out["passed"] and out["max"] >= 1e-4


@pytest.mark.parametrize("name,idx", all_systems(CORPUS))
def test_formula_equivalence(name, idx):
    dev, cross = formula_equivalence(system_of(name, idx), trials=20)
    assert dev < 1e-9 and cross < 1e-9


def test_formula_equivalence_detects_tampering():
    s = system_of(S11_S11, 1)

    def tamper(block):
        m = block.matrix.copy()
        m[0, 0] *= 1.05
        return m

    dev, _ = formula_equivalence(s, trials=5, tamper=tamper)
    assert dev > 1e-2


def test_random_regular_etas():
    s = system_of(S11_S11, 0)
    etas = random_regular_etas(s, n=20, seed=3)
    assert len(etas) == 20
    for e in etas:
        assert levi_matrix(s, base(s, e)).profile.strongly_regular
    assert np.array_equal(np.array(etas), np.array(random_regular_etas(s, n=20, seed=3)))


def test_make_probe_rejects_noninvariant(monkeypatch):
    s = system_of(THETA_S11)
    monkeypatch.setitem(DEFINING_FUNCTIONS, "theta-s11", DEFINING_FUNCTIONS["theta-theta"])
    with pytest.raises(ValidationError):
        make_probe(s.setup, s, base(s, 0.3))
