import warnings

import numpy as np
import pytest

from levilab.domains import (classify_weight_compactness, cmax_membership, domain_report, good_ordering,
                             hermitian_type, q_completeness_count, rank1_signature)
from levilab.errors import UnsupportedCase
from levilab.leviform import levi_matrix
from levilab.liecore import build_sl, make_setup, sl_conjugation, sl_theta, sl_unitary
from levilab.weights import positive_system

from conftest import CORPUS, S11_S11, S11_THETA, SL3, THETA_THETA, all_systems, base, system_of


def _rank1(name, idx, eta=0.3):
    s = system_of(name, idx)
    return rank1_signature(levi_matrix(s, base(s, eta)), s)


def test_hermitian_type_examples():
    assert hermitian_type(system_of(S11_S11).setup) is True       # su(1,1): k = u(1)
    assert hermitian_type(system_of(THETA_THETA).setup) is False  # su(2): k = g, no center
    assert hermitian_type(system_of(SL3).setup) is None            # sigma1 != sigma2
    alg = build_sl(3)
    su21 = sl_unitary(alg, [1, 1, -1])
    assert hermitian_type(make_setup(alg, sl_theta(alg), su21, su21)) is True
    conj = sl_conjugation(alg)
    assert hermitian_type(make_setup(alg, sl_theta(alg), conj, conj)) is False  # sl(3, R): k = so(3)


def test_weight_compactness():
    s = system_of(S11_S11, 1)
    assert {classify_weight_compactness(s, i) for i in s.nonzero} == {"noncompact"}
    s = system_of(THETA_THETA)
    assert {classify_weight_compactness(s, i) for i in s.nonzero} == {"compact"}
    with pytest.raises(UnsupportedCase):
        classify_weight_compactness(system_of(S11_S11, 0), 1)
    s = system_of(S11_THETA)
    with pytest.raises(UnsupportedCase, match="a ="):
        classify_weight_compactness(s, s.nonzero[0])


def test_cmax_su11():
    s = system_of(S11_S11, 1)
    assert cmax_membership(s, [0.3]) == (True, True, True)
    assert cmax_membership(s, [0.0]) == (True, True, False)
    assert cmax_membership(s, [-0.3]) == (True, False, False)


def test_cmax_compact_group_is_everything():
    s = system_of(THETA_THETA)
    for eta in (-1.0, 0.0, 0.4):
        assert cmax_membership(s, [eta])[:2] == (True, True)


def test_cmax_is_a_cone(rng):
    s = system_of("sl2:s11-s11:k=2", 1)
    for _ in range(10):
        x, y = rng.uniform(-1, 1, 1), rng.uniform(-1, 1, 1)
        if cmax_membership(s, x)[1] and cmax_membership(s, y)[1]:
            assert cmax_membership(s, x + 2.5 * y)[1]


def test_cmax_needs_compact_cartan():
    with pytest.raises(UnsupportedCase):
        cmax_membership(system_of(S11_S11, 0), [0.3])


@pytest.mark.parametrize("name,idx", [(n, i) for n, i in all_systems(CORPUS) if system_of(n, i).datum.is_compact])
def test_good_ordering_exists(name, idx):
    s, found, flags = good_ordering(system_of(name, idx))
    assert found and s.good_ordering
    hats = {i: s.lam_hat(i) @ s.regular for i in s.positive}
    nc = [v for i, v in hats.items() if flags[i] == "noncompact"]
    c = [v for i, v in hats.items() if flags[i] == "compact"]
    if nc and c:
        assert min(nc) > max(c)


def test_rank1_signature_table():
    # (n+, n-, q) measured and the counting formula
    expected = {
        (S11_S11, 0): (1, 1, 1), (S11_S11, 1): (2, 0, 0), (S11_THETA, 0): (1, 1, 1),
        (THETA_THETA, 0): (2, 0, 0), (SL3, 0): (3, 3, 3), (SL3, 1): (4, 2, 2),
        ("sl2:s11-s11:k=2", 0): (2, 2, 2), ("sl2:s11-s11:k=2", 1): (3, 1, 1),
        ("sl2:s11-theta:k=2", 0): (2, 2, 2),
    }
    for (name, idx), (npos, nneg, q) in expected.items():
        r = _rank1(name, idx)
        assert (r["n_plus"], r["n_minus"], r["q"]) == (npos, nneg, q), (name, idx)
        assert r["q_formula_positive"] == q


def test_rank1_literal_formula_overcounts_non_pm1():
    # weights with a = ±i: the literal count over all of them gives 4, the measured q is 2
    r = _rank1("sl2:s11-theta:k=2", 0)
    assert (r["q"], r["q_formula"], r["q_formula_positive"], r["agrees"]) == (2, 4, 2, False)


def test_rank1_orientation_makes_imag_a1_positive():
    r = _rank1(S11_S11, 1, -0.3)
    assert r["orientation"] == -1
    assert (r["n_plus"], r["n_minus"]) == (2, 0)


def test_rank1_requires_dim_one():
    s = system_of("sl2:s11-s11:k=2:untwisted", 0)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        rep = levi_matrix(s, base(s, [0.3, 0.7]))
    with pytest.raises(UnsupportedCase):
        rank1_signature(rep, s)


def test_q_completeness_counts():
    expected = {(S11_S11, 1): (2, 3), (S11_THETA, 0): (2, 2), (THETA_THETA, 0): (2, 3), (SL3, 1): (4, 5),
                ("sl2:s11-s11:k=2", 1): (3, 4), ("sl2:s11-theta:k=2", 0): (5, 5)}
    for (name, idx), (q, qp) in expected.items():
        assert q_completeness_count(system_of(name, idx)) == (q, qp, q != qp), (name, idx)


@pytest.mark.parametrize("seed", [0, 1, 2, 3, 17])
def test_q_counts_seed_invariant(seed):
    for name, idx in [(S11_S11, 1), (SL3, 1), ("sl2:s11-s11:k=2", 1)]:
        s = system_of(name, idx)
        assert q_completeness_count(s, seed=seed) == q_completeness_count(s)


def test_domain_report_fields():
    s = system_of(S11_S11, 1)
    b = base(s, 0.3)
    d = domain_report(s, b, levi_matrix(s, b))
    assert d.cmax_defined and d.eta_in_cmax and d.eta_in_cmax_interior
    assert d.q_discrepancy and any("variant count" in n for n in d.notes)
    assert d.rank1["q"] == 0 and d.hermitian_type is True
    d = domain_report(system_of(S11_S11, 0), base(system_of(S11_S11, 0), 0.3))
    assert not d.cmax_defined and d.rank1 is None
    np.testing.assert_equal(d.compactness_flags, {})


@pytest.mark.parametrize("name,idx", [(THETA_THETA, 0), (S11_S11, 1), (SL3, 1)])
def test_cmax_invariant_under_relabeling(name, idx):
    # flipping λ -> −λ in the input positive system does not move C_max
    s = system_of(name, idx)
    flipped = positive_system(s, regular=-s.regular)
    for eta in (-0.4, 0.0, 0.3):
        assert cmax_membership(flipped, [eta]) == cmax_membership(s, [eta])
