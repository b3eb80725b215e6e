import numpy as np
import pytest

from levilab.catalog import CaseSpec, build_case, case_names, parse_case, power_algebra
from levilab.errors import InvalidArgument
from levilab.liecore import build_sl

from conftest import S11_S11, S11_THETA, SL3, THETA_S11, THETA_THETA, menu_of, setup_of


def test_case_names_round_trip():
    for name in case_names():
        assert parse_case(name).name == name


@pytest.mark.parametrize("bad", ["sl2", "sl2:s11-theta", "sl2:s11-theta:k=x", "sl4:sl3:k=1", "sl2:sl3:k=1",
                                 "sl2:s11-theta:k=0", "sl2:s11-theta:k=1:twisted"])
def test_bad_names(bad):
    with pytest.raises(InvalidArgument):
        build_case(bad)


def test_real_form_dimensions():
    # dims of (g1, k1, p1) and (g2, k2, p2)
    expected = {
        S11_S11: (3, 1, 2, 3, 1, 2),
        S11_THETA: (3, 1, 2, 3, 3, 0),
        THETA_S11: (3, 3, 0, 3, 1, 2),
        THETA_THETA: (3, 3, 0, 3, 3, 0),
        SL3: (8, 3, 5, 8, 4, 4),
    }
    for name, dims in expected.items():
        s = setup_of(name)
        assert tuple(len(getattr(s, k)) for k in ("g1", "k1", "p1", "g2", "k2", "p2")) == dims, name


@pytest.mark.parametrize("k", [2, 3])
def test_twisted_products_have_diagonal_intersection(k):
    # g1 ∩ g2 is a single diagonal copy: its dimension is that of the base real form intersection
    s = build_case(f"sl2:s11-s11:k={k}")
    kk, pp = s.intersection_parts()
    assert len(kk) + len(pp) == 3
    assert s.dim == 3 * k


def test_untwisted_products_split():
    s = setup_of("sl2:s11-s11:k=2:untwisted")
    kk, pp = s.intersection_parts()
    assert len(kk) + len(pp) == 6


def test_rank_one_cases():
    for name in (S11_S11, S11_THETA, THETA_S11, THETA_THETA, SL3, "sl2:s11-s11:k=2", "sl2:s11-theta:k=2"):
        assert {d.dim for d in menu_of(name)} == {1}, name


def test_menu_sizes():
    assert [d.label for d in menu_of(S11_S11)] == ["fundamental", "compact"]
    assert [d.label for d in menu_of(S11_THETA)] == ["fundamental"]
    assert len(menu_of(SL3)) >= 1
    assert menu_of(S11_S11)[1].is_compact and not menu_of(S11_S11)[0].is_compact


def test_power_algebra_labels():
    alg = power_algebra(build_sl(2), 3)
    assert alg.dim_complex == 9
    assert alg.basis_labels[0].startswith("1.") and alg.basis_labels[-1].startswith("3.")
    assert power_algebra(build_sl(2), 1).dim_complex == 3


def test_spec_validation():
    with pytest.raises(InvalidArgument):
        CaseSpec("sl2", "s11-theta", -1)
    with pytest.raises(InvalidArgument):
        CaseSpec("so3", "s11-theta", 1)


def test_build_is_deterministic():
    a, b = build_case("sl2:s11-theta:k=2"), build_case("sl2:s11-theta:k=2")
    assert np.array_equal(a.sigma1.matrix, b.sigma1.matrix)
    assert np.array_equal(a.g1, b.g1)
