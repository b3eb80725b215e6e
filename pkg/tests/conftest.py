import sys
from functools import lru_cache

import numpy as np
import pytest

from levilab.cartan import BasePoint
from levilab.catalog import build_case, case_names, standard_cartan_menu
from levilab.weights import extended_decomposition, levi_basis, positive_system

# case names used across the suite
THETA_S11 = "sl2:theta-s11:k=1"      # G1 = SU(2), G2 = SU(1,1)
S11_THETA = "sl2:s11-theta:k=1"
S11_S11 = "sl2:s11-s11:k=1"          # G1 = G2 = SU(1,1)
THETA_THETA = "sl2:theta-theta:k=1"
SL3 = "sl3:sl3:k=1"

# the acceptance corpus: three sl2 pairs, sl3, two k = 2 products
CORPUS = [S11_S11, S11_THETA, THETA_THETA, SL3, "sl2:s11-s11:k=2", "sl2:s11-theta:k=2"]


@lru_cache(maxsize=None)
def setup_of(name):
    return build_case(name)


@lru_cache(maxsize=None)
def menu_of(name):
    return tuple(standard_cartan_menu(setup_of(name)))


@lru_cache(maxsize=None)
def system_of(name, idx=0):
    """Weight system with positive system and Levi basis installed."""
    setup = setup_of(name)
    datum = menu_of(name)[idx]
    return levi_basis(positive_system(extended_decomposition(setup, datum)))


def all_systems(names=None):
    out = []
    for name in names or case_names():
        for idx in range(len(menu_of(name))):
            out.append((name, idx))
    return out


def base(system, eta):
    return BasePoint(system.datum, np.atleast_1d(np.asarray(eta, float)))


@pytest.fixture(scope="session")
def rng():
    return np.random.default_rng(20240611)


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for line in sorted(mod.RESULTS):
        terminalreporter.write_line(line)
