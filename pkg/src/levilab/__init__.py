"""Weight decompositions, intrinsic Levi forms and Levi cones of closed (G1 x G2)-orbits."""

__version__ = "0.1.0"

from .cartan import BasePoint, CartanDatum, fundamental_cartan, make_datum, max_abelian_subspace
from .catalog import CaseSpec, build_case, case_names, standard_cartan_menu
from .domains import (classify_weight_compactness, cmax_membership, domain_report, hermitian_type,
                      q_completeness_count, rank1_signature)
from .errors import LevilabError
from .leviform import cone_generators, cone_verdict, levi_matrix, levi_pairing, quadratic_blocks
from .liecore import (Involution, LieAlgebra, RealFormSetup, bracket, build_sl, cartan_decompose, direct_sum,
                      fixed_subspace, hermitian_inner, make_setup)
from .orbit import lambda_tilde, orbit_profile
from .tolerances import DEFAULT_TOL, Tolerances
from .weights import (coroot, extended_decomposition, is_irreducible, levi_basis, positive_system, sl2_triple,
                      tau_n)

__all__ = [
    "BasePoint", "CartanDatum", "CaseSpec", "DEFAULT_TOL", "Involution", "LevilabError", "LieAlgebra",
    "RealFormSetup", "Tolerances", "bracket", "build_case", "build_sl", "cartan_decompose", "case_names",
    "classify_weight_compactness", "cmax_membership", "cone_generators", "cone_verdict", "coroot",
    "direct_sum", "domain_report", "extended_decomposition", "fixed_subspace", "fundamental_cartan",
    "hermitian_inner", "hermitian_type", "is_irreducible", "lambda_tilde", "levi_basis", "levi_matrix",
    "levi_pairing", "make_datum", "make_setup", "max_abelian_subspace", "orbit_profile", "positive_system",
    "q_completeness_count", "quadratic_blocks", "rank1_signature", "sl2_triple", "standard_cartan_menu",
    "tau_n",
]
