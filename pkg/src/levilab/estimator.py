"""scikit-learn style wrapper: fit builds the weight system, transform maps η rows to Levi features."""
from __future__ import annotations

import warnings

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from .cartan import BasePoint
from .catalog import build_case, standard_cartan_menu
from .leviform import cone_verdict
from .orbit import orbit_profile
from .tolerances import DEFAULT_TOL
from .weights import extended_decomposition, levi_basis, positive_system

__all__ = ["LeviFormAnalyzer", "FEATURES"]

FEATURES = ("codim", "strongly_regular", "n_plus", "n_minus", "n_zero", "cone_full")


class LeviFormAnalyzer(TransformerMixin, BaseEstimator):
    """Levi data of closed orbits through rows of η.

    Parameters
    ----------
    case : str
        Catalog case name, e.g. ``"sl2:s11-theta:k=1"``.
    cartan : int
        Index into the standard Cartan menu of the case.
    seed : int
        Seed of the Cartan refinement and the positive system.

    The training data is ignored; ``fit`` only builds the weight system.
    ``transform`` returns one row of ``FEATURES`` per η, with NaN in the
    Levi columns at points that are not strongly regular.
    """

    def __init__(self, case="sl2:s11-theta:k=1", cartan=0, seed=42):
        self.case = case
        self.cartan = cartan
        self.seed = seed

    def fit(self, X=None, y=None):
        setup = build_case(self.case)
        menu = standard_cartan_menu(setup, self.seed)
        datum = menu[self.cartan]
        system = extended_decomposition(setup, datum)
        self.system_ = levi_basis(positive_system(system, seed=self.seed))
        self.n_features_in_ = datum.dim
        return self

    def transform(self, X):
        check_is_fitted(self, "system_")
        X = np.atleast_2d(np.asarray(X, dtype=float))
        if X.shape[1] != self.n_features_in_:
            raise ValueError(f"X has {X.shape[1]} columns, expected dim c = {self.n_features_in_}")
        out = np.full((len(X), len(FEATURES)), np.nan)
        for r, eta in enumerate(X):
            base = BasePoint(self.system_.datum, eta)
            with warnings.catch_warnings():
                warnings.simplefilter("ignore")
                prof = orbit_profile(self.system_, base, DEFAULT_TOL)
                out[r, 0] = prof.codim
                out[r, 1] = prof.strongly_regular
                if not prof.strongly_regular:
                    continue
                rep = cone_verdict(self.system_, base, DEFAULT_TOL, prof)
            if rep.inertia is not None:
                out[r, 2:5] = rep.inertia
            out[r, 5] = rep.cone_full
        return out

    def get_feature_names_out(self, input_features=None):
        return np.array(FEATURES, dtype=object)
