from dataclasses import dataclass, fields, replace

from .errors import InvalidArgument


@dataclass(frozen=True)
class Tolerances:
    """Numerical thresholds shared by the whole pipeline."""

    # singular values below rank * largest are treated as zero
    rank: float = 1e-8
    # absolute eigenvalue clustering in the joint diagonalization
    cluster: float = 1e-8
    # |a exp(-2i lambda(eta)) - 1| below this puts (lambda, a) in the isotropy set
    membership: float = 1e-8
    # upper end of the near-critical warning band
    near_critical: float = 1e-5
    # below this the Levi coefficient is refused as singular
    singular: float = 1e-10
    # reality classification of weights
    reality: float = 1e-8
    # eigenvalue threshold for inertia of Hermitian Levi matrices
    inertia: float = 1e-8
    # margin of the regular element in positive_system
    regular: float = 1e-6
    # LP margin for the cone test
    lp: float = 1e-9

    def override(self, **kwargs):
        names = {f.name for f in fields(self)}
        unknown = set(kwargs) - names
        if unknown:
            raise InvalidArgument(
                f"unknown tolerance key(s): {sorted(unknown)}", invariant="tol_overrides"
            )
        return replace(self, **{k: float(v) for k, v in kwargs.items()})


DEFAULT_TOL = Tolerances()
