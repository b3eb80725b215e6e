"""Exception hierarchy.

Every error carries the name of the violated invariant (when there is one) so
the command line driver can report it verbatim.
"""


class LevilabError(Exception):
    """Base class for all errors raised by levilab."""

    #: exit status used by the command line driver
    exit_code = 3

    def __init__(self, message, *, invariant=None, module=None, op=None):
        super().__init__(message)
        self.invariant = invariant
        self.module = module
        self.op = op

    def to_dict(self):
        return {
            "type": type(self).__name__,
            "message": str(self),
            "invariant": self.invariant,
            "module": self.module,
            "op": self.op,
        }


class InvalidArgument(LevilabError, ValueError):
    exit_code = 2


class ValidationError(LevilabError, ValueError):
    """A user supplied object fails one of its documented invariants."""

    exit_code = 2


class DegenerateSetup(LevilabError):
    pass


class IllConditionedDecomposition(LevilabError):
    pass


class DegenerateWeight(LevilabError):
    pass


class NonRegularElement(LevilabError):
    pass


class BasisConstructionError(LevilabError):
    pass


class NotComplexTangent(LevilabError):
    pass


class UnsupportedCase(LevilabError):
    """The requested quantity is not defined for this orbit or datum."""


class NearSingular(LevilabError):
    pass


class InconclusiveVerdict(LevilabError):
    pass


class SingularPoint(LevilabError):
    pass


class UnstableOracle(LevilabError):
    pass
