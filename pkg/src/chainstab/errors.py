"""Exception hierarchy shared across the package.

ValidationError covers every rejected input; InternalInvariantError marks
states a correct run can never reach (a guaranteed-feasible system reported
infeasible, a broken gluing identity, and so on) and maps to a distinct
process exit code in the command-line front end.
"""


class ChainstabError(Exception):
    """Base class for errors raised by this package."""


class ValidationError(ChainstabError, ValueError):
    """Input data violates a documented invariant."""


class ContradictoryHypotheses(ValidationError):
    """Hypothesis flags assert facts that exclude each other."""


class UnsupportedData(ValidationError):
    """The requested computation is not defined for this input."""


class RuleNotApplicable(ChainstabError):
    """Preconditions of a criterion are not met."""


class InternalInvariantError(ChainstabError):
    """A mathematically guaranteed step failed; indicates a bug."""
