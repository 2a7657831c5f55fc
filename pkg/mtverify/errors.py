"""
Exception hierarchy for mtverify

Input and configuration problems derive from ValueError, computations that
could not be completed derive from RuntimeError, so the CLI can route them
the same way it routes the builtin errors.
"""


class MTVerifyError(Exception):
    """Base class for all mtverify errors"""


class NotMinimal(MTVerifyError, ValueError):
    """The Weierstrass model is visibly non-minimal at a prime"""


class NotASubfield(MTVerifyError, ValueError):
    """A field spec is not contained in the field it is projected from"""


class HypothesisViolated(MTVerifyError, ValueError):
    """A precondition of an identity does not hold for the given data"""

    def __init__(self, message: str, clauses=None):
        super().__init__(message)
        self.clauses = list(clauses or [])


class ConfigInvalid(MTVerifyError, ValueError):
    """Malformed configuration, curve file or run specification"""


class PrecisionUnsupported(MTVerifyError, RuntimeError):
    """The requested precision cannot be reached within the configured budget"""


class ConvergenceFailure(MTVerifyError, RuntimeError):
    """An iterative numerical method stagnated"""


class NormalizationAmbiguous(MTVerifyError, RuntimeError):
    """No pinning character with non-vanishing value was found"""


class SingularOperator(MTVerifyError, RuntimeError):
    """An operator expected to be invertible is singular"""


class CacheCorrupt(MTVerifyError, RuntimeError):
    """Cached coefficients disagree with a fresh computation"""


class InconsistentInvariant(MTVerifyError, RuntimeError):
    """Two independent computations of the same invariant disagree"""
