"""Exception hierarchy.

Every error below signals a violated precondition or a certified numerical
failure; none of them are used for control flow inside the library.
"""


class StablePaveError(Exception):
    """Base class for all library errors."""


# univariate ---------------------------------------------------------------

class ZeroPolynomial(StablePaveError):
    """Operation requires a nonzero polynomial."""


class NotRealRooted(StablePaveError):
    """Sturm count fell short of the degree beyond tolerance."""


class DegreeMismatch(StablePaveError):
    """Interlacing needs degrees differing by at most one."""


class LengthMismatch(StablePaveError):
    """Majorization needs vectors of equal length."""


class SumMismatch(StablePaveError):
    """Majorization needs vectors with equal totals."""


# multivariate -------------------------------------------------------------

class DimensionMismatch(StablePaveError):
    """Evaluation point length differs from the variable count."""


class ZeroScale(StablePaveError):
    """Affine substitution requires nonzero per-variable scales."""


class WrongArity(StablePaveError):
    """Operation is defined only for a specific number of variables."""


class BudgetExceeded(StablePaveError):
    """Dense table or enumeration size exceeds the configured budget."""


# paving -------------------------------------------------------------------

class ParamOutOfRange(StablePaveError):
    """Paving parameters outside their admissible ranges."""


class HypothesisViolated(StablePaveError):
    """Input polynomial fails a paving-theorem precondition."""

    def __init__(self, failures):
        self.failures = list(failures)
        super().__init__("; ".join(self.failures))


class DescentStuck(StablePaveError):
    """No child met the maxroot inequality within tolerance."""


class NotAboveRoots(StablePaveError):
    """Barrier iterate left the above-the-roots region."""


class MonotonicityViolated(StablePaveError):
    """A barrier value increased across a step beyond tolerance."""


class PoleAtPoint(StablePaveError):
    """Barrier function evaluated where the polynomial vanishes."""


# point processes ----------------------------------------------------------

class InvalidPMF(StablePaveError):
    """Mass table is negative beyond tolerance or does not sum to one."""


class NotAValidKernel(StablePaveError):
    """Kernel invariants fail or reconstructed mass is negative."""


class ZeroProbabilityEvent(StablePaveError):
    """Conditioning on an event of probability zero."""


class NotPSDContraction(StablePaveError):
    """Matrix is not a symmetric PSD contraction within tolerance."""


class CenteringFailed(StablePaveError):
    """Centered kernel violates its structural identities."""


class InvalidWeights(StablePaveError):
    """External field weights must be strictly positive."""


# hyperbolic ---------------------------------------------------------------

class SpecializationMismatch(StablePaveError):
    """A specialization of the lifted polynomial missed its target."""
