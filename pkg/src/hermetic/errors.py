"""Exception hierarchy.

Everything raised for a numerical-domain problem derives from
:class:`HermeticError`; the command line maps those to exit status 3.
"""


class HermeticError(Exception):
    """Base class for numerical-domain failures."""


class ArgumentError(HermeticError, ValueError):
    """Malformed argument (wrong shape, empty list, non-Hermitian input...)."""


class DimensionError(ArgumentError):
    """Product dimension exceeds the configured maximum."""


class LayoutError(HermeticError, ValueError):
    """Subsystem layouts do not match or a label is unknown."""


class NormalizationError(HermeticError, ValueError):
    """A ket or density operator is not normalized."""


class InvalidStateError(HermeticError, ValueError):
    """Density operator is not Hermitian, unit-trace and positive semidefinite."""


class GramSpecError(HermeticError, ValueError):
    """Overlap matrix is not Hermitian PSD with unit diagonal."""


class NullEventError(HermeticError):
    """Conditioning on an event of (numerically) zero probability."""


class DegenerateFormError(HermeticError):
    """Every conditional environment vector of a correlated form vanishes."""


class SpanError(HermeticError):
    """Descriptors do not span the support of the state."""


class ImpossibleOutcomeError(HermeticError):
    """Observed outcome has zero likelihood under every candidate."""


class MismatchedMarginalError(HermeticError):
    """Environment purifications do not share the same marginal."""


class InconclusiveWarning(UserWarning):
    """A decision procedure cannot settle the question for this input."""


class NullDescriptorWarning(UserWarning):
    """Descriptors with vanishing conditional weight were skipped."""
