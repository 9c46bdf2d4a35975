"""Exception and warning types shared across the package."""


class MaslovKitError(Exception):
    """Base class for all package errors."""


class InvalidInputError(MaslovKitError, ValueError):
    """Input is malformed (non-finite entries, wrong shape, bad signature...)."""


class DimensionMismatchError(InvalidInputError):
    pass


class RankDeficiencyError(InvalidInputError):
    """A family of vectors that must be independent is not."""


class NotLagrangianError(InvalidInputError):
    pass


class NotInChartDomainError(MaslovKitError):
    """The Lagrangian meets the complement of the chart nontrivially."""


class TransversalityError(MaslovKitError):
    """No Lagrangian with the requested transversality margins was found."""


class RefinementError(MaslovKitError):
    """A sampled path is too coarse and cannot be refined."""


class DegenerateCrossingError(MaslovKitError):
    def __init__(self, t, message=None):
        self.t = t
        super().__init__(message or f"degenerate crossing at t={t!r}")


class DriftError(MaslovKitError):
    """Symplecticity residual of an integrated flow exceeds its bound."""


class InconsistencyError(MaslovKitError):
    """Two routes to the same quantity disagree."""


class ScenarioError(InvalidInputError):
    def __init__(self, field, message):
        self.field = field
        super().__init__(f"{field}: {message}")


class MarginalRankWarning(UserWarning):
    pass


class AccumulationWarning(UserWarning):
    pass
