"""Exception hierarchy shared across the package."""


class ModelError(Exception):
    """Base class for every error raised by threefactor."""


class InvalidShares(ModelError, ValueError):
    """A share or elasticity table violates its normalization invariants."""


class Indeterminate(ModelError):
    """A strict ordering assumption fails because two ratios tie."""


class RatioUndefined(ModelError):
    """The EWS-ratio vector needs g_LT != 0."""


class SingularSystem(ModelError):
    """The comparative-statics system has no unique solution."""


class NotApplicable(ModelError):
    """The premises of a classification rule are not met."""


class DegenerateIntensity(ModelError):
    """Land has the same distributive share in both sectors."""


class PointAUndefined(ModelError):
    pass


class PointBUndefined(ModelError):
    pass


class NotStrongRybczynski(ModelError):
    """The EWS-ratio vector is outside quadrant IV."""


class Boundary(ModelError):
    """A Rybczynski elasticity sits inside the zero band."""


class NoEquilibrium(ModelError):
    pass


class Infeasible(ModelError):
    pass


class SamplerExhausted(ModelError):
    pass


class DataError(ModelError):
    """Malformed, untagged or incomplete historical data."""


class PremiseFailure(ModelError):
    """A case-study premise failed; ``premise`` names it."""

    def __init__(self, premise, message):
        super().__init__(f"{premise}: {message}")
        self.premise = premise
