"""Exception hierarchy.

Everything raised on purpose by the package derives from :class:`KappaMapError`,
so the CLI can map it onto exit code 2 in one place.
"""


class KappaMapError(Exception):
    """Base class for all package errors."""


class DomainError(KappaMapError, ValueError):
    """log/sqrt (or a power) evaluated outside its real domain."""


class DimensionTooSmall(KappaMapError, ValueError):
    pass


class DimensionMismatch(KappaMapError, ValueError):
    pass


class NonInvertible(KappaMapError, ValueError):
    pass


class NotSymmetric(KappaMapError, ValueError):
    pass


class NoRealRoot(KappaMapError, ValueError):
    """The quadratic constraint for A has a negative discriminant."""


class MapDomainError(KappaMapError, ValueError):
    """The deformation map is undefined at the requested point.

    ``conditions`` lists every violated condition in human-readable form.
    """

    def __init__(self, conditions):
        if isinstance(conditions, str):
            conditions = [conditions]
        self.conditions = list(conditions)
        super().__init__("; ".join(self.conditions))


class WeylRequiresNullTime(KappaMapError, ValueError):
    """Dilatation sector requested on a metric with g00 != 0."""

    def __init__(self, g00):
        self.g00 = g00
        super().__init__(f"the Weyl sector requires g00 = 0, got g00 = {g00!r}")


class NoSolution(KappaMapError, ValueError):
    """A scalar root solve could not bracket a root in its search range."""


class RangeError(KappaMapError, OverflowError):
    pass


class DomainTooTight(KappaMapError, RuntimeError):
    """Rejection sampling accepted too few points."""


class ConfigError(KappaMapError, ValueError):
    pass
