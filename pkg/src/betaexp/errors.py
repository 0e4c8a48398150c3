"""Exception types raised across the package.

Two families matter to callers: precondition failures (bad inputs, things that
are provably false) and undecidable outcomes (a certified comparison could not
be settled within the allowed precision).  The CLI maps them to exit codes 2
and 3 respectively.
"""


class BetaExpError(Exception):
    """Base class for all errors raised by this package."""


class DomainError(BetaExpError, ValueError):
    """An input lies outside the domain an operation is defined on."""


class Undecidable(BetaExpError):
    """A certified decision could not be reached."""


class RefinementStall(Undecidable):
    """Refinement hit the precision cap before reaching the requested width."""


class BoundaryUndecidable(Undecidable):
    """A point could not be separated from a boundary it may lie on."""


class SubdivisionOverflow(Undecidable):
    """Symbolic table construction needed more cells than allowed."""


class BoxSubdivisionOverflow(Undecidable):
    """A parameter box could not be certified within the subdivision budget."""


class PreimageOfMarkedPoint(Undecidable):
    """The orbit could not be separated from a marked periodic point."""


class NoDeltaCertificate(DomainError):
    """The requested contraction parameters are not covered by a certificate."""


class NoPositiveDelta(DomainError):
    """No positive parameter radius could be certified."""


class ScheduleError(DomainError):
    """A target frequency lies on or outside the admissible window."""


class GrowthViolation(DomainError):
    """A growth function increases too fast for the slow-growth construction."""


class LadderExhausted(DomainError):
    """The requested base lies beyond the computed rungs of the ladder."""


class EqualBases(DomainError):
    """Two bases that must differ are equal."""
