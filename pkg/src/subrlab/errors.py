"""Exception types shared across the package."""


class SubrlabError(Exception):
    """Base class for all package-specific errors."""


class ChartDomainViolation(SubrlabError):
    """A point lies outside the coordinate chart of the model space."""


class ChartExit(SubrlabError):
    """An integrated curve left the chart domain.

    Carries the arc-length parameter at which the curve exited and, when
    available, the partial data computed up to that parameter.
    """

    def __init__(self, message, exit_s, partial=None):
        super().__init__(message)
        self.exit_s = exit_s
        self.partial = partial


class StepTooLarge(SubrlabError):
    """Integrator drift exceeded its budget; halve the step size."""


class DegenerateProjection(SubrlabError):
    """Projected curve speed too small to define a geodesic curvature."""


class MisalignedBase(SubrlabError):
    """Initial data is not based at the expected curve point."""


class SingularPoint(SubrlabError):
    """A surface node has |N_h| below the singular tolerance."""


class SingularAfterDisplacement(SubrlabError):
    """A displaced surface node became singular during a variation."""


class WrongBranch(SubrlabError):
    """Discriminant identities requested outside their H^2+K >= 0 range."""


class NoCertificateAtScale(SubrlabError):
    """No destabilizing test function found within the grid's scale range.

    Inconclusive by construction: the instability criterion is one-sided.
    Carries the largest scale index tried and the report assembled so far.
    """

    def __init__(self, message, largest_n, report=None):
        super().__init__(message)
        self.largest_n = largest_n
        self.report = report


class ScenarioError(SubrlabError):
    """Scenario file failed schema validation."""
