"""Exception hierarchy shared across the package."""


class QuantcureError(Exception):
    """Base class for all package errors."""


class ParameterDomainError(QuantcureError, ValueError):
    """Arguments outside the mathematical domain of an operation."""


class PrecisionLossError(QuantcureError, ArithmeticError):
    """A closed form degenerated numerically (catastrophic cancellation)."""


class HazardOverflowError(QuantcureError, OverflowError):
    """Survival mass underflowed to zero where a hazard ratio was requested."""


class ChainConfigError(QuantcureError, ValueError):
    """Invalid MCMC configuration, including a non-finite starting density."""


class ScenarioError(QuantcureError, ValueError):
    """Simulation scenario is internally inconsistent or infeasible."""


class StudyError(QuantcureError, RuntimeError):
    """A Monte Carlo study could not produce a trustworthy summary."""


class DataLoadError(QuantcureError, ValueError):
    """Input data file violates the expected schema."""


class OutputError(QuantcureError, OSError):
    """Results could not be written to the requested location."""
