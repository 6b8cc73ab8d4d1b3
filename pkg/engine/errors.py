"""Exception hierarchy shared by the engine, the data layer and the CLI."""


class HgregError(Exception):
    """Base class for every error raised by this package."""


class ConfigError(HgregError, ValueError):
    """Invalid run-time configuration (bad precision, non-positive bounds)."""


class DataFileError(HgregError, OSError):
    """Golden-table data file missing or malformed."""


class DomainError(HgregError, ValueError):
    """Argument outside the domain of the requested function."""


class PoleError(DomainError, ArithmeticError):
    """Argument at a pole of a Gamma-type function."""


class CutError(DomainError):
    """Argument on a branch cut of the principal sheet."""


class DivergenceError(HgregError, ArithmeticError):
    """Series evaluated outside its region of convergence."""


class MaxTermsExceeded(HgregError, RuntimeError):
    """Series did not reach its tail bound within the configured term cap."""


class DegenerateParameterError(DomainError):
    """Parameters make a connection coefficient or index set degenerate."""


class SingularFiberError(DomainError):
    """Fibre parameter t sits on a singular fibre."""


class BranchBoundaryError(DomainError):
    """Parameter sits exactly on the boundary between two formula branches."""


class ConstraintError(DomainError):
    """Coefficients fail the rationality constraint of the boundary map."""


class ConjectureRegionError(DomainError):
    """Requested case is only covered by a conjecture and is refused."""


class QuadratureError(HgregError, ArithmeticError):
    """Quadrature failed to reach the requested tolerance."""


class InsufficientCoefficientsError(HgregError, ValueError):
    """Too few Dirichlet coefficients for the requested tail bound."""


class AmbiguousSignError(HgregError, RuntimeError):
    """Root number could not be decided from the functional equation."""


class IntegralityError(HgregError, ValueError):
    """The K2 symbol fails the integrality criterion of its family."""
