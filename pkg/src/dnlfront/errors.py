"""Exception hierarchy shared across the package."""


class DnlError(Exception):
    """Base class for all errors raised by dnlfront."""


# --- model -----------------------------------------------------------------

class RegimeError(DnlError):
    """Exponents outside the supported slow-diffusion regime."""


class DimensionError(DnlError):
    """Invalid space dimension."""


class SignPatternError(DnlError):
    """Reaction term violates the required sign pattern."""


class DegeneracyError(DnlError):
    """Reaction term is degenerate at u = 1 (h'(1) >= 0)."""


# --- waves -----------------------------------------------------------------

class IntegrationError(DnlError):
    """Adaptive ODE integration failed to meet its tolerance."""


class SeedError(DnlError):
    """Endpoint asymptote used to seed a shot is not finite."""


class AmbiguousError(DnlError):
    """Shot classification fell inside the dead band."""

    def __init__(self, ratio: float, eps_lo: float, message: str = ""):
        self.ratio = ratio
        self.eps_lo = eps_lo
        super().__init__(message or f"ambiguous shot: phi/(c u) = {ratio:.6g} at u = {eps_lo:g}")


class BracketError(DnlError):
    """Bisection bracket invalid (upper bound classified too slow)."""


class ConvergenceError(DnlError):
    """Bisection could not resolve the critical speed."""


class NonCriticalError(DnlError):
    """Profile reconstruction requested for a non-connecting trajectory."""


class QuadratureError(DnlError):
    """Quadrature failed its tolerance."""


class ExtrapolationError(DnlError):
    """Richardson extrapolation diverged."""


class SingularityError(DnlError):
    """Singular integral failed to converge numerically."""


class NoExitError(DnlError):
    """Trajectory from (eta, 0) failed to reach u = 0."""

    def __init__(self, blocking_u: float, message: str = ""):
        self.blocking_u = blocking_u
        super().__init__(message or f"trajectory blocked at u = {blocking_u:.6g} (eta below the exit threshold)")


# --- pde -------------------------------------------------------------------

class ConstraintError(DnlError):
    """Initial-datum parameters violate their admissibility constraints."""


class GridError(DnlError):
    """Datum does not fit on the requested grid."""


class CFLError(DnlError):
    """Time step exceeds the stability bound."""


class NegativityError(DnlError):
    """Update produced a negative value beyond round-off."""


class DomainFullWarning(DnlError):
    """Support reached the guarded fraction of the domain."""


class SimulationError(DnlError):
    """A step failed during a run; carries the failing time."""

    def __init__(self, t: float, message: str):
        self.t = t
        super().__init__(f"t = {t:.6g}: {message}")


class WindowError(DnlError):
    """Envelope initial value outside the negativity window of h'."""


# --- analysis --------------------------------------------------------------

class RankError(DnlError):
    """Regression window too short for the requested model."""


class FitError(DnlError):
    """Regression failed or data degenerate."""


class InconclusiveError(DnlError):
    """Experiment ended Undecided; extend the horizon."""


# --- cli -------------------------------------------------------------------

class ParseError(DnlError):
    """Malformed configuration file."""

    def __init__(self, line_no: int, message: str):
        self.line_no = line_no
        super().__init__(f"line {line_no}: {message}")


class UnknownKeyError(DnlError):
    """Configuration key not in the schema."""


class MissingSectionError(DnlError):
    """Required configuration section absent."""


class UsageError(DnlError):
    """Bad command-line invocation."""
