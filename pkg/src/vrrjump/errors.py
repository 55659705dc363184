"""Exception types shared across the package.

The CLI maps these onto process exit codes (see cli.EXIT_*), so new error
conditions should reuse or subclass one of the classes below.
"""


class VrrJumpError(Exception):
    """Base class for all package errors."""


class DomainError(VrrJumpError, ValueError):
    """An argument lies outside the mathematical domain of an operation."""


class SingularityError(DomainError):
    """Knee angle too close to full extension for the CoM transmission ratio."""

    def __init__(self, q2: float, cap: float):
        self.q2 = q2
        self.cap = cap
        super().__init__(
            f"knee angle q2={q2:.6g} rad is at or above the singularity cap "
            f"{cap:.6g} rad; the knee-to-CoM ratio diverges at full extension"
        )


class MechanismRangeError(DomainError):
    """Crank angle left the linkage working range."""


class DegenerateGeometryError(MechanismRangeError):
    """Linkage geometry produced a non-positive square-root argument."""


class SimulationRangeError(VrrJumpError):
    """The integrated state left the valid range mid-flight.

    Carries the last valid simulator state so callers can diagnose the
    failure or record the candidate as infeasible.
    """

    def __init__(self, message: str, last_state=None):
        self.last_state = last_state
        super().__init__(message)


class NoFeasibleDesignError(VrrJumpError):
    """Every candidate in a search grid failed the feasibility guard."""


class ConfigError(VrrJumpError, ValueError):
    """Run configuration could not be parsed or validated."""
