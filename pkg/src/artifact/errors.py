"""Exception types shared across the solver modules."""


class ValidationError(ValueError):
    """Bad user input: malformed config, out-of-range parameter."""


class SolverError(RuntimeError):
    """Numerical failure during a run."""


class PositivityError(SolverError):
    """Non-positive density or pressure where positivity is required."""


class VacuumError(SolverError):
    """The Riemann data would create a vacuum."""


class ConvergenceError(SolverError):
    """An iterative solve did not converge."""


class DegeneracyError(SolverError):
    """A linear system in an interface solver is singular."""
