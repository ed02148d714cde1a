"""Exception hierarchy shared by the library and the CLI.

The CLI maps these onto exit codes: invalid arguments -> 2, regime and
feasibility problems -> 3, numerical non-convergence -> 4.
"""


class AnalogBFError(Exception):
    """Base class for all library errors."""


class InvalidArgumentError(AnalogBFError, ValueError):
    """An argument violates a documented precondition."""


class UnsupportedRegimeError(AnalogBFError):
    """The requested steering angle / band is outside the solved regime."""


class DivergentGainError(UnsupportedRegimeError):
    """The flat-gain bound is unbounded (steering at broadside)."""


class InfeasibleError(AnalogBFError):
    """No power can be allocated (zero spectrum, dead direction, ...)."""


class NonConvergenceError(AnalogBFError):
    """An iterative routine failed to reach its tolerance."""
