"""Exception hierarchy shared by all modules."""


class IncRelayError(Exception):
    """Base class for every error raised by this package."""


class DomainError(IncRelayError, ValueError):
    """An argument lies outside its mathematical domain."""


class TopologyError(IncRelayError, IndexError):
    """A relay index does not exist in the network."""


class DegenerateTargetError(DomainError):
    """Outage target at the boundary (0 or 1) where the approximation is meaningless."""


class ConsistencyError(IncRelayError, RuntimeError):
    """An internal invariant (total probability, route agreement) was violated."""


class SolverError(IncRelayError, RuntimeError):
    """A root finder did not converge.

    The last iterate is kept on ``last_iterate`` so callers can inspect how
    far the solver got.
    """

    def __init__(self, message, last_iterate=None, iterations=None):
        super().__init__(message)
        self.last_iterate = last_iterate
        self.iterations = iterations
