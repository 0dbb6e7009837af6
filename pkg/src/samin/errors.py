class SaminError(Exception):
    """Base class for all errors raised by this package."""


class ParameterError(SaminError, ValueError):
    pass


class DomainError(SaminError, ValueError):
    """An input lies outside the domain of a physical formula."""


class RateInfeasibleError(DomainError):
    """The requested bits cannot be pushed through the link in the given window."""


class PropagationDominatedError(DomainError):
    """The LEO transmission window is consumed entirely by propagation delay."""


class UnallocatedWorkError(DomainError):
    """Work was assigned to an executor holding zero CPU capacity."""


class InfeasibleError(SaminError):
    """A per-MASS subproblem has an empty feasible interval."""


class ConfigError(SaminError, ValueError):
    def __init__(self, message, key=None, line=None):
        self.key = key
        self.line = line
        where = []
        if key is not None:
            where.append(f"key {key!r}")
        if line is not None:
            where.append(f"line {line}")
        super().__init__(f"{message} ({', '.join(where)})" if where else message)
