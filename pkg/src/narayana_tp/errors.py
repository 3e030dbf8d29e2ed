"""Exception types shared across the toolkit."""


class DimensionError(ValueError):
    pass


class MinorSpecError(ValueError):
    pass


class DomainError(ValueError):
    pass


class PivotError(ArithmeticError):
    """Zero leading principal minor met during LDL factorization."""

    def __init__(self, order):
        super().__init__(f"leading principal minor of order {order} is zero")
        self.order = order


class NotSymmetricError(ValueError):
    pass


class ParameterError(ValueError):
    pass


class ConsistencyError(AssertionError):
    """An internal arithmetic invariant did not hold (e.g. a non-integral count)."""


class ResourceError(RuntimeError):
    pass


class MethodError(ValueError):
    pass
