class ConsistencyError(RuntimeError):
    """An identity that must hold exactly failed; signals an arithmetic bug."""


class DistanceRegularityError(ConsistencyError):
    """Intersection numbers depend on the chosen pair of vertices."""


class RelationFailure(ConsistencyError):
    """A defining relation of the tridiagonal algebra left a nonzero residual."""

    def __init__(self, message, relation=None, vector=None):
        super().__init__(message)
        self.relation = relation
        self.vector = vector


class ConjectureViolation(ConsistencyError):
    """A conjecture instance checked for a cycle has a counterexample."""
