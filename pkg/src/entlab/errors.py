"""Exception types raised across the package."""


class EntlabError(Exception):
    """Base class for all package errors."""


class DomainError(EntlabError, ValueError):
    """A bit-domain is out of range or two domains disagree."""


class DomainMismatch(DomainError):
    pass


class InvalidDistribution(EntlabError, ValueError):
    pass


class ZeroMassCondition(EntlabError, ValueError):
    """Conditioning on an outcome that has probability zero."""


class ZMarginalMismatch(EntlabError, ValueError):
    """Two joints were expected to share the same Z-marginal."""


class CapOutOfRange(EntlabError, ValueError):
    pass


class BadWeights(EntlabError, ValueError):
    pass


class CircuitSyntaxError(EntlabError, ValueError):
    def __init__(self, message, position=None):
        self.position = position
        if position is not None:
            message = f"{message} (at position {position})"
        super().__init__(message)


class CircuitRangeError(EntlabError, ValueError):
    pass


class BudgetExceeded(EntlabError, RuntimeError):
    pass


class LPBudgetExceeded(BudgetExceeded):
    pass


class NonClosedClass(EntlabError, ValueError):
    """The class of distinguishers is not closed under complement."""


class InfeasibleWitness(EntlabError, RuntimeError):
    def __init__(self, message, witness=None):
        self.witness = witness
        super().__init__(message)


class PreconditionFailed(EntlabError, ValueError):
    def __init__(self, message, witness=None):
        self.witness = witness
        super().__init__(message)


class HypothesisNotViolated(PreconditionFailed):
    pass


class LTooLarge(EntlabError, ValueError):
    pass


class NoThreshold(EntlabError, RuntimeError):
    pass


class ScenarioError(EntlabError, ValueError):
    """Malformed scenario input."""


class NonBooleanClass(EntlabError, ValueError):
    """Modulus entropy is only defined against boolean distinguishers."""
