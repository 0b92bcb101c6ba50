"""Exception types raised across the package."""


class CollectiveCoherenceError(Exception):
    pass


class DomainError(CollectiveCoherenceError, ValueError):
    """An argument lies outside the mathematical domain of a formula."""


class ScenarioError(CollectiveCoherenceError, ValueError):
    """The requested scenario is not defined for the given system size."""


class ContractError(CollectiveCoherenceError, ValueError):
    """Shapes, orderings or step sizes violate an operation's preconditions."""


class UnsupportedScenario(CollectiveCoherenceError, NotImplementedError):
    pass


class CapacityError(CollectiveCoherenceError, MemoryError):
    pass


class DegeneracyError(CollectiveCoherenceError, ArithmeticError):
    """The eigenvector matrix is singular to working precision (defective spectrum)."""


class InvariantError(CollectiveCoherenceError, ArithmeticError):
    pass


class VerificationError(CollectiveCoherenceError, AssertionError):
    def __init__(self, message, residuals=None):
        super().__init__(message)
        self.residuals = dict(residuals or {})
