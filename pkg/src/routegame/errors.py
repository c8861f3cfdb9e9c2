"""Exception hierarchy shared by the whole package."""


class RouteGameError(Exception):
    """Base class for all errors raised by this package."""


class UnknownReferenceError(RouteGameError):
    """A plan referenced an edge or group id that does not exist."""


class ContractViolationError(RouteGameError):
    """An input violated a documented precondition (e.g. a malformed mix)."""


class NoPathError(RouteGameError):
    """The release node is not reachable from the start node."""


class HeuristicUnavailableError(RouteGameError):
    """Node coordinates are missing, so no geometric heuristic exists."""


class SolverFailureError(RouteGameError):
    """The matrix-game solve failed numerically.

    Carries the offending payoff matrix for diagnosis.
    """

    def __init__(self, message, matrix=None):
        super().__init__(message)
        self.matrix = matrix


class IterationBudgetError(RouteGameError):
    """The strategy-generation loop hit its iteration cap.

    Carries the best result found so far.
    """

    def __init__(self, message, result=None):
        super().__init__(message)
        self.result = result


class ScenarioFormatError(RouteGameError):
    """A scenario file could not be parsed; message locates the problem."""


class ScenarioValidationError(RouteGameError):
    """A scenario parsed but violated a structural invariant."""


class UnsupportedFormatError(RouteGameError):
    """The requested export format cannot be produced for this scenario."""
