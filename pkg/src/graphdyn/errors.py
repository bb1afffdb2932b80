"""Exception hierarchy shared by all graphdyn modules."""


class GraphDynError(Exception):
    """Base class for library errors."""


class DomainError(GraphDynError, ValueError):
    """An argument lies outside the domain of the operation."""


class UnsupportedError(GraphDynError, TypeError):
    """The operation needs structure the map does not have."""


class NotMarkovError(GraphDynError):
    """A piecewise-linear map is not Markov with respect to its partition."""

    def __init__(self, message, piece=None):
        super().__init__(message)
        self.piece = piece
