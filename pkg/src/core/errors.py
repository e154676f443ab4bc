"""
Exception hierarchy for graph, oracle, influence, spectral and sampler failures.
"""


class ColoringError(Exception):
    """Base class for every error raised by the toolkit."""


class SelfLoopError(ColoringError):
    pass


class DuplicateEdgeError(ColoringError):
    pass


class EmptyListError(ColoringError):
    pass


class ColorOutOfRangeError(ColoringError):
    pass


class BadParamsError(ColoringError):
    pass


class NonExtendableError(ColoringError):
    """A partial coloring that cannot be completed to a proper list-coloring."""


class NotNeighborError(ColoringError):
    pass


class ColorNotInListError(ColoringError):
    pass


class IsolatedVertexError(ColoringError):
    pass


class TooLargeError(ColoringError):
    """Enumeration or matrix construction would exceed a configured cap."""


class UnsatisfiableError(ColoringError):
    """The instance has no proper list-coloring."""


class ZeroConditioningError(ColoringError):
    """Conditioning on an event of probability zero."""


class DegenerateMarginalError(ColoringError):
    """A marginal equals one, so a ratio P(c)/P(not c) is unbounded."""


class SingleVertexError(ColoringError):
    pass


class ComplexEigenvalueError(ColoringError):
    pass


class EigenSolverError(ColoringError):
    pass


class NotErgodicError(ColoringError):
    """Some vertex has fewer than degree + 2 colors, so Glauber moves may not connect Omega."""


class GreedyStuckError(ColoringError):
    pass


class HypothesisViolatedError(ColoringError):
    """A check was requested on an instance outside the hypotheses it is stated for."""

    def __init__(self, hypothesis: str):
        self.hypothesis = hypothesis
        super().__init__(f"hypothesis violated: {hypothesis}")


class InputError(ColoringError):
    """The instance file or generator spec could not be turned into an instance."""
