"""Exception hierarchy shared by all modules."""

from __future__ import annotations


class FilippovError(Exception):
    """Base class for every error raised by the package."""


class InvalidIndex(FilippovError, ValueError):
    pass


class NotSlidingRegion(FilippovError):
    pass


class DegenerateQuadrilateral(FilippovError):
    pass


class AmbiguousKappa(FilippovError):
    pass


class SigmaPsiDenominatorZero(FilippovError):
    pass


class DegenerateBoth(FilippovError):
    pass


class NewtonDivergence(FilippovError):
    pass


class NoQualifyingEdge(FilippovError):
    pass


class StepSizeUnderflow(FilippovError):
    """Integrator step fell below its floor. ``state`` and ``t`` hold the last accepted point."""

    def __init__(self, msg: str, t: float, state) -> None:
        super().__init__(msg)
        self.t = t
        self.state = state


class MaxStepsExceeded(FilippovError):
    def __init__(self, msg: str, t: float, state) -> None:
        super().__init__(msg)
        self.t = t
        self.state = state


class PreconditionError(FilippovError, ValueError):
    pass
