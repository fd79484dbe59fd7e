"""Exception hierarchy. Every error raised by the library derives from StatDiscError."""


class StatDiscError(Exception):
    pass


class InputError(StatDiscError, ValueError):
    """Malformed input: bad shapes, bad JSON, unknown names."""


class DimensionMismatch(InputError):
    pass


class NonHermitianInput(InputError):
    pass


class PreconditionError(StatDiscError, ValueError):
    pass


class NoDirectionFound(StatDiscError):
    """Random search found no invertible real combination of the Levi matrices.

    This is inconclusive, not a proof of degeneracy. ``best`` holds the best
    candidate direction and ``sigma`` its smallest singular value.
    """

    def __init__(self, message, best=None, sigma=0.0):
        super().__init__(message)
        self.best = best
        self.sigma = sigma


class SingularLeviDirection(StatDiscError):
    pass


class SolverFail(StatDiscError):
    pass


class NotConverged(SolverFail):
    pass


class NormTooLarge(SolverFail):
    pass


class SpectralRadiusTooLarge(SolverFail):
    pass


class SingularLinearSystem(SolverFail):
    pass


class ToleranceFail(StatDiscError):
    pass


class FactorizationResidual(ToleranceFail):
    pass


class OutsideClosedDisc(InputError):
    pass


class NotOnBoundary(InputError):
    pass


class InternalInconsistency(StatDiscError):
    """Two routes that must agree by a proven equivalence disagreed. Indicates a bug."""
