"""Exception types raised across the package."""


class ManifoldMDSError(Exception):
    """Base class for all errors raised by manifold_mds."""


class StructuralError(ManifoldMDSError, ValueError):
    """Shapes, kinds or base points of the arguments do not fit together."""


class ValidationError(ManifoldMDSError, ValueError):
    """A value has the right shape but violates a manifold invariant."""


class CutLocusError(ManifoldMDSError, ValueError):
    """The principal matrix logarithm is not unique for the given pair."""

    def __init__(self, message, pair=None):
        super().__init__(message)
        self.pair = pair


class NotPositiveDefiniteError(ValidationError):
    """A matrix expected to be symmetric positive-definite is not."""


class DegenerateDistanceError(ManifoldMDSError, ValueError):
    """A zero off-diagonal distance makes the requested weights undefined."""

    def __init__(self, message, pair=None):
        super().__init__(message)
        self.pair = pair


class AlignmentError(ManifoldMDSError, ValueError):
    """Procrustes alignment is undefined for the given configurations."""


class TraceError(ManifoldMDSError, ValueError):
    """A stress trace cannot be normalized (initial stress is zero)."""


class DatasetError(ManifoldMDSError, ValueError):
    """A dataset file failed to parse or violates its invariants."""
