"""Exception hierarchy shared by all pwtrace modules."""


class PWTraceError(ValueError):
    """Base class for every error raised by pwtrace."""


class DegenerateDenominator(PWTraceError):
    pass


class OrderOutOfRange(PWTraceError):
    pass


class DuplicatePoints(PWTraceError):
    pass


class EtaNonPositive(PWTraceError):
    pass


class EtaOutOfRange(PWTraceError):
    pass


class BoundDegenerate(PWTraceError):
    pass


class NodeOnBoundary(PWTraceError):
    pass


class EmptyGrid(PWTraceError):
    pass


class PartitionFailed(PWTraceError):
    """The node set cannot be grouped at the requested (epsilon, capacity)."""

    def __init__(self, message, group=()):
        super().__init__(message)
        self.group = tuple(group)


class CapacityExceeded(PartitionFailed):
    pass


class OverlappingClusters(PWTraceError):
    pass


class ClustersTooClose(PWTraceError):
    def __init__(self, message, pair=None):
        super().__init__(message)
        self.pair = pair


class NodeNotInSequence(PWTraceError):
    pass


class SZero(PWTraceError):
    pass


class NonPositiveWeightEverywhere(PWTraceError):
    pass


class NonPositiveEntry(PWTraceError):
    pass


class SingularSampleGap(PWTraceError):
    pass


class CoincidentPoint(PWTraceError):
    pass


class MissingTraceValue(PWTraceError):
    pass


class FlavorMismatch(PWTraceError):
    pass


class DerivativeZero(PWTraceError):
    pass


class PoleOnContour(PWTraceError):
    pass


class ZeroNormWarning(UserWarning):
    """Emitted when a ratio is taken against a zero norm; the ratio is 0."""
