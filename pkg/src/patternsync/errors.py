"""Exception hierarchy shared by all modules."""


class PatternSyncError(Exception):
    """Base class for all engine errors."""

    code = "PatternSyncError"

    def __init__(self, message, entity=None):
        super().__init__(message)
        self.entity = entity

    def payload(self):
        return {
            "code": type(self).__name__,
            "entity": self.entity,
            "message": str(self),
        }


class DegenerateTriangle(PatternSyncError):
    pass


class SingularFrame(PatternSyncError):
    pass


class MismatchedTopology(PatternSyncError):
    pass


class EmptySource(PatternSyncError):
    pass


class EmptyIsoline(PatternSyncError):
    pass


class NoSymmetryDeclared(PatternSyncError):
    pass


class UnpairedPanel(PatternSyncError):
    pass


class DegenerateChord(PatternSyncError):
    pass


class SolverFailure(PatternSyncError):
    pass


class NonFiniteInput(PatternSyncError):
    pass


class InvalidFactor(PatternSyncError):
    pass


class DisconnectedRegion(PatternSyncError):
    pass


class NoNearbyBone(PatternSyncError):
    pass


class OffsetOutOfRange(PatternSyncError):
    pass


class SeamNotFound(PatternSyncError):
    pass


class NoIntersection(PatternSyncError):
    pass


class OpenLoop(PatternSyncError):
    pass


class SliverTriangles(PatternSyncError):
    pass


class NoBoundary(PatternSyncError):
    pass


class SelfIntersection(PatternSyncError):
    pass


class ParseError(PatternSyncError):
    def __init__(self, message, offset=None, entity=None):
        super().__init__(message, entity=entity)
        self.offset = offset


class ValidationError(PatternSyncError):
    pass


class UnsupportedVersion(PatternSyncError):
    pass


class NonTriangleFace(PatternSyncError):
    pass


class MissingGroup(PatternSyncError):
    pass
