"""Exception hierarchy shared by every webdir module."""


class WebDirError(Exception):
    """Base class for all library errors."""


# directory structure
class UnknownCategory(WebDirError, KeyError):
    pass


class UnknownParent(UnknownCategory):
    pass


class DuplicateUrl(WebDirError):
    pass


class DuplicateResource(WebDirError):
    pass


class SelfLoop(WebDirError):
    pass


class ParallelEdge(WebDirError):
    pass


class TreeEdgeShadow(WebDirError):
    pass


class Unreachable(WebDirError):
    pass


class RootNonSemantic(WebDirError):
    pass


# semantics
class EmptyResource(WebDirError):
    pass


class ModeConditionUnmet(WebDirError):
    pass


class MissingSemantics(WebDirError):
    pass


# construction
class OnlyRootPresent(WebDirError):
    pass


class InvalidThresholds(WebDirError, ValueError):
    pass


class DirectoryNotEmpty(WebDirError):
    pass


class PlacementError(WebDirError):
    """Wraps a failure while placing one resource of a stream."""

    def __init__(self, resource_id, cause):
        super().__init__(f"resource {resource_id!r}: {cause}")
        self.resource_id = resource_id
        self.cause = cause


class ReplayMismatch(WebDirError):
    pass


# metrics / simulation
class InvalidTrace(WebDirError, ValueError):
    pass


class TraceNotFromRoot(WebDirError):
    pass


class EmptyReportSet(WebDirError, ValueError):
    pass


class UnknownTarget(WebDirError, KeyError):
    pass


# io
class ParseError(WebDirError, ValueError):
    def __init__(self, line, message):
        super().__init__(f"line {line}: {message}")
        self.line = line


class DuplicateId(WebDirError, ValueError):
    def __init__(self, rid, line=None):
        where = f" (line {line})" if line is not None else ""
        super().__init__(f"duplicate resource id {rid!r}{where}")
        self.id = rid


class SchemaInvalid(WebDirError, ValueError):
    def __init__(self, violations):
        kinds = ", ".join(v.kind for v in violations)
        super().__init__(f"schema failed validation: {kinds}")
        self.violations = list(violations)
