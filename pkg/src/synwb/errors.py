"""Exception hierarchy shared by every module of the workbench."""


class WorkbenchError(Exception):
    """Base class; the CLI maps any subclass to a nonzero exit status."""


# families and maps

class EmptyGenerator(WorkbenchError):
    pass


class EmptyList(WorkbenchError):
    pass


class GroundMismatch(WorkbenchError):
    pass


class NotSurjective(WorkbenchError):
    pass


class NotASubfamily(WorkbenchError):
    pass


class NoTrace(WorkbenchError):
    pass


class GroundTooLarge(WorkbenchError):
    pass


# structures and embeddings

class SignatureMismatch(WorkbenchError):
    pass


class InvalidStructure(WorkbenchError):
    pass


class UniverseTooLarge(WorkbenchError):
    pass


class LevelMismatch(WorkbenchError):
    pass


class LevelOutOfRange(WorkbenchError):
    pass


class HorizonExhausted(WorkbenchError):
    """No witness within the truncated exhaustion; the horizon may be too short."""


# horizon searches

class NotFound(WorkbenchError):
    """A bounded search came up empty; larger parameters may succeed."""


class DescentExhausted(WorkbenchError):
    pass


class PreconditionFailed(WorkbenchError):
    pass


# integers

class NotPws(WorkbenchError):
    pass


class WindowTooSmall(WorkbenchError):
    pass


# input files

class InputParseError(WorkbenchError):
    def __init__(self, message, source="<input>", line=None):
        self.source = source
        self.line = line
        where = f"{source}:{line}" if line is not None else source
        super().__init__(f"{where}: {message}")
