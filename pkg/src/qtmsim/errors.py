"""Exception hierarchy shared by all qtmsim modules."""


class QTMError(Exception):
    """Base class for every error raised by qtmsim."""


class MachineError(QTMError, ValueError):
    """A machine description violates one of its structural invariants."""


class DuplicateName(MachineError):
    pass


class UnknownState(MachineError):
    pass


class UnknownSymbol(MachineError):
    pass


class DuplicateQuintuple(MachineError):
    pass


class HaltHasOutgoingRule(MachineError):
    pass


class DeterministicConflict(MachineError):
    pass


class InvalidWeight(MachineError):
    pass


class WrongKind(QTMError, TypeError):
    """An operation was asked to work on a machine of the wrong kind."""


class KindMismatch(QTMError, TypeError):
    pass


class DepthZero(QTMError, ValueError):
    pass


class ValidationFailed(QTMError):
    def __init__(self, report):
        super().__init__("; ".join(report.failures) or "validation failed")
        self.report = report


class PathBudgetExceeded(QTMError):
    """Raised when path enumeration would exceed ``max_paths``.

    The paths enumerated before the budget ran out are kept on the
    exception so callers can still show them.
    """

    def __init__(self, paths, max_paths):
        super().__init__(f"more than {max_paths} paths; output truncated")
        self.paths = paths
        self.max_paths = max_paths
        self.truncated = True


class MixedRoots(QTMError, ValueError):
    pass


class DimensionMismatch(QTMError, ValueError):
    pass


class NonUnitary(QTMError, ValueError):
    pass


class WrongArity(QTMError, ValueError):
    pass


class MachineParseError(QTMError, ValueError):
    def __init__(self, diagnostics):
        errors = [d for d in diagnostics if d.severity == "error"]
        super().__init__("\n".join(str(d) for d in errors))
        self.diagnostics = list(diagnostics)
