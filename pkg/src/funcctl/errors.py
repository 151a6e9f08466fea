"""Exception hierarchy for funcctl."""


class FuncCtlError(Exception):
    """Base class for all funcctl errors."""


class DimensionMismatch(FuncCtlError, ValueError):
    pass


class RankDeficient(FuncCtlError, ValueError):
    pass


class ConvergenceFailure(FuncCtlError, RuntimeError):
    pass


class Uncontrollable(FuncCtlError, ValueError):
    pass


class UnpairedComplexPole(FuncCtlError, ValueError):
    pass


class InconsistentVerdicts(FuncCtlError, RuntimeError):
    """An implication between verdicts was violated; usually a tolerance problem."""


class ConditionsViolated(FuncCtlError, ValueError):
    pass


class NoAugmentationFound(FuncCtlError, ValueError):
    """Every augmentation candidate failed; ``diagnostics`` lists why."""

    def __init__(self, message, diagnostics=()):
        super().__init__(message)
        self.diagnostics = list(diagnostics)


class NotFunctionalObservable(FuncCtlError, ValueError):
    pass


class IncompatibleDesigns(FuncCtlError, ValueError):
    pass


class StepBudgetExceeded(FuncCtlError, ValueError):
    pass


class SignalUnderflow(FuncCtlError, ValueError):
    pass


class ParseError(FuncCtlError, ValueError):
    """Malformed system file; the message names the offending location."""
