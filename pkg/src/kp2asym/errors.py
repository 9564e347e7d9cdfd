"""Exception hierarchy shared by every module.

Each error carries the CLI exit code it maps to: 2 for validation
failures, 3 for resolution or budget failures.
"""


class KP2Error(Exception):
    exit_code = 2


class ValidationError(KP2Error):
    exit_code = 2


class TargetOutsideGrid(ValidationError):
    pass


class ChartViolation(ValidationError):
    pass


class RegimeMismatch(ValidationError):
    pass


class DegenerateRegime(ValidationError):
    pass


class DegenerateHessian(DegenerateRegime):
    pass


class BranchAmbiguity(ValidationError):
    pass


class CapExceeded(ValidationError):
    pass


class StepTooLarge(ValidationError):
    pass


class CalibrationMissing(ValidationError):
    pass


class OracleInconclusive(ValidationError):
    pass


class ResolutionExceeded(KP2Error):
    exit_code = 3


class BudgetExceeded(KP2Error):
    exit_code = 3


class NoConvergence(KP2Error):
    exit_code = 3

    def __init__(self, message, iterations=None, residual=None):
        super().__init__(message)
        self.iterations = iterations
        self.residual = residual
