__author__ = 'drsim developers'

"""
exceptions raised by drsim

all of them derive from ValueError, so code catching ValueError keeps working
"""


class DrsimError(ValueError):
    """
    base class of the package errors
    """


class ConfigurationError(DrsimError):
    """
    malformed configuration document or inconsistent settings
    """


class ValidationError(ConfigurationError):
    """
    input violates a model invariant (negative flexibility, non-finite entries, ...)
    """


class InfeasibleProblemError(DrsimError):
    """
    the price box can not deliver the requested reduction
    """
    def __init__(self, message, max_achievable):
        super(InfeasibleProblemError, self).__init__(message)
        self.max_achievable = max_achievable


class DualCapError(DrsimError):
    """
    the dual optimum sits too close to the cap of the dual interval
    """
    def __init__(self, message, lambda_star, lambda_cap):
        super(DualCapError, self).__init__(message)
        self.lambda_star = lambda_star
        self.lambda_cap = lambda_cap


class MeasurementError(DrsimError):
    """
    the plant returned an unusable measurement
    """


class CertifiedRegimeError(DrsimError):
    """
    step size outside the range where the contraction factor is below one
    """


class DivergenceError(DrsimError):
    """
    iterates left the region guarded by the divergence check
    """


class BoundViolationError(DrsimError):
    """
    empirical error exceeded its theoretical bound
    """
    def __init__(self, message, step):
        super(BoundViolationError, self).__init__(message)
        self.step = step
