#!/usr/bin/env python3

"""Exceptions raised by metric_causal."""


class MetricCausalError(Exception):
    """Base exception for all package errors."""


class ValidationError(MetricCausalError, ValueError):
    """An input violates a documented invariant."""


class DomainError(ValidationError):
    """Operands live on different manifolds."""


class ConfigError(ValidationError):
    """Malformed experiment configuration."""


class IngestionError(ValidationError):
    """Input files are missing, malformed or inconsistent."""

    def __init__(self, message, offenders=()):
        super().__init__(message)
        self.offenders = list(offenders)


class CutLocusError(MetricCausalError, ArithmeticError):
    """The inverse exponential map or transport is undefined for the pair."""


class EstimationError(MetricCausalError, RuntimeError):
    """An estimator cannot be evaluated on the given data."""

    def __init__(self, message, stratum=None):
        super().__init__(message)
        self.stratum = stratum


class EmptyCellError(EstimationError):
    """Some stratum has no treated or no control unit."""


class MatchingError(MetricCausalError, RuntimeError):
    """Matching could not produce any matched set."""


class SeparationError(MatchingError):
    """Treatment is perfectly separated by the covariates."""

    def __init__(self, message, direction=None):
        super().__init__(message)
        self.direction = direction
