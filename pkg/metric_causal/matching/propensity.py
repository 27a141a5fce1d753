#!/usr/bin/env python3

"""Logistic propensity score model."""

import warnings
from dataclasses import dataclass, field
import numpy as np
from scipy.special import expit, logit
from sklearn.exceptions import ConvergenceWarning
from sklearn.linear_model import LogisticRegression

import metric_causal.utils.logging as logging
from metric_causal.utils.errors import SeparationError, ValidationError

logger = logging.get_logger(__name__)

# Coefficients beyond this size on a sample classified without error mean the
# likelihood has no maximizer.
SEPARATION_BOUND = 30.0
SCORE_FLOOR = 1e-12


@dataclass(frozen=True)
class PropensityModel:
    """Intercept-first coefficients and the fitted scores e(x_i)."""

    coefficients: np.ndarray
    fitted_scores: np.ndarray = field(repr=False)
    iterations: int = 0
    converged: bool = True

    def predict(self, covariates):
        return _clip(expit(_design(covariates) @ self.coefficients))

    @property
    def logit(self):
        return np.log(self.fitted_scores / (1.0 - self.fitted_scores))


def _design(covariates):
    covariates = np.asarray(covariates, dtype=np.float64)
    if covariates.ndim == 1:
        covariates = covariates[:, None]
    return np.column_stack([np.ones(covariates.shape[0]), covariates])


def _clip(scores):
    return np.clip(scores, SCORE_FLOOR, 1.0 - SCORE_FLOOR)


def _check_separation(design, z, beta):
    eta = design @ beta
    treated = z == 1
    complete = np.all((eta > 0) == treated)
    quasi = np.max(np.abs(beta)) > SEPARATION_BOUND and np.all((eta >= 0) == treated)
    if complete or quasi:
        slope = beta[1:]
        norm = np.linalg.norm(slope)
        direction = slope / norm if norm > 0 else slope
        raise SeparationError(
            "Treatment is perfectly separated by covariate direction {}".format(
                np.round(direction, 4).tolist()
            ),
            direction=direction,
        )


def estimate_propensity(covariates, z, max_iterations=100, tolerance=1e-10):
    """
    Unpenalized maximum-likelihood logistic regression of z on the
    covariates. Constant covariate columns get a zero coefficient.
    Args:
        covariates (array): N x k covariate matrix (k may be 0).
        z (array): treatment flags.
        max_iterations (int): solver iteration cap.
        tolerance (float): gradient tolerance of the solver.
    Returns:
        model (PropensityModel): coefficients and scores in (0, 1).
    Raises:
        SeparationError: some direction of the covariates separates the
            treated from the controls.
    """
    z = np.asarray(z, dtype=np.float64).reshape(-1)
    design = _design(covariates)
    n, p = design.shape
    if design.shape[0] != z.size:
        raise ValidationError("Covariates and z have different lengths")
    if n <= p:
        raise ValidationError("Propensity model needs N > k + 1, got N={}, k={}".format(n, p - 1))
    if z.min() == z.max():
        raise ValidationError("Both treatment groups must be nonempty")

    beta = np.zeros(p)
    varying = np.flatnonzero(np.ptp(design[:, 1:], axis=0) > 0)
    iterations, converged = 0, True
    if varying.size == 0:
        beta[0] = logit(z.mean())
    else:
        model = LogisticRegression(
            penalty=None, solver="newton-cholesky", tol=tolerance, max_iter=max_iterations
        )
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always")
            model.fit(design[:, 1 + varying], z.astype(int))
        for warning in caught:
            logger.debug("Propensity fit: {}".format(warning.message))
        beta[0] = model.intercept_[0]
        beta[1 + varying] = model.coef_[0]
        iterations = int(model.n_iter_[0])
        converged = not any(issubclass(w.category, ConvergenceWarning) for w in caught)

    _check_separation(design, z, beta)
    if not converged:
        logger.warning("Propensity fit did not converge in {} iterations".format(max_iterations))
    return PropensityModel(
        coefficients=beta,
        fitted_scores=_clip(expit(design @ beta)),
        iterations=iterations,
        converged=converged,
    )
