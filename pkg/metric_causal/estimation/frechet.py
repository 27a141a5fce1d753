#!/usr/bin/env python3

"""Weighted sample L_alpha estimators: Frechet means (alpha=2) and geometric medians (alpha=1)."""

import math
from dataclasses import dataclass, field
from typing import Optional, Tuple
import numpy as np

import metric_causal.utils.logging as logging
from metric_causal.geometry import build_manifold
from metric_causal.geometry.base import ZERO_NORM
from metric_causal.geometry.ops import ATOL, check_point
from metric_causal.geometry.types import ManifoldKind, ManifoldPoint, TangentVector
from metric_causal.utils.errors import DomainError, EstimationError, ValidationError

logger = logging.get_logger(__name__)

ALPHAS = (1, 2)
WEIGHT_ATOL = 1e-12
# Candidate steps are halved at most this many times before giving up.
MAX_HALVINGS = 60
# Rows of the pairwise distance block used to pick the starting point.
_INIT_CHUNK = 256


def check_alpha(alpha):
    if alpha not in ALPHAS:
        raise ValidationError("alpha must be 1 or 2, got {}".format(alpha))


@dataclass(frozen=True)
class SolverOptions:
    """Settings of the Riemannian gradient descent."""

    max_iterations: int = 1000
    step_size: float = 1.0
    gradient_tolerance: float = 1e-9
    median_smoothing: float = 1e-9
    check_uniqueness: bool = False
    uniqueness_starts: int = 5

    def __post_init__(self):
        if self.max_iterations < 1:
            raise ValidationError("max_iterations must be positive")
        if not self.step_size > 0:
            raise ValidationError("step_size must be positive")
        if not self.gradient_tolerance > 0:
            raise ValidationError("gradient_tolerance must be positive")
        if not self.median_smoothing >= 0:
            raise ValidationError("median_smoothing must be nonnegative")
        if self.uniqueness_starts < 1:
            raise ValidationError("uniqueness_starts must be positive")

    @classmethod
    def from_cfg(cls, cfg):
        return cls(
            max_iterations=cfg.SOLVER.MAX_ITERATIONS,
            step_size=cfg.SOLVER.STEP_SIZE,
            gradient_tolerance=cfg.SOLVER.GRADIENT_TOLERANCE,
            median_smoothing=cfg.SOLVER.MEDIAN_SMOOTHING,
            check_uniqueness=cfg.SOLVER.CHECK_UNIQUENESS,
            uniqueness_starts=cfg.SOLVER.UNIQUENESS_STARTS,
        )


@dataclass(frozen=True)
class SolverResult:
    """
    Outcome of one weighted L_alpha solve. `unique` is None unless the
    multi-start diagnostic ran. `objective_history` holds the objective at
    the start and after every accepted step.
    """

    minimizer: ManifoldPoint
    objective_value: float
    iterations: int
    converged: bool
    final_gradient_norm: float
    unique: Optional[bool] = None
    objective_history: Tuple[float, ...] = field(default=(), repr=False)


@dataclass(frozen=True, eq=False)
class WeightedSample:
    """
    Points of one manifold stored as an (N, ambient_dim) array together with
    nonnegative weights summing to one.
    """

    kind: ManifoldKind
    coords: np.ndarray = field(repr=False)
    weights: np.ndarray = field(repr=False)

    def __post_init__(self):
        manifold = build_manifold(self.kind)
        coords = np.asarray(self.coords, dtype=manifold.dtype)
        weights = np.asarray(self.weights, dtype=np.float64)
        if coords.ndim != 2 or coords.shape[1] != manifold.ambient_dim:
            raise ValidationError(
                "Sample coordinates must have shape (N, {}), got {}".format(
                    manifold.ambient_dim, coords.shape
                )
            )
        if coords.shape[0] == 0:
            raise ValidationError("Empty sample")
        if weights.shape != (coords.shape[0],):
            raise ValidationError(
                "Got {} weights for {} points".format(weights.size, coords.shape[0])
            )
        if not np.all(np.isfinite(weights)) or np.any(weights < 0):
            raise ValidationError("Weights must be finite and nonnegative")
        total = math.fsum(weights)
        if abs(total - 1.0) > WEIGHT_ATOL:
            raise ValidationError("Weights sum to {!r}, expected 1".format(total))
        off = np.flatnonzero(~manifold.belongs(coords, atol=ATOL))
        if off.size:
            raise ValidationError(
                "Sample points {} are not on {}".format(off.tolist()[:10], self.kind)
            )
        object.__setattr__(self, "coords", coords)
        object.__setattr__(self, "weights", weights)

    @classmethod
    def from_points(cls, points, weights):
        if len(points) == 0:
            raise ValidationError("Empty sample")
        kinds = {p.kind for p in points}
        if len(kinds) != 1:
            raise DomainError("Sample points live on different manifolds")
        return cls(kinds.pop(), np.stack([p.coords for p in points]), weights)

    @property
    def points(self):
        return [ManifoldPoint(self.kind, c) for c in self.coords]

    def __len__(self):
        return self.coords.shape[0]


def _objective(manifold, coords, weights, p, alpha):
    d = manifold.dist(p, coords)
    return float(np.sum(weights * d ** alpha))


def _direction(manifold, coords, weights, p, alpha, smoothing):
    """
    Returns the (smoothed) Riemannian gradient at p, the preconditioner that
    scales it into a step, and the stationarity measure used as the
    convergence criterion.
    """
    logs = manifold.log(p, coords)
    if alpha == 2:
        grad = -2.0 * np.sum(weights[:, None] * logs, axis=0)
        return grad, 0.5, float(manifold.norm(p, grad))

    d = manifold.dist(p, coords)
    near = d <= max(smoothing, ZERO_NORM)
    smoothed = np.sqrt(d ** 2 + smoothing ** 2)
    far_w = np.where(near, 0.0, weights / np.where(near, 1.0, smoothed))
    grad = -np.sum(far_w[:, None] * logs, axis=0)
    # Points at the iterate add a ball of radius equal to their weight to
    # the subdifferential.
    pinned = float(np.sum(weights[near]))
    grad_norm = float(manifold.norm(p, grad))
    stationarity = max(0.0, grad_norm - pinned)
    if grad_norm < ZERO_NORM or stationarity == 0.0:
        return grad, 0.0, stationarity
    precond = (1.0 - pinned / grad_norm) / np.sum(far_w)
    return grad, precond, stationarity


def _noise(value):
    return 16.0 * np.finfo(np.float64).eps * max(abs(value), 1.0)


def _best_sample_point(manifold, coords, weights, alpha):
    best, best_value = 0, np.inf
    for start in range(0, coords.shape[0], _INIT_CHUNK):
        block = coords[start : start + _INIT_CHUNK]
        d = manifold.dist(block[:, None, :], coords[None, :, :])
        values = (d ** alpha) @ weights
        i = int(np.argmin(values))
        if values[i] < best_value:
            best, best_value = start + i, values[i]
    return coords[best].copy()


def _descend(manifold, coords, weights, alpha, opts, p):
    f = _objective(manifold, coords, weights, p, alpha)
    grad, precond, stationarity = _direction(
        manifold, coords, weights, p, alpha, opts.median_smoothing
    )
    history = [f]
    iterations = 0
    while stationarity > opts.gradient_tolerance and iterations < opts.max_iterations:
        step = opts.step_size * precond
        for _ in range(MAX_HALVINGS):
            candidate = manifold.exp(p, -step * grad)
            f_new = _objective(manifold, coords, weights, candidate, alpha)
            if f_new <= f + _noise(f):
                break
            step *= 0.5
        else:
            logger.debug(
                "Line search stalled at iteration {} (stationarity {:.3e})".format(
                    iterations, stationarity
                )
            )
            break
        p, f = candidate, f_new
        history.append(f)
        iterations += 1
        grad, precond, stationarity = _direction(
            manifold, coords, weights, p, alpha, opts.median_smoothing
        )
    return p, history, iterations, stationarity


def solve_l_alpha(manifold, coords, weights, alpha, opts, init=None):
    """
    Array-level weighted L_alpha solve. Zero-weight points are dropped before
    descending; `init` defaults to the sample point of smallest objective.
    Args:
        manifold (Manifold): geometry of the points.
        coords (ndarray): (N, ambient_dim) sample points.
        weights (ndarray): N nonnegative weights summing to one.
        alpha (int): 1 for the geometric median, 2 for the Frechet mean.
        opts (SolverOptions): solver settings.
        init (ndarray): optional starting point.
    Returns:
        result (SolverResult): minimizer and diagnostics.
    """
    keep = weights > 0
    coords, weights = coords[keep], weights[keep]
    if coords.shape[0] == 0:
        raise ValidationError("Sample has no point with positive weight")
    start = _best_sample_point(manifold, coords, weights, alpha) if init is None else init
    p, history, iterations, stationarity = _descend(manifold, coords, weights, alpha, opts, start)
    f = history[-1]
    converged = stationarity <= opts.gradient_tolerance
    if not converged:
        logger.warning(
            "L_{} solver on {} stopped after {} iterations, gradient norm {:.3e}".format(
                alpha, manifold.kind, iterations, stationarity
            )
        )
    unique = None
    if opts.check_uniqueness and coords.shape[0] > 1:
        unique = _check_uniqueness(manifold, coords, weights, alpha, opts, p, f)
    return SolverResult(
        minimizer=ManifoldPoint(manifold.kind, p),
        objective_value=f,
        iterations=iterations,
        converged=converged,
        final_gradient_norm=stationarity,
        unique=unique,
        objective_history=tuple(history),
    )


def _check_uniqueness(manifold, coords, weights, alpha, opts, p, f):
    rng = np.random.default_rng(0)
    for _ in range(opts.uniqueness_starts):
        base = coords[rng.integers(coords.shape[0])]
        start = manifold.exp(base, manifold.random_tangent(base, rng, scale=0.5))
        other, history, _, _ = _descend(manifold, coords, weights, alpha, opts, start)
        f_other = history[-1]
        if abs(f_other - f) <= 1e-8 and manifold.dist(p, other) > 1e-4:
            logger.warning(
                "Weighted L_{} estimator is not unique: two minimizers {:.3e} apart "
                "share objective {:.10f}".format(alpha, float(manifold.dist(p, other)), f)
            )
            return False
    return True


def weighted_objective(sample, p, alpha):
    """
    Evaluates sum_i w_i d(p, y_i)^alpha.
    Args:
        sample (WeightedSample): weighted points y_i.
        p (ManifoldPoint): evaluation point.
        alpha (int): 1 or 2.
    """
    check_alpha(alpha)
    if p.kind != sample.kind:
        raise DomainError("Point and sample live on different manifolds")
    check_point(p)
    manifold = build_manifold(sample.kind)
    return _objective(manifold, sample.coords, sample.weights, p.coords, alpha)


def weighted_gradient(sample, p, alpha, smoothing=0.0):
    """
    Riemannian gradient of the weighted objective at p: -2 sum w_i log_p(y_i)
    for alpha=2 and -sum w_i log_p(y_i) / sqrt(d_i^2 + smoothing^2) for alpha=1.
    """
    check_alpha(alpha)
    if p.kind != sample.kind:
        raise DomainError("Point and sample live on different manifolds")
    check_point(p)
    manifold = build_manifold(sample.kind)
    logs = manifold.log(p.coords, sample.coords)
    if alpha == 2:
        scale = 2.0 * sample.weights
    else:
        d = manifold.dist(p.coords, sample.coords)
        smoothed = np.sqrt(d ** 2 + smoothing ** 2)
        scale = np.where(smoothed < ZERO_NORM, 0.0, sample.weights / np.maximum(smoothed, ZERO_NORM))
    return TangentVector(sample.kind, p, -np.sum(scale[:, None] * logs, axis=0))


def weighted_l_alpha_estimator(sample, alpha, opts=None, init=None):
    """
    Computes the weighted sample Frechet mean (alpha=2) or geometric median
    (alpha=1) by preconditioned Riemannian gradient descent with halving
    backtracking.
    Args:
        sample (WeightedSample): weighted points.
        alpha (int): 1 or 2.
        opts (SolverOptions): solver settings, defaults if None.
        init (ManifoldPoint): optional starting point.
    Returns:
        result (SolverResult): the converged point is treated as the unique
            estimator; `converged=False` signals a stop before tolerance.
    """
    check_alpha(alpha)
    opts = SolverOptions() if opts is None else opts
    start = None
    if init is not None:
        if init.kind != sample.kind:
            raise DomainError("Initial point and sample live on different manifolds")
        check_point(init)
        start = init.coords
    manifold = build_manifold(sample.kind)
    return solve_l_alpha(manifold, sample.coords, sample.weights, alpha, opts, start)


def stratification_weights(z, s, lambda_hat, group):
    """
    Per-unit weights lambda_s z_i 1{s_i = s} / m_s for the treated group, and
    the analogue with 1 - z_i for the control group.
    Args:
        z (array): treatment flags in {0, 1}.
        s (array): stratum labels in 1..Xi.
        lambda_hat (array): Xi stratum weights summing to one.
        group (string): "treated" or "control".
    Returns:
        weights (ndarray): nonnegative, zero outside the group, summing to
            lambda_s within each stratum.
    """
    z = np.asarray(z)
    s = np.asarray(s)
    lambda_hat = np.asarray(lambda_hat, dtype=np.float64)
    if z.shape != s.shape or z.ndim != 1:
        raise ValidationError("z and s must be vectors of equal length")
    if not np.all((z == 0) | (z == 1)):
        raise ValidationError("Treatment flags must be 0 or 1")
    if group not in ("treated", "control"):
        raise ValidationError("group must be 'treated' or 'control', got {}".format(group))
    num_strata = lambda_hat.shape[0]
    if np.any(lambda_hat <= 0) or np.any(lambda_hat > 1):
        raise ValidationError("Stratum weights must lie in (0, 1]")
    if abs(math.fsum(lambda_hat) - 1.0) > WEIGHT_ATOL:
        raise ValidationError("Stratum weights must sum to 1")
    if np.any((s < 1) | (s > num_strata)):
        raise ValidationError("Stratum labels must lie in 1..{}".format(num_strata))

    member = z == 1 if group == "treated" else z == 0
    counts = np.bincount(s[member].astype(int), minlength=num_strata + 1)[1:]
    empty = np.flatnonzero(counts == 0)
    if empty.size:
        raise EstimationError(
            "Stratum {} has no {} unit".format(int(empty[0]) + 1, group),
            stratum=int(empty[0]) + 1,
        )
    idx = s.astype(int) - 1
    return np.where(member, lambda_hat[idx] / counts[idx], 0.0)
