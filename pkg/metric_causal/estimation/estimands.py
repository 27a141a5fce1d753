#!/usr/bin/env python3

"""Stratified datasets and the T_alpha / naive nested effect estimators."""

import math
from dataclasses import dataclass, field
from typing import Optional, Tuple
import numpy as np

import metric_causal.utils.logging as logging
from metric_causal.geometry import build_manifold
from metric_causal.geometry.ops import ATOL
from metric_causal.geometry.types import ManifoldKind, ManifoldPoint
from metric_causal.utils.errors import DomainError, EmptyCellError, ValidationError

from .frechet import (
    WEIGHT_ATOL,
    SolverOptions,
    SolverResult,
    check_alpha,
    solve_l_alpha,
    stratification_weights,
)

logger = logging.get_logger(__name__)


@dataclass(frozen=True, eq=False)
class Unit:
    """One experimental unit; `potential` holds (r_T, r_C) in simulations."""

    id: str
    z: int
    s: int
    x: np.ndarray
    r: ManifoldPoint
    potential: Optional[Tuple[ManifoldPoint, ManifoldPoint]] = None

    def __post_init__(self):
        object.__setattr__(self, "x", np.asarray(self.x, dtype=np.float64).reshape(-1))
        if self.z not in (0, 1):
            raise ValidationError("Unit {}: z must be 0 or 1".format(self.id))
        if self.potential is not None:
            observed = self.potential[0] if self.z == 1 else self.potential[1]
            if not np.array_equal(observed.coords, self.r.coords):
                raise ValidationError(
                    "Unit {}: observed outcome differs from its potential outcome".format(self.id)
                )


@dataclass(frozen=True, eq=False)
class StratifiedDataset:
    """
    Units stored column-wise: outcomes `r` as an (N, ambient_dim) array,
    covariates `x` as (N, k). Every stratum 1..Xi must hold at least one
    treated and one control unit.
    """

    kind: ManifoldKind
    ids: np.ndarray = field(repr=False)
    z: np.ndarray = field(repr=False)
    s: np.ndarray = field(repr=False)
    x: np.ndarray = field(repr=False)
    r: np.ndarray = field(repr=False)
    lambda_hat: np.ndarray
    r_treated: Optional[np.ndarray] = field(default=None, repr=False)
    r_control: Optional[np.ndarray] = field(default=None, repr=False)

    def __post_init__(self):
        manifold = build_manifold(self.kind)
        r = np.asarray(self.r, dtype=manifold.dtype)
        n = r.shape[0] if r.ndim == 2 else -1
        if r.ndim != 2 or r.shape[1] != manifold.ambient_dim:
            raise ValidationError(
                "Outcomes must have shape (N, {}), got {}".format(manifold.ambient_dim, r.shape)
            )
        ids = np.asarray([str(i) for i in self.ids], dtype=object)
        z = np.asarray(self.z).astype(np.int64)
        s = np.asarray(self.s).astype(np.int64)
        x = np.asarray(self.x, dtype=np.float64)
        if x.ndim == 1:
            x = x.reshape(n, -1)
        lambda_hat = np.asarray(self.lambda_hat, dtype=np.float64).reshape(-1)
        for name, column in (("ids", ids), ("z", z), ("s", s), ("x", x)):
            if column.shape[0] != n:
                raise ValidationError("Column {} has {} rows, expected {}".format(name, column.shape[0], n))
        if len(set(ids.tolist())) != n:
            raise ValidationError("Unit ids must be unique")
        if not np.all((z == 0) | (z == 1)):
            raise ValidationError("Treatment flags must be 0 or 1")
        if lambda_hat.size == 0:
            raise ValidationError("Dataset needs at least one stratum")
        xi = lambda_hat.size
        if np.any((s < 1) | (s > xi)):
            raise ValidationError("Stratum labels must lie in 1..{}".format(xi))
        for group, flag in (("treated", 1), ("control", 0)):
            counts = np.bincount(s[z == flag], minlength=xi + 1)[1:]
            empty = np.flatnonzero(counts == 0)
            if empty.size:
                stratum = int(empty[0]) + 1
                raise EmptyCellError("Stratum {} has no {} unit".format(stratum, group), stratum=stratum)
        if np.any(lambda_hat <= 0):
            raise ValidationError("Stratum weights must be positive")
        if abs(math.fsum(lambda_hat) - 1.0) > WEIGHT_ATOL:
            raise ValidationError("Stratum weights sum to {!r}, expected 1".format(lambda_hat.sum()))
        off = np.flatnonzero(~manifold.belongs(r, atol=ATOL))
        if off.size:
            raise ValidationError("Outcomes of units {} are not on {}".format(ids[off][:10].tolist(), self.kind))
        if (self.r_treated is None) != (self.r_control is None):
            raise ValidationError("Both potential outcomes must be given, or neither")
        if self.r_treated is not None:
            r_treated = np.asarray(self.r_treated, dtype=manifold.dtype)
            r_control = np.asarray(self.r_control, dtype=manifold.dtype)
            observed = np.where((z == 1)[:, None], r_treated, r_control)
            if r_treated.shape != r.shape or not np.array_equal(observed, r):
                raise ValidationError("Observed outcomes disagree with the potential outcomes")
            object.__setattr__(self, "r_treated", r_treated)
            object.__setattr__(self, "r_control", r_control)
        for name, value in (("ids", ids), ("z", z), ("s", s), ("x", x), ("r", r), ("lambda_hat", lambda_hat)):
            object.__setattr__(self, name, value)

    @property
    def xi(self):
        return self.lambda_hat.size

    @property
    def n(self):
        return self.r.shape[0]

    def __len__(self):
        return self.n

    @property
    def m_treated(self):
        """Treated count m_T^s per stratum."""
        return np.bincount(self.s[self.z == 1], minlength=self.xi + 1)[1:]

    @property
    def m_control(self):
        return np.bincount(self.s[self.z == 0], minlength=self.xi + 1)[1:]

    @property
    def units(self):
        out = []
        for i in range(self.n):
            potential = None
            if self.r_treated is not None:
                potential = (
                    ManifoldPoint(self.kind, self.r_treated[i]),
                    ManifoldPoint(self.kind, self.r_control[i]),
                )
            out.append(
                Unit(
                    id=self.ids[i],
                    z=int(self.z[i]),
                    s=int(self.s[i]),
                    x=self.x[i],
                    r=ManifoldPoint(self.kind, self.r[i]),
                    potential=potential,
                )
            )
        return out

    @classmethod
    def from_units(cls, units, lambda_hat=None):
        """
        Builds a dataset from Unit records; `lambda_hat` defaults to the
        empirical stratum shares.
        """
        if len(units) == 0:
            raise ValidationError("Dataset needs at least one unit")
        kinds = {u.r.kind for u in units}
        if len(kinds) != 1:
            raise DomainError("Units have outcomes on different manifolds")
        s = np.array([u.s for u in units])
        if lambda_hat is None:
            lambda_hat = empirical_lambda(s)
        with_potential = all(u.potential is not None for u in units)
        return cls(
            kind=kinds.pop(),
            ids=[u.id for u in units],
            z=[u.z for u in units],
            s=s,
            x=np.stack([u.x for u in units]),
            r=np.stack([u.r.coords for u in units]),
            lambda_hat=lambda_hat,
            r_treated=np.stack([u.potential[0].coords for u in units]) if with_potential else None,
            r_control=np.stack([u.potential[1].coords for u in units]) if with_potential else None,
        )

    def select(self, rows, s, lambda_hat=None):
        """Subset of units (e.g. the matched ones) under new stratum labels."""
        rows = np.asarray(rows)
        s = np.asarray(s)
        return StratifiedDataset(
            kind=self.kind,
            ids=self.ids[rows],
            z=self.z[rows],
            s=s,
            x=self.x[rows],
            r=self.r[rows],
            lambda_hat=empirical_lambda(s) if lambda_hat is None else lambda_hat,
            r_treated=None if self.r_treated is None else self.r_treated[rows],
            r_control=None if self.r_control is None else self.r_control[rows],
        )

    def with_outcomes(self, kind, r):
        """Same design with outcomes re-expressed on another manifold."""
        return StratifiedDataset(
            kind=kind, ids=self.ids, z=self.z, s=self.s, x=self.x, r=r, lambda_hat=self.lambda_hat
        )


def empirical_lambda(s, xi=None):
    """Stratum shares m^s / N."""
    s = np.asarray(s).astype(np.int64)
    xi = int(s.max()) if xi is None else xi
    counts = np.bincount(s, minlength=xi + 1)[1:]
    return counts / float(s.size)


def known_lambda(probabilities):
    """Validates user-supplied stratum probabilities."""
    probabilities = np.asarray(probabilities, dtype=np.float64)
    if np.any(probabilities <= 0) or abs(math.fsum(probabilities) - 1.0) > WEIGHT_ATOL:
        raise ValidationError("Known stratum probabilities must be positive and sum to 1")
    return probabilities


@dataclass(frozen=True)
class EffectEstimate:
    """T_alpha with the two centers it measures and their solver diagnostics."""

    alpha: int
    value: float
    treated_center: ManifoldPoint
    control_center: ManifoldPoint
    solver_diagnostics: Tuple[SolverResult, SolverResult]

    @property
    def converged(self):
        return all(d.converged for d in self.solver_diagnostics)


def effect_from_arrays(manifold, r, z, s, lambda_hat, alpha, opts):
    """
    T_alpha on raw arrays; used by the resampling and permutation loops,
    which cannot build a StratifiedDataset for every draw.
    """
    treated = solve_l_alpha(
        manifold, r, stratification_weights(z, s, lambda_hat, "treated"), alpha, opts
    )
    control = solve_l_alpha(
        manifold, r, stratification_weights(z, s, lambda_hat, "control"), alpha, opts
    )
    value = float(manifold.dist(control.minimizer.coords, treated.minimizer.coords))
    return EffectEstimate(alpha, value, treated.minimizer, control.minimizer, (treated, control))


def estimate_t_alpha(data, alpha, opts=None):
    """
    Distance between the stratification-weighted L_alpha estimators of the
    treated and control groups: the AATE estimator for alpha=2 and the AMTE
    estimator for alpha=1.
    Args:
        data (StratifiedDataset): observed units.
        alpha (int): 1 or 2.
        opts (SolverOptions): solver settings.
    Returns:
        estimate (EffectEstimate): T_alpha and diagnostics.
    """
    check_alpha(alpha)
    opts = SolverOptions() if opts is None else opts
    manifold = build_manifold(data.kind)
    estimate = effect_from_arrays(manifold, data.r, data.z, data.s, data.lambda_hat, alpha, opts)
    if not estimate.converged:
        logger.warning("T_{} = {:.6f} computed from unconverged solves".format(alpha, estimate.value))
    return estimate


def _nested_center(manifold, r, members, s, lambda_hat, alpha, opts):
    centers = []
    for stratum in range(1, lambda_hat.size + 1):
        rows = r[members & (s == stratum)]
        weights = np.full(rows.shape[0], 1.0 / rows.shape[0])
        centers.append(solve_l_alpha(manifold, rows, weights, alpha, opts).minimizer.coords)
    return solve_l_alpha(manifold, np.stack(centers), lambda_hat, alpha, opts)


def naive_nested_estimator(data, alpha, opts=None):
    """
    Per-stratum group centers followed by the lambda-weighted center of those
    centers. Consistent for T_alpha only when Xi=1 or the space is flat; kept
    as a negative control.
    """
    check_alpha(alpha)
    opts = SolverOptions() if opts is None else opts
    manifold = build_manifold(data.kind)
    treated = _nested_center(manifold, data.r, data.z == 1, data.s, data.lambda_hat, alpha, opts)
    control = _nested_center(manifold, data.r, data.z == 0, data.s, data.lambda_hat, alpha, opts)
    value = float(manifold.dist(control.minimizer.coords, treated.minimizer.coords))
    return EffectEstimate(alpha, value, treated.minimizer, control.minimizer, (treated, control))
