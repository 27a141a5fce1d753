#!/usr/bin/env python3

import numpy as np
import pytest

from metric_causal.estimation import (
    StratifiedDataset,
    estimate_t_alpha,
    geodesic_regression_fit,
    theorem1_check,
)
from metric_causal.estimation.regression import regression_gradient, regression_objective
from metric_causal.geometry import ManifoldKind, ManifoldPoint, TangentVector, build_manifold
from metric_causal.sampling import random_stratified_dataset
from metric_causal.utils.errors import DomainError, ValidationError

from conftest import KINDS, random_cluster, random_tangents

ids = [str(k) for k in KINDS]


def _points(kind, coords):
    return [ManifoldPoint(kind, c) for c in coords]


def _uniform(n):
    return np.full(n, 1.0 / n)


@pytest.mark.parametrize("seed", range(3))
def test_recovers_a_line(seed):
    rng = np.random.default_rng(seed)
    kind = ManifoldKind.euclidean(1)
    xs = rng.uniform(-2.0, 3.0, size=15)
    w = rng.uniform(size=15)
    fit = geodesic_regression_fit(xs, _points(kind, (2.0 + 3.0 * xs)[:, None]), w / w.sum(), 2)
    assert fit.converged
    assert fit.base_point.coords[0] == pytest.approx(2.0, abs=1e-6)
    assert fit.direction.components[0] == pytest.approx(3.0, abs=1e-6)
    assert fit.objective == pytest.approx(0.0, abs=1e-12)


@pytest.mark.parametrize("alpha", [1, 2])
def test_constant_design_returns_the_center(alpha):
    rng = np.random.default_rng(18)
    kind = ManifoldKind.sphere2()
    coords = random_cluster(kind, rng, 10, spread=0.4)
    fit = geodesic_regression_fit(np.zeros(10), _points(kind, coords), _uniform(10), alpha)
    assert np.allclose(fit.direction.components, 0.0)
    manifold = build_manifold(kind)
    value = np.sum(_uniform(10) * manifold.dist(fit.base_point.coords, coords) ** alpha)
    assert fit.objective == pytest.approx(float(value))
    assert fit.converged


def test_recovers_sphere_geodesic():
    rng = np.random.default_rng(19)
    kind = ManifoldKind.sphere2()
    manifold = build_manifold(kind)
    p = manifold.random_point(rng)
    v = manifold.random_tangent(p, rng)
    v = 0.5 * v / manifold.norm(p, v)
    xs = rng.uniform(-1.0, 1.0, size=60)
    fitted = manifold.exp(p, xs[:, None] * v)
    noise = np.stack([manifold.random_tangent(f, rng, scale=0.05) for f in fitted])
    ys = manifold.exp(fitted, noise)
    fit = geodesic_regression_fit(xs, _points(kind, ys), _uniform(60), 2)
    assert fit.converged
    assert manifold.norm(fit.base_point.coords, fit.direction.components) == pytest.approx(0.5, abs=0.05)
    assert manifold.dist(fit.base_point.coords, p) < 0.05


@pytest.mark.parametrize("kind", KINDS, ids=ids)
@pytest.mark.parametrize("alpha", [1, 2])
def test_gradient_matches_finite_differences(kind, alpha):
    rng = np.random.default_rng(20)
    manifold = build_manifold(kind)
    n = 10
    ys = random_cluster(kind, rng, n, spread=0.3)
    xs = rng.uniform(-1.0, 1.0, size=n)
    weights = _uniform(n)
    p = manifold.exp(ys[0], random_tangents(kind, ys[:1], rng, max_norm=0.2))[0]
    v = random_tangents(kind, p[None, :], rng, max_norm=0.3)[0]
    points = _points(kind, ys)
    base = ManifoldPoint(kind, p)
    grad_p, grad_v = regression_gradient(xs, points, weights, base, TangentVector(kind, base, v), alpha)

    def objective(q, u):
        q = ManifoldPoint(kind, q)
        return regression_objective(xs, points, weights, q, TangentVector(kind, q, u), alpha)

    h = 1e-6
    for _ in range(3):
        w = random_tangents(kind, p[None, :], rng, max_norm=1.0)[0]
        moved = [manifold.exp(p, sign * h * w) for sign in (1.0, -1.0)]
        values = [objective(q, manifold.transport(p, q, v)) for q in moved]
        fd_p = (values[0] - values[1]) / (2 * h)
        assert np.isclose(fd_p, manifold.inner(p, grad_p.components, w), rtol=1e-5, atol=1e-7)
        fd_v = (objective(p, v + h * w) - objective(p, v - h * w)) / (2 * h)
        assert np.isclose(fd_v, manifold.inner(p, grad_v.components, w), rtol=1e-5, atol=1e-7)


def test_invalid_inputs():
    kind = ManifoldKind.euclidean(1)
    points = _points(kind, np.zeros((3, 1)))
    with pytest.raises(ValidationError):
        geodesic_regression_fit([0.0, 1.0], points, _uniform(3), 2)
    with pytest.raises(ValidationError):
        geodesic_regression_fit([0.0, 1.0, 2.0], points, [0.5, 0.5, 0.5], 2)
    with pytest.raises(ValidationError):
        geodesic_regression_fit([0.0, 1.0, 2.0], points, _uniform(3), 3)
    mixed = points[:2] + [ManifoldPoint(ManifoldKind.sphere2(), np.array([0.0, 0.0, 1.0]))]
    with pytest.raises(DomainError):
        geodesic_regression_fit([0.0, 1.0, 2.0], mixed, _uniform(3), 2)


@pytest.mark.parametrize("kind", [ManifoldKind.sphere2(), ManifoldKind.euclidean(3)], ids=str)
@pytest.mark.parametrize("alpha", [1, 2])
def test_regression_on_treatment_matches_t_alpha(kind, alpha):
    data = random_stratified_dataset(kind, 40, 2, np.random.default_rng(21))
    report = theorem1_check(data, alpha, beta_t=0.5)
    assert report.gap <= 1e-4
    assert report.passed()
    assert report.t_alpha == pytest.approx(estimate_t_alpha(data, alpha).value)


@pytest.mark.parametrize("alpha", [1, 2])
def test_regression_norm_does_not_depend_on_beta(alpha):
    data = random_stratified_dataset(ManifoldKind.sphere2(), 40, 2, np.random.default_rng(22))
    low = theorem1_check(data, alpha, beta_t=0.3)
    high = theorem1_check(data, alpha, beta_t=0.7)
    assert low.norm_v == pytest.approx(high.norm_v, abs=1e-4)


def test_ordinary_least_squares_slope():
    rng = np.random.default_rng(23)
    n = 30
    z = np.tile([0, 1], n // 2)
    y = 1.0 + 2.5 * z + rng.normal(size=n)
    data = StratifiedDataset(
        kind=ManifoldKind.euclidean(1),
        ids=[str(i) for i in range(n)],
        z=z,
        s=np.ones(n, dtype=int),
        x=np.zeros((n, 0)),
        r=y[:, None],
        lambda_hat=[1.0],
    )
    report = theorem1_check(data, 2, beta_t=0.4)
    slope = np.polyfit(z, y, 1)[0]
    assert report.norm_v == pytest.approx(abs(slope), abs=1e-9)


def test_beta_out_of_range():
    data = random_stratified_dataset(ManifoldKind.euclidean(2), 8, 1, np.random.default_rng(24))
    with pytest.raises(ValidationError):
        theorem1_check(data, 2, beta_t=1.0)


@pytest.mark.slow
@pytest.mark.parametrize("kind", [ManifoldKind.hyperbolic2(), ManifoldKind.kendall(10)], ids=str)
@pytest.mark.parametrize("alpha", [1, 2])
def test_regression_on_treatment_matches_t_alpha_curved(kind, alpha):
    for seed in range(3):
        data = random_stratified_dataset(kind, 40, 2, np.random.default_rng(seed))
        assert theorem1_check(data, alpha, beta_t=0.5).gap <= 1e-4
