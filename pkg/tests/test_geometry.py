#!/usr/bin/env python3

import numpy as np
import pytest

from metric_causal.geometry import (
    ManifoldKind,
    build_manifold,
    distance,
    exp_map,
    kendall_preshape,
    log_map,
    make_point,
    make_tangent,
    parallel_transport,
    tangent_norm,
)
from metric_causal.geometry.kendall import to_landmarks
from metric_causal.utils.errors import CutLocusError, DomainError, ValidationError

from conftest import KINDS, random_tangents

NUM_CASES = 1000
ids = [str(k) for k in KINDS]


@pytest.mark.parametrize("kind", KINDS, ids=ids)
def test_exp_log_round_trip(kind):
    manifold = build_manifold(kind)
    rng = np.random.default_rng(1)
    p = manifold.random_point(rng, size=NUM_CASES)
    v = random_tangents(kind, p, rng)
    q = manifold.exp(p, v)
    assert np.all(manifold.belongs(q, atol=1e-9))
    assert np.allclose(manifold.log(p, q), v, atol=1e-8)
    assert np.allclose(manifold.dist(p, q), manifold.norm(p, v), atol=1e-8)


@pytest.mark.parametrize("kind", KINDS, ids=ids)
def test_metric_axioms(kind):
    manifold = build_manifold(kind)
    rng = np.random.default_rng(2)
    p, q, r = (manifold.random_point(rng, size=NUM_CASES) for _ in range(3))
    d_pq = manifold.dist(p, q)
    assert np.all(d_pq >= 0)
    assert np.allclose(d_pq, manifold.dist(q, p), atol=1e-10)
    assert np.allclose(manifold.dist(p, p), 0.0, atol=1e-8)
    assert np.all(manifold.dist(p, r) <= d_pq + manifold.dist(q, r) + 1e-9)
    if kind.tag == "Sphere2":
        assert np.all(d_pq <= np.pi + 1e-12)
    if kind.tag == "KendallShape":
        assert np.all(d_pq <= np.pi / 2 + 1e-12)


@pytest.mark.parametrize("kind", KINDS, ids=ids)
def test_transport_is_isometry(kind):
    manifold = build_manifold(kind)
    rng = np.random.default_rng(3)
    p = manifold.random_point(rng, size=NUM_CASES)
    q = manifold.exp(p, random_tangents(kind, p, rng))
    u = random_tangents(kind, p, rng, max_norm=2.0)
    v = random_tangents(kind, p, rng, max_norm=2.0)
    tu, tv = manifold.transport(p, q, u), manifold.transport(p, q, v)
    assert np.all(manifold.is_tangent(q, tu, atol=1e-8))
    assert np.allclose(manifold.inner(q, tu, tv), manifold.inner(p, u, v), atol=1e-8)
    assert np.allclose(manifold.transport(p, p, u), u, atol=1e-10)


@pytest.mark.parametrize("kind", KINDS, ids=ids)
def test_geodesics_have_constant_speed(kind):
    manifold = build_manifold(kind)
    rng = np.random.default_rng(4)
    p = manifold.random_point(rng, size=NUM_CASES)
    v = random_tangents(kind, p, rng)
    t, s = rng.uniform(size=(2, NUM_CASES, 1))
    d = manifold.dist(manifold.exp(p, t * v), manifold.exp(p, s * v))
    assert np.allclose(d, np.abs(t - s)[:, 0] * manifold.norm(p, v), atol=1e-8)


@pytest.mark.parametrize("kind", KINDS, ids=ids)
def test_zero_vector_and_self_log(kind):
    manifold = build_manifold(kind)
    rng = np.random.default_rng(5)
    p = manifold.random_point(rng)
    assert np.allclose(manifold.exp(p, np.zeros_like(p)), p)
    assert np.allclose(manifold.log(p, p), 0.0, atol=1e-10)


def test_distance_examples():
    e2 = ManifoldKind.euclidean(2)
    assert distance(make_point(e2, [0, 0]), make_point(e2, [3, 4])) == pytest.approx(5.0)
    s2 = ManifoldKind.sphere2()
    assert distance(make_point(s2, [1, 0, 0]), make_point(s2, [-1, 0, 0])) == pytest.approx(np.pi)
    h2 = ManifoldKind.hyperbolic2()
    far = make_point(h2, [np.cosh(1.0), np.sinh(1.0), 0.0])
    assert distance(make_point(h2, [1, 0, 0]), far) == pytest.approx(1.0, abs=1e-12)


def test_sphere_exp_log_examples():
    s2 = ManifoldKind.sphere2()
    p = make_point(s2, [1, 0, 0])
    q = exp_map(p, make_tangent(p, [0, np.pi, 0]))
    assert np.allclose(q.coords, [-1, 0, 0], atol=1e-12)
    v = log_map(p, make_point(s2, [0, 1, 0]))
    assert np.allclose(v.components, [0, np.pi / 2, 0], atol=1e-12)
    assert tangent_norm(v) == pytest.approx(np.pi / 2)


def test_euclidean_exp_log():
    e3 = ManifoldKind.euclidean(3)
    p = make_point(e3, [1.0, 2.0, 3.0])
    q = make_point(e3, [0.5, -1.0, 2.0])
    assert np.allclose(log_map(p, q).components, q.coords - p.coords)
    assert np.allclose(exp_map(p, make_tangent(p, [1, 1, 1])).coords, [2, 3, 4])


def test_sphere_transport_examples():
    s2 = ManifoldKind.sphere2()
    p, q = make_point(s2, [1, 0, 0]), make_point(s2, [0, 1, 0])
    normal = parallel_transport(p, q, make_tangent(p, [0, 0, 2.5]))
    assert np.allclose(normal.components, [0, 0, 2.5])
    along = parallel_transport(p, q, make_tangent(p, [0, 1.5, 0]))
    assert np.allclose(along.components, [-1.5, 0, 0], atol=1e-12)
    assert np.all(parallel_transport(p, p, make_tangent(p, [0, 1, 2])).components == [0, 1, 2])


def test_antipodal_log_raises():
    s2 = ManifoldKind.sphere2()
    with pytest.raises(CutLocusError):
        log_map(make_point(s2, [0, 0, 1]), make_point(s2, [0, 0, -1]))


def test_invalid_points_and_tangents():
    s2 = ManifoldKind.sphere2()
    with pytest.raises(ValidationError):
        make_point(s2, [1.0, 1.0, 0.0])
    with pytest.raises(ValidationError):
        make_point(ManifoldKind.hyperbolic2(), [-1.0, 0.0, 0.0])
    p = make_point(s2, [1, 0, 0])
    with pytest.raises(ValidationError):
        make_tangent(p, [1.0, 0.0, 0.0])


def test_kind_mismatch_raises():
    p = make_point(ManifoldKind.sphere2(), [1, 0, 0])
    q = make_point(ManifoldKind.hyperbolic2(), [1, 0, 0])
    with pytest.raises(DomainError):
        distance(p, q)


def test_preshape_idempotent_and_invariant():
    rng = np.random.default_rng(6)
    landmarks = rng.normal(size=(8, 2))
    z = kendall_preshape(landmarks)
    again = kendall_preshape(to_landmarks(z.coords))
    assert np.allclose(again.coords, z.coords, atol=1e-12)
    moved = kendall_preshape(5.0 * landmarks + np.array([7.0, -3.0]))
    assert np.allclose(moved.coords, z.coords, atol=1e-12)


def test_rotated_triangles_have_zero_shape_distance():
    triangle = np.array([[0.0, 0.0], [1.0, 0.0], [0.3, 0.8]])
    angle = np.pi / 6
    rotation = np.array([[np.cos(angle), -np.sin(angle)], [np.sin(angle), np.cos(angle)]])
    d = distance(kendall_preshape(triangle), kendall_preshape(triangle @ rotation.T))
    assert d == pytest.approx(0.0, abs=1e-9)


@pytest.mark.parametrize(
    "landmarks",
    [np.zeros((4, 2)), np.ones((5, 2)), np.zeros((2, 2)), np.zeros((4, 3)), np.full((3, 2), np.nan)],
)
def test_degenerate_landmarks_rejected(landmarks):
    with pytest.raises(ValidationError):
        kendall_preshape(landmarks)


def test_manifold_kind_validation():
    with pytest.raises(ValidationError):
        ManifoldKind.kendall(2)
    with pytest.raises(ValidationError):
        ManifoldKind.euclidean(0)
    assert ManifoldKind.parse("Kendall", 12) == ManifoldKind.kendall(12)
    assert build_manifold(ManifoldKind.parse("sphere2")).dim == 2
