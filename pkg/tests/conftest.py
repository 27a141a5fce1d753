#!/usr/bin/env python3

import numpy as np
import pytest

from metric_causal.geometry import ManifoldKind, build_manifold

KINDS = [
    ManifoldKind.euclidean(3),
    ManifoldKind.sphere2(),
    ManifoldKind.hyperbolic2(),
    ManifoldKind.kendall(10),
]

# Largest tangent norm used by the random geometry cases.
MAX_NORM = {"Euclidean": 3.0, "Sphere2": 0.9 * np.pi, "Hyperbolic2": 3.0, "KendallShape": 0.45 * np.pi}


def random_tangents(kind, p, rng, max_norm=None):
    """Tangent vectors at every row of p with norms uniform in [0, max_norm)."""
    manifold = build_manifold(kind)
    max_norm = MAX_NORM[kind.tag] if max_norm is None else max_norm
    noise = rng.normal(size=p.shape)
    if manifold.dtype == np.complex128:
        noise = noise + 1j * rng.normal(size=p.shape)
    v = manifold.proj(p, noise)
    norms = manifold.norm(p, v)[..., None]
    return v / norms * rng.uniform(0.0, max_norm, size=norms.shape)


def random_cluster(kind, rng, size, spread=0.5):
    """Points scattered around a random center."""
    manifold = build_manifold(kind)
    center = manifold.random_point(rng)
    v = random_tangents(kind, np.broadcast_to(center, (size, manifold.ambient_dim)).copy(), rng, spread)
    return manifold.exp(center, v)


@pytest.fixture
def rng():
    return np.random.default_rng(0)
