#!/usr/bin/env python3

"""Hyperboloid model of the hyperbolic plane."""

import numpy as np

from .base import ZERO_NORM, Manifold
from .build import MANIFOLD_REGISTRY

ORIGIN = np.array([1.0, 0.0, 0.0])


def minkowski(u, v):
    """Lorentzian product -u0 v0 + u1 v1 + u2 v2 over the last axis."""
    return np.sum(u[..., 1:] * v[..., 1:], axis=-1) - u[..., 0] * v[..., 0]


@MANIFOLD_REGISTRY.register()
class Hyperbolic2(Manifold):
    """
    H^2 = {x : -x0^2 + x1^2 + x2^2 = -1, x0 > 0}. The metric on T_pH^2 is the
    restriction of the Minkowski product, which is positive definite there.
    """

    curvature = -1.0

    @property
    def ambient_dim(self):
        return 3

    @property
    def dim(self):
        return 2

    def inner(self, p, u, v):
        return minkowski(u, v)

    def dist(self, p, q):
        cosh = np.maximum(-minkowski(p, q), 1.0)
        w = q - cosh[..., None] * p
        sinh = np.sqrt(np.maximum(minkowski(w, w), 0.0))
        # arcsinh of the tangential part is accurate near 0, arccosh far away.
        return np.where(cosh < 2.0, np.arcsinh(sinh), np.arccosh(cosh))

    def exp(self, p, v):
        norm_v = self.norm(p, v)[..., None]
        direction = self._safe_ratio(v, norm_v)
        out = np.cosh(norm_v) * p + np.sinh(norm_v) * direction
        out = np.where(norm_v < ZERO_NORM, p, out)
        return self.normalize(out)

    def log(self, p, q):
        cosh = np.maximum(-minkowski(p, q), 1.0)[..., None]
        w = q - cosh * p
        sinh = np.sqrt(np.maximum(minkowski(w, w), 0.0))[..., None]
        d = self.dist(p, q)[..., None]
        out = d * self._safe_ratio(w, sinh)
        out = np.where(sinh < ZERO_NORM, 0.0, out)
        return self.proj(p, out)

    def transport(self, p, q, v):
        cosh = -minkowski(p, q)[..., None]
        coef = minkowski(q, v)[..., None] / (1.0 + cosh)
        return v + coef * (p + q)

    def proj(self, p, x):
        return x + minkowski(p, x)[..., None] * p

    def normalize(self, x):
        x = np.array(x, dtype=self.dtype, copy=True)
        x[..., 0] = np.sqrt(1.0 + np.sum(x[..., 1:] ** 2, axis=-1))
        return x

    def belongs(self, x, atol=1e-9):
        x = np.asarray(x)
        if x.shape[-1] != 3:
            return np.zeros(x.shape[:-1], dtype=bool)
        return (np.abs(minkowski(x, x) + 1.0) <= atol) & (x[..., 0] > 0)

    def is_tangent(self, p, v, atol=1e-9):
        # Rounding grows with the coordinates far from the origin.
        scale = np.maximum(1.0, np.linalg.norm(p, axis=-1) * np.linalg.norm(v, axis=-1))
        return np.abs(minkowski(p, v)) <= atol * scale

    def random_point(self, rng, size=None):
        shape = (3,) if size is None else (size, 3)
        x = rng.normal(size=shape)
        return self.normalize(x)

    def tangent_basis(self, p):
        basis = np.array([[0.0, 1.0, 0.0], [0.0, 0.0, 1.0]])
        p = np.asarray(p, dtype=self.dtype)
        return self.transport(ORIGIN, p[None, :], basis)
