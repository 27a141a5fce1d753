#!/usr/bin/env python3

"""The unit two-sphere embedded in R^3."""

import numpy as np
import scipy.linalg

from .base import ZERO_NORM, Manifold
from .build import MANIFOLD_REGISTRY


def _dot(u, v):
    return np.sum(u * v, axis=-1)


@MANIFOLD_REGISTRY.register()
class Sphere2(Manifold):
    """
    S^2 = {x in R^3 : |x| = 1} with the great-circle metric. Tangent vectors
    at p are the ambient vectors orthogonal to p.
    """

    injectivity_radius = np.pi
    curvature = 1.0

    @property
    def ambient_dim(self):
        return 3

    @property
    def dim(self):
        return 2

    def dist(self, p, q):
        # atan2 keeps full precision for nearly coincident and nearly antipodal
        # pairs, where arccos of the clipped dot product does not.
        sin = np.linalg.norm(np.cross(p, q), axis=-1)
        cos = np.clip(_dot(p, q), -1.0, 1.0)
        return np.arctan2(sin, cos)

    def exp(self, p, v):
        norm_v = np.linalg.norm(v, axis=-1)[..., None]
        direction = self._safe_ratio(v, norm_v)
        out = np.cos(norm_v) * p + np.sin(norm_v) * direction
        out = np.where(norm_v < ZERO_NORM, p, out)
        return self.normalize(out)

    def log(self, p, q):
        cos = np.clip(_dot(p, q), -1.0, 1.0)[..., None]
        w = q - cos * p
        sin = np.linalg.norm(w, axis=-1)[..., None]
        self._raise_cut_locus(
            (sin[..., 0] < ZERO_NORM) & (cos[..., 0] < 0),
            "log_map is undefined for antipodal points on S^2",
        )
        theta = np.arctan2(sin, cos)
        out = theta * self._safe_ratio(w, sin)
        out = np.where(sin < ZERO_NORM, 0.0, out)
        return self.proj(p, out)

    def transport(self, p, q, v):
        cos = _dot(p, q)[..., None]
        self._raise_cut_locus(
            (1.0 + cos[..., 0]) < ZERO_NORM,
            "parallel transport between antipodal points is not unique",
        )
        coef = _dot(q, v)[..., None] / (1.0 + cos)
        return v - coef * (p + q)

    def proj(self, p, x):
        return x - _dot(p, x)[..., None] * p

    def normalize(self, x):
        return x / np.linalg.norm(x, axis=-1, keepdims=True)

    def belongs(self, x, atol=1e-9):
        x = np.asarray(x)
        if x.shape[-1] != 3:
            return np.zeros(x.shape[:-1], dtype=bool)
        return np.abs(np.linalg.norm(x, axis=-1) - 1.0) <= atol

    def is_tangent(self, p, v, atol=1e-9):
        return np.abs(_dot(p, v)) <= atol

    def random_point(self, rng, size=None):
        shape = (3,) if size is None else (size, 3)
        return self.normalize(rng.normal(size=shape))

    def tangent_basis(self, p):
        return scipy.linalg.null_space(np.asarray(p)[None, :]).T
