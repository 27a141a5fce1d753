#!/usr/bin/env python3

"""Flat space R^n."""

import numpy as np

from .base import Manifold
from .build import MANIFOLD_REGISTRY


@MANIFOLD_REGISTRY.register()
class Euclidean(Manifold):
    """R^n with the standard metric; exp_p(v) = p + v and log_p(q) = q - p."""

    @property
    def ambient_dim(self):
        return self.kind.param

    @property
    def dim(self):
        return self.kind.param

    def dist(self, p, q):
        return np.linalg.norm(q - p, axis=-1)

    def exp(self, p, v):
        return p + v

    def log(self, p, q):
        return np.broadcast_to(q - p, np.broadcast_shapes(np.shape(p), np.shape(q))).copy()

    def transport(self, p, q, v):
        return np.array(v, dtype=self.dtype, copy=True)

    def proj(self, p, x):
        return np.array(x, dtype=self.dtype, copy=True)

    def belongs(self, x, atol=1e-9):
        x = np.asarray(x)
        return np.all(np.isfinite(x), axis=-1) & (x.shape[-1] == self.ambient_dim)

    def is_tangent(self, p, v, atol=1e-9):
        v = np.asarray(v)
        return np.all(np.isfinite(v), axis=-1)

    def random_point(self, rng, size=None):
        shape = (self.ambient_dim,) if size is None else (size, self.ambient_dim)
        return rng.normal(size=shape)

    def tangent_basis(self, p):
        return np.eye(self.ambient_dim)
