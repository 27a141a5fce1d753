#!/usr/bin/env python3

"""
Kendall's planar shape space. A shape of K landmarks is stored as a preshape:
the complex K-vector x + iy of its landmarks, centred and scaled to unit
norm. Shapes are preshapes modulo rotation (multiplication by a unit complex
number); every operation first rotates its second argument into optimal
alignment with the first, so results only depend on the shapes.
"""

import numpy as np
import scipy.linalg

from .base import ZERO_NORM, Manifold
from .build import MANIFOLD_REGISTRY


def hermitian(u, v):
    """sum(conj(u) * v) over the last axis."""
    return np.sum(np.conj(u) * v, axis=-1)


def preshape(landmarks):
    """
    Centres and scales a (..., K, 2) array of landmarks and returns the complex
    (..., K) preshape. Zero-size configurations come out as NaN; callers
    validate.
    """
    landmarks = np.asarray(landmarks, dtype=np.float64)
    z = landmarks[..., 0] + 1j * landmarks[..., 1]
    z = z - np.mean(z, axis=-1, keepdims=True)
    size = np.linalg.norm(z, axis=-1, keepdims=True)
    with np.errstate(invalid="ignore", divide="ignore"):
        return z / size


def to_landmarks(z):
    """Inverse of the complex encoding: (..., K) complex -> (..., K, 2) real."""
    z = np.asarray(z)
    return np.stack([z.real, z.imag], axis=-1)


def to_flat(z):
    """Flattens preshapes to real 2K-vectors (x1, y1, ..., xK, yK)."""
    return to_landmarks(z).reshape(np.shape(z)[:-1] + (-1,))


@MANIFOLD_REGISTRY.register()
class KendallShape(Manifold):
    """
    Sigma_2^K as the quotient of the preshape sphere by rotations. Tangent
    vectors are horizontal: centred and Hermitian-orthogonal to the base
    preshape. The metric is the real part of the Hermitian product.
    """

    dtype = np.complex128
    injectivity_radius = np.pi / 2
    # Planes spanned by u and iu have curvature 4.
    curvature = 1.0

    @property
    def ambient_dim(self):
        return self.kind.param

    @property
    def dim(self):
        return 2 * self.kind.param - 4

    def inner(self, p, u, v):
        return np.real(hermitian(u, v))

    def align(self, p, q):
        """
        Rotates q into optimal position relative to p. Returns the aligned
        representative, the unit rotation applied and |<p, q>|.
        """
        h = hermitian(q, p)
        modulus = np.abs(h)
        degenerate = modulus < ZERO_NORM
        rotation = np.where(degenerate, 1.0 + 0.0j, h / np.where(degenerate, 1.0, modulus))
        return q * rotation[..., None], rotation, modulus

    def dist(self, p, q):
        aligned, _, cos = self.align(p, q)
        sin = np.linalg.norm(aligned - cos[..., None] * p, axis=-1)
        return np.arctan2(sin, cos)

    def exp(self, p, v):
        norm_v = np.linalg.norm(v, axis=-1)[..., None]
        direction = self._safe_ratio(v, norm_v)
        out = np.cos(norm_v) * p + np.sin(norm_v) * direction
        out = np.where(norm_v < ZERO_NORM, p, out)
        return self.normalize(out)

    def log(self, p, q):
        aligned, _, cos = self.align(p, q)
        self._raise_cut_locus(
            cos < ZERO_NORM, "log_map is undefined at shape distance pi/2"
        )
        w = aligned - cos[..., None] * p
        sin = np.linalg.norm(w, axis=-1)[..., None]
        theta = np.arctan2(sin, cos[..., None])
        out = theta * self._safe_ratio(w, sin)
        out = np.where(sin < ZERO_NORM, 0.0, out)
        return self.proj(p, out)

    def transport(self, p, q, v):
        aligned, rotation, cos = self.align(p, q)
        self._raise_cut_locus(
            cos < ZERO_NORM, "parallel transport is undefined at shape distance pi/2"
        )
        # Transport along the horizontal lift, then move to q's representative.
        coef = hermitian(aligned, v)[..., None] / (1.0 + cos[..., None])
        moved = v - coef * (p + aligned)
        return moved * np.conj(rotation)[..., None]

    def proj(self, p, x):
        x = x - np.mean(x, axis=-1, keepdims=True)
        return x - hermitian(p, x)[..., None] * p

    def normalize(self, x):
        x = x - np.mean(x, axis=-1, keepdims=True)
        return x / np.linalg.norm(x, axis=-1, keepdims=True)

    def belongs(self, x, atol=1e-9):
        x = np.asarray(x)
        if x.shape[-1] != self.ambient_dim:
            return np.zeros(x.shape[:-1], dtype=bool)
        centred = np.abs(np.sum(x, axis=-1)) <= atol
        unit = np.abs(np.linalg.norm(x, axis=-1) - 1.0) <= atol
        return centred & unit

    def is_tangent(self, p, v, atol=1e-9):
        horizontal = np.abs(hermitian(p, v)) <= atol
        centred = np.abs(np.sum(v, axis=-1)) <= atol
        return horizontal & centred

    def random_point(self, rng, size=None):
        shape = (self.ambient_dim,) if size is None else (size, self.ambient_dim)
        z = rng.normal(size=shape) + 1j * rng.normal(size=shape)
        return self.normalize(z)

    def _curvature_directions(self, p, unit):
        return ((1j * unit, 4.0),)

    def tangent_basis(self, p):
        k = self.ambient_dim
        p = np.asarray(p)
        ones = np.ones(k)
        zeros = np.zeros(k)
        # Real form of the four constraints on v = a + ib: Re/Im of sum(v)
        # and Re/Im of <p, v>.
        constraints = np.array(
            [
                np.concatenate([ones, zeros]),
                np.concatenate([zeros, ones]),
                np.concatenate([p.real, p.imag]),
                np.concatenate([-p.imag, p.real]),
            ]
        )
        basis = scipy.linalg.null_space(constraints).T
        return basis[:, :k] + 1j * basis[:, k:]
