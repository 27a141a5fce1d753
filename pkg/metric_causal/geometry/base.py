#!/usr/bin/env python3

"""Interface shared by the array-level manifold implementations."""

import numpy as np

from metric_causal.utils.errors import CutLocusError

# Below this norm a tangent vector is treated as zero.
ZERO_NORM = 1e-12


class Manifold(object):
    """
    Array-level Riemannian geometry. Points and tangent vectors are numpy
    arrays whose last axis holds ambient coordinates; every operation
    broadcasts over the leading axes. Subclasses implement the closed forms.
    """

    dtype = np.float64
    # Distance beyond which log/transport are undefined.
    injectivity_radius = np.inf
    # Sectional curvature of the constant-curvature model.
    curvature = 0.0

    def __init__(self, kind):
        self.kind = kind

    @property
    def ambient_dim(self):
        raise NotImplementedError

    @property
    def dim(self):
        raise NotImplementedError

    def inner(self, p, u, v):
        """Riemannian inner product of tangent vectors u, v at p."""
        return np.sum(u * v, axis=-1)

    def norm(self, p, v):
        return np.sqrt(np.maximum(self.inner(p, v, v), 0.0))

    def dist(self, p, q):
        raise NotImplementedError

    def exp(self, p, v):
        raise NotImplementedError

    def log(self, p, q):
        raise NotImplementedError

    def transport(self, p, q, v):
        """Parallel transport of v from p to q along the minimal geodesic."""
        raise NotImplementedError

    def proj(self, p, x):
        """Orthogonal projection of an ambient vector onto T_pM."""
        raise NotImplementedError

    def normalize(self, x):
        """Pulls an ambient point that drifted numerically back onto M."""
        return x

    def belongs(self, x, atol=1e-9):
        raise NotImplementedError

    def is_tangent(self, p, v, atol=1e-9):
        raise NotImplementedError

    def random_point(self, rng, size=None):
        raise NotImplementedError

    def tangent_basis(self, p):
        """
        Returns an array of shape (dim, ambient_dim) whose rows are an
        orthonormal basis of T_pM for a single point p.
        """
        raise NotImplementedError

    def random_tangent(self, p, rng, scale=1.0):
        """Gaussian tangent vector at a single point p with per-axis sd `scale`."""
        basis = self.tangent_basis(p)
        coeffs = rng.normal(scale=scale, size=basis.shape[0])
        return coeffs @ basis

    def zeros_like_tangent(self, p):
        return np.zeros(np.shape(p), dtype=self.dtype)

    def exp_adjoints(self, p, u, g):
        """
        Adjoints of the differentials of (p, u) -> exp_p(u) applied to a
        tangent vector g at exp_p(u). The p-differential moves p with u
        parallel transported. Both results are tangent at p; computed from
        Jacobi fields of the constant-curvature model.
        """
        back = self.transport(self.exp(p, u), p, g)
        length = self.norm(p, u)[..., None]
        unit = self._safe_ratio(u, length)
        along = self.inner(p, back, unit)[..., None] * unit
        normal = back - along
        c, s = jacobi_coefficients(self.curvature, length)
        adj_p = along + c * normal
        adj_u = along + s * normal
        for direction, curvature in self._curvature_directions(p, unit):
            part = self.inner(p, back, direction)[..., None] * direction
            c_dir, s_dir = jacobi_coefficients(curvature, length)
            adj_p = adj_p + (c_dir - c) * part
            adj_u = adj_u + (s_dir - s) * part
        return adj_p, adj_u

    def _curvature_directions(self, p, unit):
        """Normal directions whose sectional curvature differs from `curvature`."""
        return ()

    @staticmethod
    def _safe_ratio(num, den):
        den = np.where(den < ZERO_NORM, 1.0, den)
        return num / den

    @staticmethod
    def _raise_cut_locus(mask, message):
        if np.any(mask):
            raise CutLocusError(message)


def jacobi_coefficients(curvature, length):
    """
    Values at t=1 of the normal Jacobi field solutions along a geodesic of
    speed `length`: c with J(0)=1, J'(0)=0 and s with J(0)=0, J'(0)=1.
    """
    length = np.asarray(length, dtype=np.float64)
    if curvature == 0:
        ones = np.ones_like(length)
        return ones, ones
    r = np.sqrt(abs(curvature)) * length
    if curvature > 0:
        return np.cos(r), np.sinc(r / np.pi)
    small = r < 1e-8
    safe = np.where(small, 1.0, r)
    return np.cosh(r), np.where(small, 1.0, np.sinh(safe) / safe)
