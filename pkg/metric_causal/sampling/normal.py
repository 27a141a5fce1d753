#!/usr/bin/env python3

"""Riemannian normal distribution on S^2 and H^2."""

import functools
import numpy as np
from scipy.integrate import cumulative_trapezoid

from metric_causal.geometry import build_manifold
from metric_causal.geometry.ops import check_point
from metric_causal.geometry.types import ManifoldPoint
from metric_causal.utils.errors import DomainError, ValidationError

# Points of the grid on which the radial CDF is tabulated.
GRID_SIZE = 4096
_SUPPORTED = ("Sphere2", "Hyperbolic2")


def radial_density(tag, sigma2, r):
    """Unnormalized density of the geodesic radius: exp(-r^2 / 2 sigma^2) J(r)."""
    jacobian = np.sin(r) if tag == "Sphere2" else np.sinh(r)
    return np.exp(-(r ** 2) / (2.0 * sigma2)) * jacobian


def radial_support(tag, sigma2):
    sigma = np.sqrt(sigma2)
    if tag == "Sphere2":
        return min(np.pi, 12.0 * sigma)
    # exp(-r^2/2s^2) sinh(r) peaks near r = s^2 with spread s.
    return sigma2 + 12.0 * sigma


@functools.lru_cache(maxsize=32)
def _radial_table(tag, sigma2):
    grid = np.linspace(0.0, radial_support(tag, sigma2), GRID_SIZE)
    cdf = cumulative_trapezoid(radial_density(tag, sigma2, grid), grid, initial=0.0)
    return grid, cdf / cdf[-1]


def _check_arguments(kind, sigma2):
    if kind.tag not in _SUPPORTED:
        raise ValidationError("Riemannian normal sampling supports {} only, got {}".format(_SUPPORTED, kind))
    if not sigma2 > 0:
        raise ValidationError("sigma2 must be positive")


def riemannian_normal_tangents(kind, mu, sigma2, rng, size):
    """
    Draws `size` tangent vectors at mu (ambient coordinates) whose images
    under exp_mu follow the Riemannian normal law: radius by inverse CDF of
    the tabulated radial density, angle uniform.
    Args:
        kind (ManifoldKind): Sphere2 or Hyperbolic2.
        mu (ndarray): center, ambient coordinates.
        sigma2 (float): dispersion.
        rng (Generator): random stream.
        size (int): number of draws.
    Returns:
        tangents (ndarray): (size, 3) array of tangent vectors at mu.
    """
    _check_arguments(kind, sigma2)
    manifold = build_manifold(kind)
    grid, cdf = _radial_table(kind.tag, float(sigma2))
    radius = np.interp(rng.uniform(size=size), cdf, grid)
    angle = rng.uniform(0.0, 2.0 * np.pi, size=size)
    basis = manifold.tangent_basis(mu)
    coeffs = np.stack([np.cos(angle), np.sin(angle)], axis=-1) * radius[:, None]
    return coeffs @ basis


def sample_riemannian_normal(kind, mu, sigma2, rng, size=None):
    """
    Samples from the density proportional to exp(-d(y, mu)^2 / 2 sigma^2)
    with respect to the Riemannian volume.
    Returns:
        sample (ManifoldPoint or ndarray): one point, or a (size, 3) array of
            coordinates when `size` is given.
    """
    if mu.kind != kind:
        raise DomainError("Center lives on {}, expected {}".format(mu.kind, kind))
    check_point(mu)
    manifold = build_manifold(kind)
    tangents = riemannian_normal_tangents(kind, mu.coords, sigma2, rng, 1 if size is None else size)
    points = manifold.exp(mu.coords, tangents)
    if size is None:
        return ManifoldPoint(kind, points[0])
    return points
