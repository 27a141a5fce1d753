#!/usr/bin/env python3

"""Validated operations on typed points and tangent vectors."""

import numpy as np

from metric_causal.utils.errors import DomainError, ValidationError

from . import kendall
from .build import build_manifold
from .types import ManifoldKind, ManifoldPoint, TangentVector

# Tolerance of the manifold and tangency invariants.
ATOL = 1e-9


def make_point(kind, coords):
    """
    Wraps coordinates as a validated ManifoldPoint.
    Args:
        kind (ManifoldKind): manifold the point belongs to.
        coords (array): ambient coordinates.
    """
    point = ManifoldPoint(kind, np.asarray(coords, dtype=build_manifold(kind).dtype))
    check_point(point)
    return point


def make_tangent(base, components):
    vector = TangentVector(base.kind, base, np.asarray(components, dtype=build_manifold(base.kind).dtype))
    check_tangent(vector)
    return vector


def check_point(point):
    manifold = build_manifold(point.kind)
    coords = point.coords
    if coords.ndim != 1 or coords.shape[0] != manifold.ambient_dim:
        raise ValidationError(
            "{} expects {} ambient coordinates, got shape {}".format(
                point.kind, manifold.ambient_dim, coords.shape
            )
        )
    if not bool(manifold.belongs(coords, atol=ATOL)):
        raise ValidationError("Point {} is not on {}".format(coords, point.kind))


def check_tangent(vector):
    manifold = build_manifold(vector.kind)
    if vector.base.kind != vector.kind:
        raise DomainError("Tangent vector and base point live on different manifolds")
    if vector.components.shape != vector.base.coords.shape:
        raise ValidationError("Tangent vector shape does not match its base point")
    if not bool(manifold.is_tangent(vector.base.coords, vector.components, atol=ATOL)):
        raise ValidationError("Vector is not tangent to {} at its base".format(vector.kind))


def _same_kind(*objects):
    kinds = {obj.kind for obj in objects}
    if len(kinds) != 1:
        raise DomainError(
            "Operands live on different manifolds: {}".format(sorted(str(k) for k in kinds))
        )
    return kinds.pop()


def distance(p, q):
    """
    Geodesic distance d(p, q); on Kendall shape space the distance between
    the shapes after optimal rotation.
    """
    kind = _same_kind(p, q)
    check_point(p)
    check_point(q)
    return float(build_manifold(kind).dist(p.coords, q.coords))


def exp_map(p, v):
    """Point reached at time 1 along the geodesic leaving p with velocity v."""
    kind = _same_kind(p, v)
    check_point(p)
    check_tangent(v)
    if not np.allclose(v.base.coords, p.coords, atol=ATOL, rtol=0.0):
        raise ValidationError("Tangent vector is not based at p")
    return ManifoldPoint(kind, build_manifold(kind).exp(p.coords, v.components))


def log_map(p, q):
    """
    Inverse exponential map: the tangent vector at p whose geodesic reaches q
    at time 1. Raises CutLocusError when q is in the cut locus of p.
    """
    kind = _same_kind(p, q)
    check_point(p)
    check_point(q)
    return TangentVector(kind, p, build_manifold(kind).log(p.coords, q.coords))


def parallel_transport(p, q, v):
    """Transports v from T_pM to T_qM along the minimal geodesic."""
    kind = _same_kind(p, q, v)
    check_point(p)
    check_point(q)
    check_tangent(v)
    moved = build_manifold(kind).transport(p.coords, q.coords, v.components)
    return TangentVector(kind, q, moved)


def tangent_norm(v):
    manifold = build_manifold(v.kind)
    return float(manifold.norm(v.base.coords, v.components))


def kendall_preshape(landmarks):
    """
    Builds the preshape of a K x 2 landmark configuration: centred, unit
    Frobenius norm, encoded as a complex K-vector.
    Args:
        landmarks (array): K x 2 planar coordinates, K >= 3.
    Returns:
        point (ManifoldPoint): point of KendallShape(K).
    """
    landmarks = np.asarray(landmarks, dtype=np.float64)
    if landmarks.ndim != 2 or landmarks.shape[1] != 2:
        raise ValidationError("Landmarks must be a K x 2 matrix, got {}".format(landmarks.shape))
    num_landmarks = landmarks.shape[0]
    if num_landmarks < 3:
        raise ValidationError("Kendall shape space needs K >= 3 landmarks")
    if not np.all(np.isfinite(landmarks)):
        raise ValidationError("Landmarks contain non-finite values")
    centred = landmarks - landmarks.mean(axis=0)
    if np.linalg.norm(centred) < 1e-12:
        raise ValidationError("Degenerate configuration: all landmarks coincide")
    return make_point(ManifoldKind.kendall(num_landmarks), kendall.preshape(landmarks))
