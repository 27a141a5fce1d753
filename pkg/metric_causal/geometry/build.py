#!/usr/bin/env python3

"""Manifold construction functions."""

import functools
from fvcore.common.registry import Registry

MANIFOLD_REGISTRY = Registry("MANIFOLD")
MANIFOLD_REGISTRY.__doc__ = """
Registry for manifolds.

The registered object will be called with `obj(kind)`, where `kind` is a
`ManifoldKind` whose tag equals the registered class name.
"""


@functools.lru_cache(maxsize=None)
def build_manifold(kind):
    """
    Builds (and caches) the manifold implementation for a kind.
    Args:
        kind (ManifoldKind): the manifold to build.
    Returns:
        manifold (Manifold): stateless implementation of the geometry.
    """
    return MANIFOLD_REGISTRY.get(kind.tag)(kind)
