#!/usr/bin/env python3

from .build import MANIFOLD_REGISTRY, build_manifold  # noqa
from .euclidean import Euclidean  # noqa
from .hyperbolic import Hyperbolic2  # noqa
from .kendall import KendallShape  # noqa
from .ops import (  # noqa
    distance,
    exp_map,
    kendall_preshape,
    log_map,
    make_point,
    make_tangent,
    parallel_transport,
    tangent_norm,
)
from .sphere import Sphere2  # noqa
from .types import ManifoldKind, ManifoldPoint, TangentVector  # noqa
