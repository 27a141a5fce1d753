#!/usr/bin/env python3

"""Typed points and tangent vectors tagged by manifold kind."""

from dataclasses import dataclass, field
import numpy as np

from metric_causal.utils.errors import ValidationError

_TAGS = ("Euclidean", "Sphere2", "Hyperbolic2", "KendallShape")


@dataclass(frozen=True)
class ManifoldKind:
    """
    Identifies a supported manifold. `param` is the dimension for
    `Euclidean` and the number of landmarks K for `KendallShape`; it is 0
    for the two surfaces.
    """

    tag: str
    param: int = 0

    def __post_init__(self):
        if self.tag not in _TAGS:
            raise ValidationError(
                "Unknown manifold '{}', expected one of {}".format(self.tag, _TAGS)
            )
        if self.tag == "Euclidean" and self.param < 1:
            raise ValidationError("Euclidean dimension must be >= 1")
        if self.tag == "KendallShape" and self.param < 3:
            raise ValidationError("Kendall shape space needs K >= 3 landmarks")

    @staticmethod
    def euclidean(dim):
        return ManifoldKind("Euclidean", int(dim))

    @staticmethod
    def sphere2():
        return ManifoldKind("Sphere2")

    @staticmethod
    def hyperbolic2():
        return ManifoldKind("Hyperbolic2")

    @staticmethod
    def kendall(num_landmarks):
        return ManifoldKind("KendallShape", int(num_landmarks))

    @staticmethod
    def parse(name, param=0):
        """
        Parses the lower-case names used in config files: `euclidean`,
        `sphere2`, `hyperbolic2`, `kendall`.
        """
        table = {
            "euclidean": "Euclidean",
            "sphere2": "Sphere2",
            "hyperbolic2": "Hyperbolic2",
            "kendall": "KendallShape",
        }
        key = name.lower()
        if key not in table:
            raise ValidationError("Unknown manifold name '{}'".format(name))
        tag = table[key]
        if tag in ("Sphere2", "Hyperbolic2"):
            param = 0
        return ManifoldKind(tag, int(param))

    def __str__(self):
        return "{}({})".format(self.tag, self.param) if self.param else self.tag


@dataclass(frozen=True, eq=False)
class ManifoldPoint:
    """A point in the ambient representation of its manifold."""

    kind: ManifoldKind
    coords: np.ndarray = field(repr=False)

    def __post_init__(self):
        object.__setattr__(self, "coords", np.asarray(self.coords))


@dataclass(frozen=True, eq=False)
class TangentVector:
    """A tangent vector at `base`, in ambient coordinates."""

    kind: ManifoldKind
    base: ManifoldPoint
    components: np.ndarray = field(repr=False)

    def __post_init__(self):
        object.__setattr__(self, "components", np.asarray(self.components))
