"""Finite carriers and tabulated maps between them."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

from .errors import DuplicateLabel, RaggedCoordinates, SpaceMismatch, UnknownLabel, ValidationError
from .scalar import EXACT, Scalar


@dataclass(frozen=True)
class Point:
    label: str
    coords: tuple[Scalar, ...] | None = None


@dataclass(frozen=True)
class FiniteSpace:
    name: str
    points: tuple[Point, ...]
    _index: dict = field(default=None, init=False, repr=False, compare=False, hash=False)

    def __post_init__(self):
        index = {}
        for i, p in enumerate(self.points):
            if p.label in index:
                raise DuplicateLabel(f"space {self.name!r}: duplicate label {p.label!r}")
            index[p.label] = i
        dims = {len(p.coords) for p in self.points if p.coords is not None}
        if len(dims) > 1 or (dims and any(p.coords is None for p in self.points)):
            raise RaggedCoordinates(f"space {self.name!r}: coordinates of differing dimension")
        backends = {c.backend for p in self.points if p.coords for c in p.coords}
        if len(backends) > 1:
            raise RaggedCoordinates(f"space {self.name!r}: coordinates mix exact and float")
        object.__setattr__(self, "_index", index)

    def __len__(self):
        return len(self.points)

    def __contains__(self, label):
        return label in self._index

    def __iter__(self):
        return iter(self.points)

    @property
    def labels(self) -> tuple[str, ...]:
        return tuple(p.label for p in self.points)

    @property
    def dim(self) -> int | None:
        """Coordinate dimension, or None when points carry no coordinates."""
        if not self.points or self.points[0].coords is None:
            return None
        return len(self.points[0].coords)

    def index(self, label: str) -> int:
        try:
            return self._index[label]
        except KeyError:
            raise UnknownLabel(f"{label!r} is not a point of space {self.name!r}") from None

    def point(self, label: str) -> Point:
        return self.points[self.index(label)]

    def coords(self, label: str) -> tuple[Scalar, ...]:
        c = self.point(label).coords
        if c is None:
            raise UnknownLabel(f"point {label!r} of space {self.name!r} has no coordinates")
        return c

    def same_carrier(self, other: FiniteSpace) -> bool:
        return self.labels == other.labels


def make_space(name: str, specs: Iterable) -> FiniteSpace:
    """Build a space from labels or ``(label, coords)`` pairs.

    Coordinates may be Scalars or Python numbers; ints, Fractions and
    ``"p/q"`` strings go to the exact backend, floats to the float backend.
    """
    points = []
    for item in specs:
        if isinstance(item, Point):
            points.append(item)
        elif isinstance(item, str):
            points.append(Point(item))
        else:
            label, coords = item
            points.append(Point(label, None if coords is None else _coords(coords)))
    return FiniteSpace(name, tuple(points))


def _coords(values: Sequence) -> tuple[Scalar, ...]:
    out = []
    for v in values:
        if isinstance(v, Scalar):
            out.append(v)
        elif isinstance(v, float):
            out.append(Scalar.flt(v))
        else:
            out.append(Scalar(v, 0, EXACT))
    return tuple(out)


def product_label(x: str, y: str) -> str:
    return f"({x},{y})"


def product_space(X: FiniteSpace, Y: FiniteSpace) -> FiniteSpace:
    """Canonical product: labels ``(x,y)`` in lexicographic order of (X, Y) positions.

    Coordinates are concatenated when both factors carry them.
    """
    with_coords = X.dim is not None and Y.dim is not None
    points = []
    for p in X.points:
        for q in Y.points:
            coords = p.coords + q.coords if with_coords else None
            points.append(Point(product_label(p.label, q.label), coords))
    return FiniteSpace(f"{X.name}x{Y.name}", tuple(points))


@dataclass(frozen=True)
class MapTable:
    source: FiniteSpace
    target: FiniteSpace
    assignment: Mapping[str, str]

    def __post_init__(self):
        missing = [x for x in self.source.labels if x not in self.assignment]
        if missing:
            raise UnknownLabel(f"map {self.source.name}->{self.target.name} undefined on {missing}")
        extra = [x for x in self.assignment if x not in self.source]
        if extra:
            raise UnknownLabel(f"map {self.source.name}->{self.target.name}: {extra} not in source")
        for x in self.source.labels:
            if self.assignment[x] not in self.target:
                raise UnknownLabel(
                    f"map {self.source.name}->{self.target.name}: image {self.assignment[x]!r} "
                    f"of {x!r} not in target"
                )
        # freeze a private copy in source order
        object.__setattr__(self, "assignment", {x: self.assignment[x] for x in self.source.labels})

    def __call__(self, label: str) -> str:
        try:
            return self.assignment[label]
        except KeyError:
            raise UnknownLabel(f"{label!r} is not in the source of this map") from None

    def __hash__(self):
        return hash((self.source, self.target, tuple(self.assignment.items())))

    def then(self, g: MapTable) -> MapTable:
        """The composite ``g . self``."""
        if not self.target.same_carrier(g.source):
            raise SpaceMismatch(f"cannot compose {self.target.name} with map from {g.source.name}")
        return MapTable(self.source, g.target, {x: g(self(x)) for x in self.source.labels})


def identity_map(X: FiniteSpace) -> MapTable:
    return MapTable(X, X, {x: x for x in X.labels})


def constant_map(X: FiniteSpace, Y: FiniteSpace, y: str) -> MapTable:
    if y not in Y:
        raise UnknownLabel(f"{y!r} is not a point of {Y.name!r}")
    return MapTable(X, Y, {x: y for x in X.labels})


def swap_map(X: FiniteSpace, Y: FiniteSpace) -> MapTable:
    """(x,y) -> (y,x) between the canonical products X x Y and Y x X."""
    XY, YX = product_space(X, Y), product_space(Y, X)
    return MapTable(
        XY, YX, {product_label(x, y): product_label(y, x) for x in X.labels for y in Y.labels}
    )


def require_label(space: FiniteSpace, label) -> str:
    if not isinstance(label, str):
        raise ValidationError(f"point labels are strings, got {label!r}")
    space.index(label)
    return label
