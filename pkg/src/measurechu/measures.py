"""Finitely supported measures and the measure monad on finite carriers.

Unit is :func:`dirac`, functor action is :func:`pushforward`, multiplication is
:func:`flatten`.  Probability measures are the measures with real, non-negative
weights summing to one.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Callable, Iterable, Mapping, Sequence, Union

from .errors import BackendMismatch, EmptySequence, SpaceMismatch, ValidationError
from .expr import Expr, eval_expr
from .scalar import EXACT, FLOAT, Scalar, check_backend, scalar_sum
from .spaces import FiniteSpace, MapTable, product_label, product_space

REAL = "real"
COMPLEX = "complex"
FLOAT_EQ_RTOL = 1e-12
PROB_FLOAT_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class Measure:
    """A canonical finitely supported measure.

    ``atoms`` holds ``(label, weight)`` pairs in the space's point order with
    no zero weights.  Build instances with :meth:`from_weights`.
    """

    space: FiniteSpace
    atoms: tuple[tuple[str, Scalar], ...]
    backend: str = EXACT
    field: str = REAL

    @classmethod
    def from_weights(
        cls,
        space: FiniteSpace,
        weights: Mapping[str, object] | Iterable[tuple[str, object]],
        backend: str | None = None,
        field: str | None = None,
    ) -> Measure:
        items = list(weights.items()) if isinstance(weights, Mapping) else list(weights)
        if backend is None:
            backend = _infer_backend(w for _, w in items)
        check_backend(backend)
        totals: dict[str, Scalar] = {}
        for label, w in items:
            space.index(label)
            s = Scalar.coerce(w, backend)
            totals[label] = totals[label] + s if label in totals else s
        atoms = tuple((x, totals[x]) for x in space.labels if x in totals and not totals[x].is_zero())
        inferred = COMPLEX if any(w.im for _, w in atoms) else REAL
        if field is None:
            field = inferred
        elif field not in (REAL, COMPLEX):
            raise ValidationError(f"field must be 'real' or 'complex', got {field!r}")
        elif field == REAL and inferred == COMPLEX:
            raise ValidationError("real measure with a non-real weight")
        return cls(space, atoms, backend, field)

    @classmethod
    def zero(cls, space: FiniteSpace, backend: str = EXACT, field: str = REAL) -> Measure:
        return cls(space, (), backend, field)

    def weight(self, label: str) -> Scalar:
        self.space.index(label)
        for x, w in self.atoms:
            if x == label:
                return w
        return Scalar.zero(self.backend)

    @property
    def support(self) -> tuple[str, ...]:
        return tuple(x for x, _ in self.atoms)

    def weights(self) -> dict[str, Scalar]:
        return dict(self.atoms)

    def coordinate_vector(self) -> tuple[Scalar, ...]:
        """Weights on the point basis of the space, zeros included."""
        w = self.weights()
        zero = Scalar.zero(self.backend)
        return tuple(w.get(x, zero) for x in self.space.labels)

    def canonical(self) -> Measure:
        return Measure.from_weights(self.space, self.atoms, self.backend, self.field)

    def scale(self, c) -> Measure:
        c = Scalar.coerce(c, self.backend)
        field = COMPLEX if (self.field == COMPLEX or c.im) else REAL
        return Measure.from_weights(self.space, [(x, c * w) for x, w in self.atoms], self.backend, field)

    def __add__(self, other: Measure) -> Measure:
        _same_space(self, other)
        _same_backend(self, other)
        field = COMPLEX if COMPLEX in (self.field, other.field) else REAL
        return Measure.from_weights(self.space, self.atoms + other.atoms, self.backend, field)

    def __sub__(self, other: Measure) -> Measure:
        return self + other.scale(-1)

    def __eq__(self, other):
        if not isinstance(other, Measure):
            return NotImplemented
        # the declared field is a typing annotation, not part of the measure
        if self.backend != other.backend or self.space != other.space:
            return False
        if self.backend == EXACT:
            return self.atoms == other.atoms
        a, b = self.weights(), other.weights()
        zero = Scalar.zero(FLOAT)
        for x in set(a) | set(b):
            wa, wb = a.get(x, zero), b.get(x, zero)
            if abs(wa.to_complex() - wb.to_complex()) > FLOAT_EQ_RTOL * (1 + abs(wb.to_complex())):
                return False
        return True

    __hash__ = None

    def to_float(self) -> Measure:
        """The same measure on the float backend."""
        if self.backend == FLOAT:
            return self
        return Measure.from_weights(self.space, [(x, w.to_complex() if w.im else float(w.re)) for x, w in self.atoms],
                                    FLOAT, self.field)

    def key(self) -> str:
        """Canonical serialization; equal exact measures have equal keys."""
        return json.dumps(measure_to_json(self, inline_space=False), sort_keys=True, separators=(",", ":"))

    def __repr__(self):
        body = ", ".join(f"{x}: {w}" for x, w in self.atoms)
        return f"Measure({self.space.name}; {{{body}}})"


def _infer_backend(weights) -> str:
    for w in weights:
        if isinstance(w, Scalar):
            return w.backend
        if isinstance(w, (float, complex)):
            return FLOAT
    return EXACT


def _same_space(a, b) -> None:
    if a.space != b.space:
        raise SpaceMismatch(f"measures live on different spaces {a.space.name!r} and {b.space.name!r}")


def _same_backend(a, b) -> None:
    if a.backend != b.backend:
        raise BackendMismatch(f"cannot combine {a.backend} and {b.backend} measures")


# monad structure ----------------------------------------------------------------


def dirac(space: FiniteSpace, x: str, backend: str = EXACT) -> Measure:
    space.index(x)
    return Measure(space, ((x, Scalar.one(backend)),), backend, REAL)


PointFunction = Union[Callable[[str], object], Expr, Mapping[str, object]]


def as_point_function(f: PointFunction, space: FiniteSpace, backend: str) -> Callable[[str], Scalar]:
    """Normalize a test function to ``label -> Scalar``.

    Expressions are evaluated at point coordinates; mappings are tables over
    labels; any other callable receives the label.
    """
    if isinstance(f, Expr):
        def g(label: str) -> Scalar:
            return eval_expr(f, space.coords(label), backend)
        return g
    if isinstance(f, Mapping):
        return lambda label: Scalar.coerce(f[label], backend)
    return lambda label: Scalar.coerce(f(label), backend)


def integrate_scalar(mu: Measure, f: PointFunction) -> Scalar:
    g = as_point_function(f, mu.space, mu.backend)
    return scalar_sum((w * g(x) for x, w in mu.atoms), mu.backend)


def pushforward(f: MapTable, mu: Measure) -> Measure:
    if f.source != mu.space:
        raise SpaceMismatch(f"map source {f.source.name!r} is not the measure's space {mu.space.name!r}")
    return Measure.from_weights(f.target, [(f(x), w) for x, w in mu.atoms], mu.backend, mu.field)


def product(mu: Measure, nu: Measure) -> Measure:
    _same_backend(mu, nu)
    field = COMPLEX if COMPLEX in (mu.field, nu.field) else REAL
    space = product_space(mu.space, nu.space)
    atoms = [(product_label(x, y), w * v) for x, w in mu.atoms for y, v in nu.atoms]
    return Measure.from_weights(space, atoms, mu.backend, field)


def total_variation(mu: Measure) -> Scalar:
    """Sum of |w|.  Exact for real-valued exact measures, float otherwise."""
    if mu.backend == EXACT and not any(w.im for _, w in mu.atoms):
        return scalar_sum((w.modulus() for _, w in mu.atoms), EXACT)
    return Scalar(math.fsum(abs(w.to_complex()) for _, w in mu.atoms), 0.0, FLOAT)


def total_mass(mu: Measure) -> Scalar:
    return scalar_sum((w for _, w in mu.atoms), mu.backend)


def is_probability(mu: Measure) -> bool:
    if any(w.im for _, w in mu.atoms):
        return False
    if any(w.re < 0 for _, w in mu.atoms):
        return False
    mass = total_mass(mu)
    if mu.backend == EXACT:
        return mass == 1
    return abs(mass.re - 1.0) <= PROB_FLOAT_TOL


# measures on measures -------------------------------------------------------------

Inner = Union[Measure, "MetaMeasure"]


@dataclass(frozen=True, eq=False)
class MetaMeasure:
    """A finitely supported measure whose points are measures (or meta-measures).

    Atoms are keyed by the canonical serialization of the inner element,
    duplicates are merged by adding weights, zero weights are dropped, and the
    atoms are sorted by key.  ``depth`` is 1 for elements of M(M(X)).
    """

    base: FiniteSpace
    atoms: tuple[tuple[Inner, Scalar], ...]
    backend: str = EXACT
    depth: int = 1

    @classmethod
    def from_atoms(
        cls,
        base: FiniteSpace,
        atoms: Iterable[tuple[Inner, object]],
        backend: str = EXACT,
        depth: int | None = None,
    ) -> MetaMeasure:
        """``depth`` is inferred from the atoms; pass it to keep an empty result typed."""
        merged: dict[str, list] = {}
        for inner, w in atoms:
            inner_depth = inner.depth if isinstance(inner, MetaMeasure) else 0
            if depth is None:
                depth = inner_depth + 1
            elif depth != inner_depth + 1:
                raise ValidationError("meta-measure atoms mix nesting depths")
            inner_base = inner.base if isinstance(inner, MetaMeasure) else inner.space
            if inner_base != base:
                raise SpaceMismatch(f"inner measure on {inner_base.name!r}, expected {base.name!r}")
            if inner.backend != backend:
                raise BackendMismatch("inner measure backend differs from meta-measure backend")
            if isinstance(inner, Measure):
                inner = inner.canonical()
            w = Scalar.coerce(w, backend)
            k = inner.key()
            if k in merged:
                merged[k][1] = merged[k][1] + w
            else:
                merged[k] = [inner, w]
        kept = tuple((merged[k][0], merged[k][1]) for k in sorted(merged) if not merged[k][1].is_zero())
        return cls(base, kept, backend, depth or 1)

    def key(self) -> str:
        return json.dumps(meta_to_json(self), sort_keys=True, separators=(",", ":"))

    def __eq__(self, other):
        if not isinstance(other, MetaMeasure):
            return NotImplemented
        if self.backend == EXACT:
            return self.key() == other.key()
        if (self.base, self.depth, len(self.atoms)) != (other.base, other.depth, len(other.atoms)):
            return False
        return all(a == b and wa.close_to(wb, FLOAT_EQ_RTOL) for (a, wa), (b, wb) in zip(self.atoms, other.atoms))

    __hash__ = None


def dirac_meta(inner: Inner) -> MetaMeasure:
    """The Dirac mass at a measure: the unit at the level of M(X)."""
    base = inner.base if isinstance(inner, MetaMeasure) else inner.space
    return MetaMeasure.from_atoms(base, [(inner, Scalar.one(inner.backend))], inner.backend)


def unit_pushforward(mu: Measure) -> MetaMeasure:
    """(delta_.)_* mu: push mu forward along x -> delta_x."""
    return MetaMeasure.from_atoms(mu.space, [(dirac(mu.space, x, mu.backend), w) for x, w in mu.atoms], mu.backend)


def meta_map(
    fn: Callable[[Inner], Inner],
    pi: MetaMeasure,
    depth: int | None = None,
    base: FiniteSpace | None = None,
) -> MetaMeasure:
    """Pushforward of a meta-measure along a map between measure carriers.

    ``depth`` and ``base`` type the result when ``pi`` is empty and ``fn``
    changes nesting or base space; otherwise they are read off the images.
    """
    images = [(fn(inner), w) for inner, w in pi.atoms]
    if not images:
        return MetaMeasure(base or pi.base, (), pi.backend, depth or pi.depth)
    first = images[0][0]
    base = first.base if isinstance(first, MetaMeasure) else first.space
    return MetaMeasure.from_atoms(base, images, pi.backend)


def flatten(pi: MetaMeasure) -> Inner:
    """Expectation: weight of x is the pi-weighted sum of inner weights at x.

    On M(M(M(X))) this flattens one level and returns a MetaMeasure.
    """
    if pi.depth == 1:
        field = COMPLEX if any(m.field == COMPLEX for m, _ in pi.atoms) or any(w.im for _, w in pi.atoms) else REAL
        acc = [(x, w * v) for m, w in pi.atoms for x, v in m.atoms]
        return Measure.from_weights(pi.base, acc, pi.backend, field)
    return MetaMeasure.from_atoms(pi.base, [(inner, w * v) for m, w in pi.atoms for inner, v in m.atoms], pi.backend,
                                  pi.depth - 1)


# weak convergence ---------------------------------------------------------------------

CONVERGED = "converged"
DIVERGED = "diverged"
INCONCLUSIVE = "inconclusive"


@dataclass(frozen=True)
class WeakConvReport:
    """Deviation table ``deviations[k][n] = |mu_n(f_k) - mu(f_k)|`` and a verdict.

    The verdict is a finite-prefix heuristic over the supplied test family,
    not a proof of weak convergence.
    """

    names: tuple[str, ...]
    deviations: tuple[tuple[float, ...], ...]
    tol: float
    verdict: str

    @property
    def converged(self) -> bool:
        return self.verdict == CONVERGED

    def to_json(self) -> dict:
        return {
            "tests": list(self.names),
            "deviations": [list(d) for d in self.deviations],
            "tol": self.tol,
            "verdict": self.verdict,
        }


def tail_verdict(deviations: Sequence[Sequence[float]], tol: float) -> str:
    """Classify deviation sequences by their last third.

    converged: every deviation in the tail is below ``tol``.
    diverged: some sequence keeps a tail maximum at or above both ``tol`` and
    the maximum over its earlier terms (it is not shrinking).
    inconclusive: otherwise.
    """
    n = len(deviations[0]) if deviations else 0
    if n == 0:
        raise EmptySequence("no measures in the sequence")
    start = n - max(1, math.ceil(n / 3))
    tails = [d[start:] for d in deviations]
    if all(max(t) < tol for t in tails):
        return CONVERGED
    for d, t in zip(deviations, tails):
        head_max = max(d[:start], default=0.0)
        if max(t) >= tol and max(t) >= head_max:
            return DIVERGED
    return INCONCLUSIVE


def weak_convergence_report(
    seq: Sequence[Measure],
    limit: Measure,
    tests: Sequence[PointFunction | tuple[PointFunction, str | None]],
    tol: float,
) -> WeakConvReport:
    if not seq:
        raise EmptySequence("no measures in the sequence")
    for m in seq:
        _same_space(m, limit)
        _same_backend(m, limit)
    if not tests:
        raise ValidationError("at least one test function is required")
    names, rows = [], []
    for k, t in enumerate(tests):
        f, name = t if isinstance(t, tuple) else (t, None)
        if name is None:
            name = str(f) if isinstance(f, Expr) else f"f{k + 1}"
        lim, ms = limit, seq
        if limit.backend == EXACT and isinstance(f, Expr) and f.transcendental:
            lim, ms = limit.to_float(), [m.to_float() for m in seq]
        target = integrate_scalar(lim, f)
        rows.append(tuple(abs((integrate_scalar(m, f) - target).to_complex()) for m in ms))
        names.append(name)
    return WeakConvReport(tuple(names), tuple(rows), float(tol), tail_verdict(rows, tol))


# JSON ------------------------------------------------------------------------------


def measure_to_json(mu: Measure, inline_space: bool = False) -> dict:
    from .serialize import space_to_json

    cf = mu.field == COMPLEX
    return {
        "space": space_to_json(mu.space) if inline_space else mu.space.name,
        "field": mu.field,
        "backend": mu.backend,
        "atoms": [{"label": x, "weight": w.to_json(cf)} for x, w in mu.atoms],
    }


def meta_to_json(pi: MetaMeasure) -> dict:
    return {
        "space": pi.base.name,
        "backend": pi.backend,
        "depth": pi.depth,
        "atoms": [
            {
                "measure": measure_to_json(m) if isinstance(m, Measure) else meta_to_json(m),
                "weight": w.to_json(bool(w.im)),
            }
            for m, w in pi.atoms
        ],
    }
