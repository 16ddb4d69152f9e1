"""Vector-valued integration against finitely supported measures.

``integrate_vector(mu, f)`` is the weighted sum of the table values of ``f``
in canonical atom order.  Lebesgue measure on ``[0, t]`` is discretized by
the midpoint rule, which drives the fundamental-theorem-of-calculus checks.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Mapping, Sequence

from .chu import PairedSpace
from .errors import BackendMismatch, DimensionMismatch, InvalidParameter, SpaceMismatch, ValidationError
from .expr import Expr, eval_expr
from .linalg import Matrix
from .measures import Measure, product
from .scalar import EXACT, FLOAT, Scalar, scalar_sum
from .spaces import FiniteSpace, Point, product_label, product_space

Vector = tuple[Scalar, ...]


@dataclass(frozen=True, eq=False)
class VectorFn:
    """A tabulated map from a finite space into the carrier of a paired space."""

    domain: FiniteSpace
    codomain: PairedSpace
    table: Mapping[str, Vector]

    def __post_init__(self):
        backend = self.codomain.backend
        frozen = {}
        for x in self.domain.labels:
            if x not in self.table:
                raise ValidationError(f"vector function undefined at {x!r}")
            v = tuple(Scalar.coerce(c, backend) for c in self.table[x])
            if len(v) != self.codomain.n:
                raise DimensionMismatch(
                    f"value at {x!r} has {len(v)} coordinates, codomain has dimension {self.codomain.n}")
            frozen[x] = v
        extra = set(self.table) - set(frozen)
        if extra:
            raise ValidationError(f"vector function defined off its domain at {sorted(extra)}")
        object.__setattr__(self, "table", frozen)

    @classmethod
    def from_callable(cls, domain: FiniteSpace, codomain: PairedSpace, f: Callable[[str], Sequence]) -> VectorFn:
        return cls(domain, codomain, {x: tuple(f(x)) for x in domain.labels})

    @classmethod
    def from_exprs(cls, domain: FiniteSpace, codomain: PairedSpace, exprs: Sequence[Expr]) -> VectorFn:
        """Evaluate one expression per output coordinate at each point's coordinates."""
        if len(exprs) != codomain.n:
            raise DimensionMismatch(f"{len(exprs)} expressions for a {codomain.n}-dimensional codomain")
        return cls(domain, codomain, {
            x: tuple(eval_expr(e, domain.coords(x), codomain.backend) for e in exprs) for x in domain.labels
        })

    def __call__(self, x: str) -> Vector:
        return self.table[x]

    def compose(self, g) -> VectorFn:
        """``self . g`` for a MapTable ``g`` into the domain."""
        if g.target != self.domain:
            raise SpaceMismatch(f"map lands in {g.target.name!r}, function is defined on {self.domain.name!r}")
        return VectorFn(g.source, self.codomain, {x: self.table[g(x)] for x in g.source.labels})

    def then(self, T) -> VectorFn:
        """``T . self`` for a PairedMap ``T`` out of the codomain."""
        if not T.source.equals(self.codomain):
            raise SpaceMismatch("paired map does not start at the codomain")
        return VectorFn(self.domain, T.target, {x: T(v) for x, v in self.table.items()})


def weighted_sum(pairs, dim: int, backend: str) -> Vector:
    pairs = list(pairs)
    return tuple(scalar_sum((w * v[i] for w, v in pairs), backend) for i in range(dim))


def integrate_vector(mu: Measure, f: VectorFn) -> Vector:
    if mu.space != f.domain:
        raise SpaceMismatch(f"measure on {mu.space.name!r}, function on {f.domain.name!r}")
    if mu.backend != f.codomain.backend:
        raise BackendMismatch("measure and codomain use different backends")
    return weighted_sum(((w, f(x)) for x, w in mu.atoms), f.codomain.n, mu.backend)


@dataclass(frozen=True)
class DoubleIntegral:
    order_xy: Vector
    order_yx: Vector
    product_form: Vector

    def agree(self, rel: float | None = None) -> bool:
        vals = (self.order_xy, self.order_yx, self.product_form)
        if rel is None:
            return vals[0] == vals[1] == vals[2]
        return all(a.close_to(b, rel) for v in vals[1:] for a, b in zip(vals[0], v))

    def to_json(self) -> dict:
        return {
            "order_xy": [c.to_json() for c in self.order_xy],
            "order_yx": [c.to_json() for c in self.order_yx],
            "product_form": [c.to_json() for c in self.product_form],
        }


def double_integral(f: VectorFn, mu: Measure, nu: Measure) -> DoubleIntegral:
    """Iterate in both orders and integrate against the product measure.

    ``order_xy`` integrates over x against mu first, then over y against nu.
    """
    X, Y = mu.space, nu.space
    if f.domain != product_space(X, Y):
        raise SpaceMismatch(f"function domain {f.domain.name!r} is not the product {X.name}x{Y.name}")
    V = f.codomain

    def section_y(y):  # x -> f(x, y)
        return VectorFn(X, V, {x: f(product_label(x, y)) for x in X.labels})

    def section_x(x):  # y -> f(x, y)
        return VectorFn(Y, V, {y: f(product_label(x, y)) for y in Y.labels})

    inner_x = VectorFn(Y, V, {y: integrate_vector(mu, section_y(y)) for y in Y.labels})
    inner_y = VectorFn(X, V, {x: integrate_vector(nu, section_x(x)) for x in X.labels})
    return DoubleIntegral(
        order_xy=integrate_vector(nu, inner_x),
        order_yx=integrate_vector(mu, inner_y),
        product_form=integrate_vector(product(mu, nu), f),
    )


# Lebesgue measure and curves -------------------------------------------------------


def _param(value, backend: str) -> Scalar:
    if isinstance(value, Scalar):
        return Scalar.coerce(value, backend)
    if backend == EXACT:
        if isinstance(value, float):
            raise InvalidParameter(f"exact backend needs a rational parameter, got {value!r}")
        return Scalar(value, 0, EXACT)
    return Scalar(float(value), 0.0, FLOAT)


@dataclass(frozen=True)
class QuadratureMeasure:
    """Midpoint discretization of Lebesgue measure on [0, t]: n atoms of weight t/n."""

    t: Scalar
    n: int

    @property
    def backend(self) -> str:
        return self.t.backend

    def atoms(self) -> list[tuple[Scalar, Scalar]]:
        """``(midpoint, weight)`` pairs in increasing order."""
        w = self.t / self.n
        return [(self.t * Fraction(2 * i + 1, 2 * self.n) if self.backend == EXACT
                 else Scalar((i + 0.5) * float(self.t.re) / self.n, 0.0, FLOAT), w)
                for i in range(self.n)]

    def total_mass(self) -> Scalar:
        return scalar_sum((w for _, w in self.atoms()), self.backend)

    def to_measure(self) -> Measure:
        """The same atoms as a Measure on a one-dimensional coordinate space."""
        atoms = self.atoms()
        space = FiniteSpace(f"mid[0,{self.t}]/{self.n}",
                            tuple(Point(f"s{i}", (s,)) for i, (s, _) in enumerate(atoms)))
        return Measure.from_weights(space, [(f"s{i}", w) for i, (_, w) in enumerate(atoms)], self.backend)

    def integrate(self, g: Callable[[Scalar], Sequence[Scalar]], dim: int) -> Vector:
        return weighted_sum(((w, g(s)) for s, w in self.atoms()), dim, self.backend)


def lebesgue_uniform(t, n: int, backend: str = FLOAT) -> QuadratureMeasure:
    if not isinstance(n, int) or isinstance(n, bool) or n < 1:
        raise InvalidParameter(f"subdivision count must be a positive integer, got {n!r}")
    ts = _param(t, backend)
    if not ts.is_real() or ts.re <= 0:
        raise InvalidParameter(f"interval end must be positive, got {t!r}")
    return QuadratureMeasure(ts, n)


@dataclass(frozen=True)
class Curve:
    """Polynomial curve: coordinate i is ``sum_k coeffs[i][k] * s**k``."""

    coeffs: tuple[tuple[Scalar, ...], ...]
    backend: str = FLOAT

    @classmethod
    def from_coeffs(cls, coeffs: Sequence[Sequence], backend: str = FLOAT) -> Curve:
        if not coeffs:
            raise InvalidParameter("a curve needs at least one coordinate")
        return cls(tuple(tuple(_param(c, backend) for c in row) for row in coeffs), backend)

    @property
    def dim(self) -> int:
        return len(self.coeffs)

    def __call__(self, s) -> Vector:
        s = _param(s, self.backend)
        out = []
        for row in self.coeffs:
            acc = Scalar.zero(self.backend)
            for c in reversed(row):
                acc = acc * s + c
            out.append(acc)
        return tuple(out)

    def derivative(self) -> Curve:
        return Curve(tuple(tuple(c * k for k, c in enumerate(row) if k) or (Scalar.zero(self.backend),)
                           for row in self.coeffs), self.backend)

    def to_json(self) -> dict:
        return {"dim": self.dim, "coeffs": [[c.to_json() for c in row] for row in self.coeffs]}


@dataclass(frozen=True)
class FTCResult:
    value: Vector
    reference: Vector
    error: Scalar

    def to_json(self) -> dict:
        return {
            "value": [c.to_json() for c in self.value],
            "reference": [c.to_json() for c in self.reference],
            "error": self.error.to_json(),
        }


def _max_err(a: Vector, b: Vector, backend: str) -> Scalar:
    if backend == EXACT:
        return Scalar(max((abs((x - y).re) for x, y in zip(a, b)), default=Fraction(0)), 0, EXACT)
    return Scalar(max((abs((x - y).to_complex()) for x, y in zip(a, b)), default=0.0), 0.0, FLOAT)


def ftc_forward(curve: Curve, t=1, n: int = 10) -> FTCResult:
    """Midpoint integral of the derivative over [0, t] against curve(t) - curve(0)."""
    ts = _param(t, curve.backend)
    if not (0 < ts.re <= 1):
        raise InvalidParameter(f"t must lie in (0, 1], got {t!r}")
    q = lebesgue_uniform(ts, n, curve.backend)
    d = curve.derivative()
    value = q.integrate(d, curve.dim)
    ref = tuple(a - b for a, b in zip(curve(ts), curve(0)))
    return FTCResult(value, ref, _max_err(value, ref, curve.backend))


def running_integral(curve: Curve, s, n: int) -> Vector:
    """F(s) = midpoint integral of the curve over [0, s] with n atoms."""
    return lebesgue_uniform(s, n, curve.backend).integrate(curve, curve.dim)


def ftc_inverse(curve: Curve, t, h, n: int) -> FTCResult:
    """Central difference quotient of F(s) = integral_0^s curve at t, against curve(t)."""
    ts, hs = _param(t, curve.backend), _param(h, curve.backend)
    if not hs.re > 0:
        raise InvalidParameter(f"step must be positive, got {h!r}")
    if not (0 < (ts - hs).re and (ts + hs).re < 1):
        raise InvalidParameter(f"[t-h, t+h] must lie inside (0, 1), got t={t!r}, h={h!r}")
    hi = running_integral(curve, ts + hs, n)
    lo = running_integral(curve, ts - hs, n)
    value = tuple((a - b) / (hs * 2) for a, b in zip(hi, lo))
    ref = curve(ts)
    return FTCResult(value, ref, _max_err(value, ref, curve.backend))


def free_extend_apply(f: VectorFn, mu: Measure) -> Vector:
    """Apply the linear extension of f (see chu.free_extend) to mu's coordinate vector."""
    from .chu import free_extend

    if mu.space != f.domain:
        raise SpaceMismatch(f"measure on {mu.space.name!r}, function on {f.domain.name!r}")
    return free_extend(f.domain, f.codomain, f.table)(mu.coordinate_vector())


def standard_space(dim: int, backend: str = FLOAT, name: str | None = None) -> PairedSpace:
    """K^dim with the identity pairing."""
    I = Matrix.identity(dim, backend)
    return PairedSpace(I, name or f"K{dim}", None, I)
