"""Field elements with two numeric backends.

``exact`` scalars are Gaussian rationals (pairs of :class:`fractions.Fraction`),
``float`` scalars are pairs of binary64.  Arithmetic between the two backends
raises :class:`BackendMismatch`; plain ``int`` operands are backend neutral.
"""

from __future__ import annotations

import math
from fractions import Fraction
from numbers import Rational

from .errors import BackendMismatch, DivisionByZero, ValidationError

EXACT = "exact"
FLOAT = "float"
BACKENDS = (EXACT, FLOAT)

_ZERO = Fraction(0)


def parse_rational(text: str) -> Fraction:
    """Parse ``"p"`` or ``"p/q"`` (q > 0) into a Fraction."""
    s = text.strip()
    try:
        if "/" in s:
            num, den = s.split("/")
            q = int(den)
            if q <= 0:
                raise ValueError
            return Fraction(int(num), q)
        return Fraction(int(s))
    except ValueError:
        raise ValidationError(f"not a rational literal: {text!r}") from None


class Scalar:
    __slots__ = ("backend", "re", "im")

    def __init__(self, re=0, im=0, backend: str = EXACT):
        if backend == EXACT:
            self.re = _to_fraction(re)
            self.im = _to_fraction(im)
        elif backend == FLOAT:
            self.re = float(re)
            self.im = float(im)
        else:
            raise ValidationError(f"unknown backend {backend!r}")
        self.backend = backend

    @classmethod
    def exact(cls, re=0, im=0) -> Scalar:
        return cls(re, im, EXACT)

    @classmethod
    def flt(cls, re=0.0, im=0.0) -> Scalar:
        return cls(re, im, FLOAT)

    @classmethod
    def coerce(cls, value, backend: str) -> Scalar:
        """Lift a Python number (or Scalar) into ``backend``."""
        if isinstance(value, Scalar):
            if value.backend != backend:
                raise BackendMismatch(f"expected {backend} scalar, got {value.backend}")
            return value
        if isinstance(value, bool):
            raise ValidationError("booleans are not scalars")
        if isinstance(value, int):
            return cls(value, 0, backend)
        if backend == EXACT:
            if isinstance(value, (Rational, str)):
                return cls(value, 0, EXACT)
            raise BackendMismatch(f"cannot use {type(value).__name__} {value!r} on the exact backend")
        if isinstance(value, complex):
            return cls(value.real, value.imag, FLOAT)
        if isinstance(value, (float, Rational)):
            return cls(float(value), 0.0, FLOAT)
        raise ValidationError(f"not a scalar: {value!r}")

    @classmethod
    def zero(cls, backend: str) -> Scalar:
        return cls(0, 0, backend)

    @classmethod
    def one(cls, backend: str) -> Scalar:
        return cls(1, 0, backend)

    # arithmetic -----------------------------------------------------------

    def _other(self, other) -> Scalar | None:
        if isinstance(other, Scalar):
            if other.backend != self.backend:
                raise BackendMismatch(f"cannot combine {self.backend} and {other.backend} scalars")
            return other
        if isinstance(other, int) and not isinstance(other, bool):
            return Scalar(other, 0, self.backend)
        if isinstance(other, Fraction):
            if self.backend != EXACT:
                raise BackendMismatch("cannot combine a Fraction with a float scalar")
            return Scalar(other, 0, EXACT)
        if isinstance(other, (float, complex)):
            if self.backend != FLOAT:
                raise BackendMismatch("cannot combine a Python float with an exact scalar")
            return Scalar.coerce(other, FLOAT)
        return None

    def _make(self, re, im) -> Scalar:
        s = object.__new__(Scalar)
        s.backend = self.backend
        s.re = re
        s.im = im
        return s

    def __add__(self, other):
        o = self._other(other)
        if o is None:
            return NotImplemented
        return self._make(self.re + o.re, self.im + o.im)

    __radd__ = __add__

    def __sub__(self, other):
        o = self._other(other)
        if o is None:
            return NotImplemented
        return self._make(self.re - o.re, self.im - o.im)

    def __rsub__(self, other):
        o = self._other(other)
        if o is None:
            return NotImplemented
        return o - self

    def __mul__(self, other):
        o = self._other(other)
        if o is None:
            return NotImplemented
        if not self.im and not o.im:
            return self._make(self.re * o.re, self.im * 0)
        return self._make(self.re * o.re - self.im * o.im, self.re * o.im + self.im * o.re)

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._other(other)
        if o is None:
            return NotImplemented
        if o.is_zero():
            raise DivisionByZero("division by zero")
        if not o.im:
            return self._make(self.re / o.re, self.im / o.re)
        if self.backend == FLOAT:
            z = complex(self.re, self.im) / complex(o.re, o.im)
            return self._make(z.real, z.imag)
        d = o.re * o.re + o.im * o.im
        return self._make((self.re * o.re + self.im * o.im) / d, (self.im * o.re - self.re * o.im) / d)

    def __rtruediv__(self, other):
        o = self._other(other)
        if o is None:
            return NotImplemented
        return o / self

    def __neg__(self) -> Scalar:
        return self._make(-self.re, -self.im)

    def __pos__(self) -> Scalar:
        return self

    def __pow__(self, n):
        if not isinstance(n, int) or isinstance(n, bool):
            return NotImplemented
        if n < 0:
            return Scalar.one(self.backend) / (self ** -n)
        result = Scalar.one(self.backend)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def conj(self) -> Scalar:
        return self._make(self.re, -self.im)

    def abs2(self) -> Scalar:
        """|z|^2, exact on the exact backend."""
        return self._make(self.re * self.re + self.im * self.im, self.im * 0)

    def modulus(self) -> Scalar:
        """|z|.  Exact for real exact scalars; complex exact moduli fall back to float."""
        if self.backend == EXACT:
            if not self.im:
                return Scalar(abs(self.re), 0, EXACT)
            return Scalar(math.hypot(self.re, self.im), 0.0, FLOAT)
        return Scalar(math.hypot(self.re, self.im), 0.0, FLOAT)

    # predicates / conversions ------------------------------------------------

    def is_zero(self) -> bool:
        return not self.re and not self.im

    def is_real(self) -> bool:
        return not self.im

    def to_complex(self) -> complex:
        return complex(float(self.re), float(self.im))

    def __float__(self) -> float:
        if self.im:
            raise TypeError("complex scalar has no float value")
        return float(self.re)

    def close_to(self, other, rel: float = 1e-12) -> bool:
        """|a - b| <= rel * (1 + |b|), computed in binary64."""
        o = self._other(other)
        a, b = self.to_complex(), o.to_complex()
        return abs(a - b) <= rel * (1.0 + abs(b))

    def __eq__(self, other):
        if isinstance(other, Scalar):
            return self.backend == other.backend and self.re == other.re and self.im == other.im
        if isinstance(other, (int, Fraction)) and not isinstance(other, bool):
            return self.re == other and not self.im
        return NotImplemented

    def __hash__(self):
        return hash((self.backend, self.re, self.im))

    def __bool__(self):
        return not self.is_zero()

    def __repr__(self):
        return f"Scalar({self}, {self.backend})"

    def __str__(self):
        if self.backend == EXACT:
            if not self.im:
                return str(self.re)
            return f"{self.re}{'+' if self.im >= 0 else '-'}{abs(self.im)}i"
        if not self.im:
            return repr(self.re)
        return repr(complex(self.re, self.im))

    # JSON -------------------------------------------------------------------

    def to_json(self, complex_field: bool = False):
        if self.backend == EXACT:
            if complex_field or self.im:
                return [str(self.re), str(self.im)]
            return str(self.re)
        if complex_field or self.im:
            return [_json_float(self.re), _json_float(self.im)]
        return _json_float(self.re)

    @classmethod
    def from_json(cls, value, backend: str) -> Scalar:
        if isinstance(value, list):
            if len(value) != 2:
                raise ValidationError(f"complex scalar must be [re, im], got {value!r}")
            re, im = (cls.from_json(v, backend) for v in value)
            if re.im or im.im:
                raise ValidationError(f"nested complex scalar {value!r}")
            return cls(re.re, im.re, backend)
        if isinstance(value, str):
            if backend == EXACT:
                return cls(parse_rational(value), 0, EXACT)
            try:
                return cls(float(parse_rational(value)) if "/" in value else float(value), 0.0, FLOAT)
            except ValueError:
                raise ValidationError(f"not a number: {value!r}") from None
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise ValidationError(f"not a scalar: {value!r}")
        if backend == EXACT and isinstance(value, float):
            raise ValidationError(f"exact backend needs \"p/q\" strings, got float {value!r}")
        return cls(value, 0, backend)


def _to_fraction(value) -> Fraction:
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise ValidationError("booleans are not scalars")
    if isinstance(value, (int, Rational)):
        return Fraction(value)
    if isinstance(value, str):
        return parse_rational(value)
    raise BackendMismatch(f"exact backend cannot hold {type(value).__name__} {value!r}")


def _json_float(x: float) -> float:
    if not math.isfinite(x):
        raise ValidationError(f"non-finite float {x!r} cannot be serialized")
    # repr is the shortest round-trip form, never more than 17 significant digits
    return x + 0.0


def exact(re=0, im=0) -> Scalar:
    return Scalar(re, im, EXACT)


def flt(re=0.0, im=0.0) -> Scalar:
    return Scalar(re, im, FLOAT)


def check_backend(backend: str) -> str:
    if backend not in BACKENDS:
        raise ValidationError(f"unknown backend {backend!r}; expected one of {BACKENDS}")
    return backend


def scalar_sum(values, backend: str) -> Scalar:
    """Left-to-right sum; on the float backend uses fsum per component."""
    if backend == FLOAT:
        vals = list(values)
        for v in vals:
            if v.backend != FLOAT:
                raise BackendMismatch("cannot combine exact and float scalars")
        return Scalar(math.fsum(v.re for v in vals), math.fsum(v.im for v in vals), FLOAT)
    total = Scalar(0, 0, EXACT)
    for v in values:
        total = total + v
    return total
