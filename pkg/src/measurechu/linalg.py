"""Dense matrices of Scalars: products, Kronecker products, elimination.

Exact matrices are reduced with plain Gauss-Jordan over the Gaussian
rationals.  Float matrices use partial pivoting and treat entries with
``|a| <= 1e-10 * (1 + max|entry|)`` as zero.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

from .errors import BackendMismatch, DimensionMismatch, SingularPairing
from .scalar import EXACT, FLOAT, Scalar

FLOAT_PIVOT_RTOL = 1e-10


@dataclass(frozen=True, eq=False)
class Matrix:
    rows: int
    cols: int
    backend: str
    data: tuple[tuple[Scalar, ...], ...]

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence], backend: str = EXACT, shape: tuple[int, int] | None = None) -> Matrix:
        data = tuple(tuple(Scalar.coerce(v, backend) for v in row) for row in rows)
        r = len(data)
        c = len(data[0]) if data else (shape[1] if shape else 0)
        if shape is not None and (shape[0] != r or (r and shape[1] != c)):
            raise DimensionMismatch(f"matrix data does not match declared shape {shape}")
        if any(len(row) != c for row in data):
            raise DimensionMismatch("ragged matrix rows")
        return cls(r, c, backend, data)

    @classmethod
    def zeros(cls, rows: int, cols: int, backend: str = EXACT) -> Matrix:
        z = Scalar.zero(backend)
        return cls(rows, cols, backend, tuple((z,) * cols for _ in range(rows)))

    @classmethod
    def identity(cls, n: int, backend: str = EXACT) -> Matrix:
        z, o = Scalar.zero(backend), Scalar.one(backend)
        return cls(n, n, backend, tuple(tuple(o if i == j else z for j in range(n)) for i in range(n)))

    @classmethod
    def column(cls, values: Sequence[Scalar], backend: str) -> Matrix:
        return cls(len(values), 1, backend, tuple((Scalar.coerce(v, backend),) for v in values))

    @property
    def shape(self) -> tuple[int, int]:
        return (self.rows, self.cols)

    def __getitem__(self, ij) -> Scalar:
        i, j = ij
        return self.data[i][j]

    def row(self, i: int) -> tuple[Scalar, ...]:
        return self.data[i]

    def col(self, j: int) -> tuple[Scalar, ...]:
        return tuple(r[j] for r in self.data)

    @property
    def T(self) -> Matrix:
        return Matrix(self.cols, self.rows, self.backend,
                      tuple(tuple(self.data[i][j] for i in range(self.rows)) for j in range(self.cols)))

    def _check(self, other: Matrix) -> None:
        if other.backend != self.backend:
            raise BackendMismatch(f"cannot combine {self.backend} and {other.backend} matrices")

    def __matmul__(self, other: Matrix) -> Matrix:
        self._check(other)
        if self.cols != other.rows:
            raise DimensionMismatch(f"cannot multiply {self.shape} by {other.shape}")
        zero = Scalar.zero(self.backend)
        out = []
        ocols = other.cols
        odata = other.data
        for row in self.data:
            acc = [zero] * ocols
            for k, a in enumerate(row):
                if a.is_zero():
                    continue
                orow = odata[k]
                for j in range(ocols):
                    b = orow[j]
                    if not b.is_zero():
                        acc[j] = acc[j] + a * b
            out.append(tuple(acc))
        return Matrix(self.rows, ocols, self.backend, tuple(out))

    def __add__(self, other: Matrix) -> Matrix:
        self._check(other)
        if self.shape != other.shape:
            raise DimensionMismatch(f"cannot add {self.shape} and {other.shape}")
        return Matrix(self.rows, self.cols, self.backend,
                      tuple(tuple(a + b for a, b in zip(r, s)) for r, s in zip(self.data, other.data)))

    def __sub__(self, other: Matrix) -> Matrix:
        return self + other.scale(-1)

    def scale(self, c) -> Matrix:
        return Matrix(self.rows, self.cols, self.backend, tuple(tuple(c * a for a in r) for r in self.data))

    def apply(self, vec: Sequence[Scalar]) -> tuple[Scalar, ...]:
        if len(vec) != self.cols:
            raise DimensionMismatch(f"vector of length {len(vec)} for a {self.shape} matrix")
        zero = Scalar.zero(self.backend)
        out = []
        for row in self.data:
            acc = zero
            for a, v in zip(row, vec):
                if not a.is_zero():
                    acc = acc + a * v
            out.append(acc)
        return tuple(out)

    def kron(self, other: Matrix) -> Matrix:
        """Kronecker product; row index of the result is ``i_self * other.rows + i_other``."""
        self._check(other)
        data = []
        zero_row = (Scalar.zero(self.backend),) * other.cols
        for srow in self.data:
            for orow in other.data:
                row = []
                for a in srow:
                    row.extend(zero_row if a.is_zero() else (a * b for b in orow))
                data.append(tuple(row))
        return Matrix(self.rows * other.rows, self.cols * other.cols, self.backend, tuple(data))

    def select_rows(self, idx: Sequence[int]) -> Matrix:
        return Matrix(len(idx), self.cols, self.backend, tuple(self.data[i] for i in idx))

    def select_cols(self, idx: Sequence[int]) -> Matrix:
        return Matrix(self.rows, len(idx), self.backend, tuple(tuple(r[j] for j in idx) for r in self.data))

    def __eq__(self, other):
        if not isinstance(other, Matrix):
            return NotImplemented
        return self.shape == other.shape and self.backend == other.backend and self.data == other.data

    __hash__ = None

    def close_to(self, other: Matrix, rel: float = 1e-12) -> bool:
        if self.shape != other.shape:
            return False
        return all(a.close_to(b, rel) for r, s in zip(self.data, other.data) for a, b in zip(r, s))

    def equals(self, other: Matrix, rel: float = 1e-12) -> bool:
        """Exact equality on the exact backend, relative closeness on float."""
        if self.backend == EXACT:
            return self == other
        return self.close_to(other, rel)

    def is_zero(self) -> bool:
        return all(a.is_zero() for r in self.data for a in r)

    def to_json(self, complex_field: bool = False) -> list:
        return [[a.to_json(complex_field) for a in r] for r in self.data]

    def max_abs(self) -> float:
        return max((abs(a.to_complex()) for r in self.data for a in r), default=0.0)

    # elimination ----------------------------------------------------------------

    def rref(self) -> tuple[Matrix, tuple[int, ...]]:
        """Reduced row echelon form and the pivot columns (greedy, left to right)."""
        m = [list(r) for r in self.data]
        pivots = []
        tol = FLOAT_PIVOT_RTOL * (1.0 + self.max_abs()) if self.backend == FLOAT else 0.0
        r = 0
        for c in range(self.cols):
            if r >= self.rows:
                break
            p = _pick_pivot(m, r, c, self.backend, tol)
            if p is None:
                if self.backend == FLOAT:
                    for i in range(r, self.rows):
                        m[i][c] = Scalar.zero(FLOAT)
                continue
            m[r], m[p] = m[p], m[r]
            inv = Scalar.one(self.backend) / m[r][c]
            m[r] = [a * inv for a in m[r]]
            m[r][c] = Scalar.one(self.backend)
            for i in range(self.rows):
                if i != r and not m[i][c].is_zero():
                    f = m[i][c]
                    m[i] = [a - f * b for a, b in zip(m[i], m[r])]
                    m[i][c] = Scalar.zero(self.backend)
            pivots.append(c)
            r += 1
        return Matrix(self.rows, self.cols, self.backend, tuple(tuple(row) for row in m)), tuple(pivots)

    def rank(self) -> int:
        return len(self.rref()[1])

    def nullspace(self) -> list[tuple[Scalar, ...]]:
        """Basis of the right kernel {v : M v = 0}, one vector per free column."""
        R, pivots = self.rref()
        free = [c for c in range(self.cols) if c not in pivots]
        zero, one = Scalar.zero(self.backend), Scalar.one(self.backend)
        basis = []
        for f in free:
            v = [zero] * self.cols
            v[f] = one
            for k, p in enumerate(pivots):
                v[p] = -R[k, f]
            basis.append(tuple(v))
        return basis

    def inverse(self) -> Matrix:
        if self.rows != self.cols:
            raise SingularPairing(f"non-square {self.shape} matrix has no inverse")
        n = self.rows
        aug = Matrix(n, 2 * n, self.backend,
                     tuple(r + i for r, i in zip(self.data, Matrix.identity(n, self.backend).data)))
        R, pivots = aug.rref()
        if pivots[:n] != tuple(range(n)) or len(pivots) < n:
            raise SingularPairing("matrix is singular")
        return R.select_cols(range(n, 2 * n))

    def is_invertible(self) -> bool:
        return self.rows == self.cols and self.rank() == self.rows

    def solve_left(self, target: Matrix) -> Matrix:
        """X with ``X @ self == target``, for ``self`` of full row rank."""
        if target.cols != self.cols:
            raise DimensionMismatch("solve_left: column counts differ")
        _, pivots = self.rref()
        if len(pivots) != self.rows:
            raise SingularPairing("solve_left needs a matrix of full row rank")
        X = target.select_cols(pivots) @ self.select_cols(pivots).inverse()
        if not (X @ self).equals(target, 1e-9):
            raise SingularPairing("solve_left: no solution")
        return X


def _pick_pivot(m, r, c, backend, tol):
    if backend == EXACT:
        for i in range(r, len(m)):
            if not m[i][c].is_zero():
                return i
        return None
    best, best_abs = None, tol
    for i in range(r, len(m)):
        a = abs(m[i][c].to_complex())
        if a > best_abs:
            best, best_abs = i, a
    return best


def matrix(rows: Iterable[Iterable], backend: str = EXACT) -> Matrix:
    return Matrix.from_rows([list(r) for r in rows], backend)


def vec_col_major(M: Matrix) -> tuple[Scalar, ...]:
    """Column-major vectorization: entry (i, j) sits at ``i + j * rows``."""
    return tuple(M.data[i][j] for j in range(M.cols) for i in range(M.rows))


def unvec_col_major(v: Sequence[Scalar], rows: int, cols: int, backend: str) -> Matrix:
    if len(v) != rows * cols:
        raise DimensionMismatch(f"vector of length {len(v)} cannot be a {rows}x{cols} matrix")
    return Matrix(rows, cols, backend, tuple(tuple(v[i + j * rows] for j in range(cols)) for i in range(rows)))
