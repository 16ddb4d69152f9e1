"""Characteristic functions and positive-definiteness on coordinate spaces.

A measure on a coordinate space is read as a measure on dual vectors phi;
its characteristic function is ``x -> sum_phi w_phi exp(2 pi i <phi, x>)``.
All evaluations run in binary64 complex arithmetic.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import Callable, Sequence

from .errors import DimensionMismatch, DuplicatePoints, InvalidParameter, MissingCoordinates
from .measures import (
    CONVERGED,
    Measure,
    PointFunction,
    WeakConvReport,
    tail_verdict,
    weak_convergence_report,
)

Vec = tuple[float, ...]
TWO_PI = 2.0 * math.pi


def _vec(x) -> Vec:
    return tuple(float(c) for c in x)


def _coords(mu: Measure) -> list[tuple[Vec, complex]]:
    dim = mu.space.dim
    if dim is None:
        raise MissingCoordinates(f"space {mu.space.name!r} has no coordinates")
    return [(tuple(float(c) for c in mu.space.coords(x)), w.to_complex()) for x, w in mu.atoms]


def char_value(atoms: list[tuple[Vec, complex]], x: Vec) -> complex:
    re_terms, im_terms = [], []
    for phi, w in atoms:
        z = w * cmath.exp(1j * TWO_PI * math.fsum(p * q for p, q in zip(phi, x)))
        re_terms.append(z.real)
        im_terms.append(z.imag)
    return complex(math.fsum(re_terms), math.fsum(im_terms))


@dataclass(frozen=True)
class CharEvaluation:
    measure: Measure
    grid: tuple[Vec, ...]
    values: tuple[complex, ...]

    def to_json(self) -> dict:
        return {
            "grid": [list(x) for x in self.grid],
            "values": [[v.real + 0.0, v.imag + 0.0] for v in self.values],
        }


def char_fn(mu: Measure, xs: Sequence[Sequence[float]]) -> CharEvaluation:
    atoms = _coords(mu)
    dim = mu.space.dim
    grid = tuple(_vec(x) for x in xs)
    for x in grid:
        if len(x) != dim:
            raise DimensionMismatch(f"grid point {x} has dimension {len(x)}, measure lives in R^{dim}")
    return CharEvaluation(mu, grid, tuple(char_value(atoms, x) for x in grid))


def char_function(mu: Measure) -> Callable[[Sequence[float]], complex]:
    atoms = _coords(mu)
    dim = mu.space.dim

    def f(x):
        x = _vec(x)
        if len(x) != dim:
            raise DimensionMismatch(f"point {x} has dimension {len(x)}, measure lives in R^{dim}")
        return char_value(atoms, x)

    return f


# positive-definiteness ---------------------------------------------------------------

PSD = "psd"
NOT_PSD = "not_psd"


@dataclass(frozen=True)
class PDReport:
    points: tuple[Vec, ...]
    gram: tuple[tuple[complex, ...], ...]
    verdict: str
    tol: float
    witness: tuple[complex, ...] | None = None
    witness_value: float | None = None
    hermitian_defect: float = 0.0

    @property
    def psd(self) -> bool:
        return self.verdict == PSD

    def to_json(self) -> dict:
        out = {
            "points": [list(p) for p in self.points],
            "gram": [[[z.real + 0.0, z.imag + 0.0] for z in row] for row in self.gram],
            "verdict": self.verdict,
            "tol": self.tol,
            "hermitian_defect": self.hermitian_defect,
        }
        if self.witness is not None:
            out["witness"] = [[z.real + 0.0, z.imag + 0.0] for z in self.witness]
            out["witness_value"] = self.witness_value
        return out


def quadratic_form(M: Sequence[Sequence[complex]], c: Sequence[complex]) -> complex:
    """c^H M c."""
    n = len(c)
    return sum(c[i].conjugate() * M[i][j] * c[j] for i in range(n) for j in range(n))


def gram_matrix(f: Callable[[Vec], complex], points: Sequence[Vec]) -> list[list[complex]]:
    return [[complex(f(tuple(a - b for a, b in zip(p, q)))) for q in points] for p in points]


def pd_check(f: Callable[[Vec], complex] | Measure, points: Sequence[Sequence[float]], tol: float = 1e-9) -> PDReport:
    """Certify or refute positive semidefiniteness of ``M_ij = f(x_i - x_j)``.

    The verdict comes from a diagonally pivoted Hermitian (LDL^H)
    factorization: PSD iff every pivot is ``>= -tol * (1 + max diagonal)`` and
    no off-diagonal mass survives on a vanished pivot.  On failure a witness
    ``c`` with ``c^H M c < 0`` is returned, preferring the sparsest one found:
    a negative diagonal entry, then a negative 2x2 principal minor, then the
    Schur-complement vector from the factorization.
    """
    if tol <= 0:
        raise InvalidParameter(f"tolerance must be positive, got {tol!r}")
    if isinstance(f, Measure):
        f = char_function(f)
    pts = tuple(_vec(p) for p in points)
    if len(set(pts)) != len(pts):
        raise DuplicatePoints("sample points must be distinct")
    M = gram_matrix(f, pts)
    n = len(pts)
    defect = max((abs(M[i][j] - M[j][i].conjugate()) for i in range(n) for j in range(n)), default=0.0)
    # factorize the Hermitian part; the defect is reported separately
    H = [[(M[i][j] + M[j][i].conjugate()) / 2 for j in range(n)] for i in range(n)]
    scale = 1.0 + max((H[i][i].real for i in range(n)), default=0.0)
    thresh = tol * scale
    ok, schur_witness = _pivoted_ldl(H, thresh)
    gram = tuple(tuple(r) for r in M)
    if ok:
        return PDReport(pts, gram, PSD, tol, hermitian_defect=defect)
    c = _sparse_witness(H, thresh) or schur_witness
    value = quadratic_form(M, c).real
    return PDReport(pts, gram, NOT_PSD, tol, tuple(c), value, defect)


def _pivoted_ldl(H, thresh):
    """Return (psd?, witness or None)."""
    n = len(H)
    S = [row[:] for row in H]
    order = list(range(n))
    L = [[0j] * n for _ in range(n)]  # multipliers, in permuted coordinates
    for k in range(n):
        p = max(range(k, n), key=lambda i: S[order[i]][order[i]].real)
        order[k], order[p] = order[p], order[k]
        pk = order[k]
        d = S[pk][pk].real
        if d < -thresh:
            return False, _schur_vector(H, order, k)
        if d <= thresh:
            # vanished pivot: the rest must be (numerically) zero
            for i in order[k:]:
                for j in order[k:]:
                    if abs(S[i][j]) > thresh:
                        return False, _schur_pair_vector(H, order, k, i, j, S)
            return True, None
        for i in order[k + 1:]:
            L[i][pk] = S[i][pk] / d
        for i in order[k + 1:]:
            for j in order[k + 1:]:
                S[i][j] -= L[i][pk] * S[pk][j]
    return True, None


def _lift(H, order, k, tail: dict[int, complex]) -> list[complex]:
    """Extend a vector on the trailing indices so that its quadratic form
    equals the Schur complement's: solve H11 a = -H12 b on the leading block."""
    n = len(H)
    lead = order[:k]
    c = [0j] * n
    for j, v in tail.items():
        c[j] = v
    if lead:
        A = [[H[i][j] for j in lead] for i in lead]
        rhs = [-sum(H[i][j] * v for j, v in tail.items()) for i in lead]
        sol = _solve(A, rhs)
        for i, v in zip(lead, sol):
            c[i] = v
    return c


def _schur_vector(H, order, k):
    return _lift(H, order, k, {order[k]: 1 + 0j})


def _schur_pair_vector(H, order, k, i, j, S):
    if i == j:
        return _lift(H, order, k, {i: 1 + 0j})
    s = S[i][j]
    return _lift(H, order, k, {i: 1 + 0j, j: -(s.conjugate() / abs(s))})


def _solve(A, b):
    n = len(A)
    M = [A[i][:] + [b[i]] for i in range(n)]
    for c in range(n):
        p = max(range(c, n), key=lambda r: abs(M[r][c]))
        M[c], M[p] = M[p], M[c]
        piv = M[c][c]
        for r in range(n):
            if r != c and M[r][c] != 0:
                f = M[r][c] / piv
                M[r] = [a - f * bb for a, bb in zip(M[r], M[c])]
    return [M[i][n] / M[i][i] for i in range(n)]


def _sparse_witness(H, thresh):
    n = len(H)
    for i in range(n):
        if H[i][i].real < -thresh:
            c = [0j] * n
            c[i] = 1 + 0j
            return c
    best = None
    for i in range(n):
        for j in range(i + 1, n):
            a, b, m = H[i][i].real, H[j][j].real, H[i][j]
            det = a * b - abs(m) ** 2
            if det < -thresh * thresh and abs(m) > 0:
                # c = sqrt(b) e_i - (conj(m)/|m|) sqrt(a) e_j gives 2 sqrt(ab) (sqrt(ab) - |m|)
                c = [0j] * n
                c[i] = complex(math.sqrt(max(b, 0.0)))
                c[j] = -(m.conjugate() / abs(m)) * math.sqrt(max(a, 0.0))
                if a <= 0.0 or b <= 0.0:
                    c[i] = 1 + 0j
                    c[j] = -(m.conjugate() / abs(m))
                value = quadratic_form(H, c).real
                if value < 0 and (best is None or value < best[0]):
                    best = (value, c)
    return best[1] if best else None


# Levy diagnostic -------------------------------------------------------------------


@dataclass(frozen=True)
class LevyReport:
    char_report: WeakConvReport
    weak_report: WeakConvReport
    inconsistent: bool

    def to_json(self) -> dict:
        return {
            "char": self.char_report.to_json(),
            "weak": self.weak_report.to_json(),
            "inconsistent": self.inconsistent,
        }


def levy_diagnostic(
    seq: Sequence[Measure],
    limit: Measure,
    grid: Sequence[Sequence[float]],
    tests: Sequence[PointFunction | tuple[PointFunction, str | None]],
    tol: float,
) -> LevyReport:
    """Compare pointwise convergence of characteristic functions on ``grid``
    with weak convergence over ``tests``; flag when the verdicts disagree."""
    weak = weak_convergence_report(seq, limit, tests, tol)
    pts = tuple(_vec(x) for x in grid)
    target = char_fn(limit, pts).values
    rows = []
    evals = [char_fn(m, pts).values for m in seq]
    for k in range(len(pts)):
        rows.append(tuple(abs(e[k] - target[k]) for e in evals))
    names = tuple("x=(" + ",".join(repr(c) for c in p) + ")" for p in pts)
    char = WeakConvReport(names, tuple(rows), float(tol), tail_verdict(rows, tol))
    return LevyReport(char, weak, char.verdict != weak.verdict)


def grid_points(lo: float, hi: float, k: int, dim: int) -> list[Vec]:
    """Uniform k^dim grid on [lo, hi]^dim in lexicographic order."""
    axis = [lo + (hi - lo) * i / (k - 1) for i in range(k)] if k > 1 else [lo]
    pts: list[Vec] = [()]
    for _ in range(dim):
        pts = [p + (a,) for p in pts for a in axis]
    return pts


def injectivity_witness(mu: Measure, nu: Measure, grid: Sequence[Vec], threshold: float = 1e-6) -> Vec | None:
    """First grid point where the characteristic functions differ by more than
    ``threshold``; None when none is found (which proves nothing)."""
    f, g = char_function(mu), char_function(nu)
    for x in grid:
        if abs(f(x) - g(x)) > threshold:
            return x
    return None


__all__ = [
    "CONVERGED",
    "CharEvaluation",
    "LevyReport",
    "PDReport",
    "char_fn",
    "char_function",
    "grid_points",
    "injectivity_witness",
    "levy_diagnostic",
    "pd_check",
    "quadratic_form",
]
