"""Finite-dimensional paired spaces (separated-extensional Chu objects over K).

Conventions, fixed everywhere:

* a pair ``(V, V', G)`` pairs ``x`` and ``phi`` as ``x^T G phi``;
* a map ``f: V -> W`` is a matrix ``A`` (``W.n x V.n``) with adjoint ``B``
  (``V.n x W.n``) acting on dual coordinates, subject to ``A^T G_W = G_V B``;
* ``Hom(A, B)`` is coordinatized by the column-major vectorization of the
  matrix of ``f`` (entry ``(i, j)`` at index ``i + j * n_B``); its counter-space
  ``A (x) B'`` has basis ``x_k (x) psi_l`` at index ``l + k * n_B`` (Kronecker
  order), so the pairing of ``[A, B]`` is ``I_{n_A} (x) G_B``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Mapping, Sequence

from .errors import AdjointMismatch, BackendMismatch, DimensionMismatch, SingularPairing, ValidationError
from .linalg import Matrix, unvec_col_major, vec_col_major
from .scalar import EXACT, Scalar
from .spaces import FiniteSpace

ADJOINT_FLOAT_RTOL = 1e-9


@dataclass(frozen=True, eq=False)
class RawPair:
    """A possibly degenerate pairing; input to :func:`separate` and :func:`extensionalize`."""

    pairing: Matrix
    name: str = "R"

    @property
    def n(self) -> int:
        return self.pairing.rows

    @property
    def m(self) -> int:
        return self.pairing.cols

    @property
    def backend(self) -> str:
        return self.pairing.backend

    def is_nondegenerate(self) -> bool:
        return self.n == self.m and self.pairing.rank() == self.n

    def __eq__(self, other):
        if not isinstance(other, (RawPair, PairedSpace)):
            return NotImplemented
        return self.pairing == other.pairing

    __hash__ = None


@dataclass(frozen=True, eq=False)
class PairedSpace:
    """A nondegenerate pair: ``G`` square and invertible.

    ``labels`` names the carrier basis when the pair is free on a finite space.
    Structural equality compares pairing matrices only.
    """

    pairing: Matrix
    name: str = "V"
    labels: tuple[str, ...] | None = field(default=None)
    _inverse: Matrix | None = field(default=None, repr=False)

    def __post_init__(self):
        G = self.pairing
        if G.rows != G.cols:
            raise SingularPairing(f"pairing of {self.name!r} is {G.rows}x{G.cols}, not square")
        if self._inverse is None:
            object.__setattr__(self, "_inverse", G.inverse())
        if self.labels is not None and len(self.labels) != G.rows:
            raise DimensionMismatch("basis labels do not match the dimension")

    @classmethod
    def from_rows(cls, rows, backend: str = EXACT, name: str = "V") -> PairedSpace:
        return cls(Matrix.from_rows(rows, backend), name)

    @property
    def n(self) -> int:
        return self.pairing.rows

    dim = n
    m = n

    @property
    def backend(self) -> str:
        return self.pairing.backend

    @property
    def inverse_pairing(self) -> Matrix:
        return self._inverse

    def pair(self, x: Sequence[Scalar], phi: Sequence[Scalar]) -> Scalar:
        return _dot(x, self.pairing.apply(phi), self.backend)

    def __eq__(self, other):
        if not isinstance(other, (PairedSpace, RawPair)):
            return NotImplemented
        return self.pairing == other.pairing

    __hash__ = None

    def equals(self, other: PairedSpace) -> bool:
        return self.pairing.equals(other.pairing)

    def __repr__(self):
        return f"PairedSpace({self.name}, dim={self.n}, {self.backend})"


def _dot(a, b, backend) -> Scalar:
    acc = Scalar.zero(backend)
    for x, y in zip(a, b):
        acc = acc + x * y
    return acc


def _trusted(G: Matrix, inv: Matrix, name: str) -> PairedSpace:
    return PairedSpace(G, name, None, inv)


def dualizing(backend: str = EXACT) -> PairedSpace:
    """The dualizing pair D = (K, K, [1])."""
    one = Matrix.identity(1, backend)
    return _trusted(one, one, "D")


# maps ----------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class PairedMap:
    source: PairedSpace
    target: PairedSpace
    matrix: Matrix
    adjoint: Matrix

    def __post_init__(self):
        if self.source.backend != self.target.backend:
            raise BackendMismatch("paired map between spaces on different backends")
        if self.matrix.shape != (self.target.n, self.source.n):
            raise DimensionMismatch(
                f"map matrix is {self.matrix.shape}, expected {(self.target.n, self.source.n)}")
        if self.adjoint.shape != (self.source.n, self.target.n):
            raise DimensionMismatch(
                f"adjoint matrix is {self.adjoint.shape}, expected {(self.source.n, self.target.n)}")
        lhs = self.matrix.T @ self.target.pairing
        rhs = self.source.pairing @ self.adjoint
        if not lhs.equals(rhs, ADJOINT_FLOAT_RTOL):
            raise AdjointMismatch(
                f"A^T G_target != G_source B for map {self.source.name} -> {self.target.name}")

    @classmethod
    def from_matrix(cls, source: PairedSpace, target: PairedSpace, A: Matrix) -> PairedMap:
        """The unique paired map with carrier matrix ``A``: ``B = G_s^-1 A^T G_t``."""
        if A.shape != (target.n, source.n):
            raise DimensionMismatch(f"map matrix is {A.shape}, expected {(target.n, source.n)}")
        return cls(source, target, A, source.inverse_pairing @ (A.T @ target.pairing))

    def __call__(self, x: Sequence[Scalar]) -> tuple[Scalar, ...]:
        return self.matrix.apply(x)

    def then(self, g: PairedMap) -> PairedMap:
        """``g . self``."""
        if not self.target.equals(g.source):
            raise DimensionMismatch(f"cannot compose: {self.target.name} is not {g.source.name}")
        return PairedMap(self.source, g.target, g.matrix @ self.matrix, self.adjoint @ g.adjoint)

    def __matmul__(self, other: PairedMap) -> PairedMap:
        return other.then(self)

    def __eq__(self, other):
        if not isinstance(other, PairedMap):
            return NotImplemented
        return (self.source == other.source and self.target == other.target
                and self.matrix == other.matrix and self.adjoint == other.adjoint)

    __hash__ = None

    def equals(self, other: PairedMap) -> bool:
        return (self.source.equals(other.source) and self.target.equals(other.target)
                and self.matrix.equals(other.matrix) and self.adjoint.equals(other.adjoint))

    def expected_adjoint(self) -> Matrix:
        return self.source.inverse_pairing @ (self.matrix.T @ self.target.pairing)


def identity(A: PairedSpace) -> PairedMap:
    I = Matrix.identity(A.n, A.backend)
    return PairedMap(A, A, I, I)


# duality -------------------------------------------------------------------------


def dual(A: PairedSpace) -> PairedSpace:
    """Swap carrier and counter-space: pairing ``G^T``."""
    return PairedSpace(A.pairing.T, _dual_name(A.name), None, A.inverse_pairing.T)


def _dual_name(name: str) -> str:
    return name[:-1] if name.endswith("*") else name + "*"


def dual_map(f: PairedMap) -> PairedMap:
    """f*: W* -> V*, carrier matrix B and adjoint A."""
    return PairedMap(dual(f.target), dual(f.source), f.adjoint, f.matrix)


def _require_same_backend(*spaces: PairedSpace) -> str:
    backends = {s.backend for s in spaces}
    if len(backends) != 1:
        raise BackendMismatch("paired spaces on different backends")
    return backends.pop()


def internal_hom(A: PairedSpace, B: PairedSpace) -> PairedSpace:
    """[A, B]: carrier Hom(A, B), counter A (x) B', pairing <f, x (x) psi> = <f x, psi>_B.

    With the fixed bases the pairing is ``I_{n_A} (x) G_B``.
    """
    if not isinstance(A, PairedSpace) or not isinstance(B, PairedSpace):
        raise ValidationError("internal_hom needs nondegenerate pairs; separate/extensionalize raw pairs first")
    backend = _require_same_backend(A, B)
    I = Matrix.identity(A.n, backend)
    return _trusted(I.kron(B.pairing), I.kron(B.inverse_pairing), f"[{A.name},{B.name}]")


def hom_map(f: PairedMap, g: PairedMap) -> PairedMap:
    """[f, g]: [A2, B1] -> [A1, B2], M -> g M f, for f: A1 -> A2 and g: B1 -> B2."""
    src = internal_hom(f.target, g.source)
    tgt = internal_hom(f.source, g.target)
    return PairedMap.from_matrix(src, tgt, f.matrix.T.kron(g.matrix))


def tensor(A: PairedSpace, B: PairedSpace) -> PairedSpace:
    """A (x) B := [A, B*]*.

    Carrier basis ``x_k (x) y_l`` at index ``l + k * n_B``; the counter-space is
    Hom(A, B') read as bilinear forms, with <x (x) y, M> = y^T G_B M x.
    """
    _require_same_backend(A, B)
    T = dual(internal_hom(A, dual(B)))
    return PairedSpace(T.pairing, f"({A.name} (x) {B.name})", None, T.inverse_pairing)


def tensor_vector(u: Sequence[Scalar], v: Sequence[Scalar]) -> tuple[Scalar, ...]:
    """Coordinates of u (x) v in the tensor carrier basis."""
    return tuple(a * b for a in u for b in v)


def hom_element(M: Matrix) -> tuple[Scalar, ...]:
    return vec_col_major(M)


def hom_matrix(v: Sequence[Scalar], A: PairedSpace, B: PairedSpace) -> Matrix:
    return unvec_col_major(v, B.n, A.n, A.backend)


def eta(A: PairedSpace) -> PairedMap:
    """The canonical map A -> dual(dual(A)), x -> <x, ->.

    dual(dual(A)) has pairing G again and the functional <x, -> on A' has
    coordinates x, so the carrier matrix is the identity.
    """
    return PairedMap.from_matrix(A, dual(dual(A)), Matrix.identity(A.n, A.backend))


def eval_map(A: PairedSpace) -> PairedMap:
    """eta^{A,D}: A -> [[A, D], D], built on the internal hom.

    [A, D] consists of row vectors r (index j), [[A, D], D] of row vectors s
    over r, and x goes to s = (r -> r x), i.e. s_j = x_j.
    """
    D = dualizing(A.backend)
    target = internal_hom(internal_hom(A, D), D)
    return PairedMap.from_matrix(A, target, Matrix.identity(A.n, A.backend))


def curry(A: PairedSpace, B: PairedSpace, C: PairedSpace) -> tuple[PairedMap, PairedMap]:
    """Mutually inverse maps between [A (x) B, C] and [A, [B, C]].

    M in [A (x) B, C] has entries M[c, l + k n_B]; its curried form N has
    N[c + l n_C, k] = M[c, l + k n_B].  On the column-major vectorizations both
    indices equal ``c + l n_C + k n_B n_C``, so with these bases the carrier
    isomorphism is the identity permutation.
    """
    _require_same_backend(A, B, C)
    nA, nB, nC = A.n, B.n, C.n
    left = internal_hom(tensor(A, B), C)
    right = internal_hom(A, internal_hom(B, C))
    N = nA * nB * nC
    perm = [0] * N  # perm[index in left] = index in right
    for c in range(nC):
        for k in range(nA):
            for l in range(nB):
                perm[c + (l + k * nB) * nC] = (c + l * nC) + k * (nC * nB)
    backend = A.backend
    zero, one = Scalar.zero(backend), Scalar.one(backend)
    P = [[zero] * N for _ in range(N)]
    for i, j in enumerate(perm):
        P[j][i] = one
    fwd = Matrix(N, N, backend, tuple(tuple(r) for r in P))
    c_map = PairedMap.from_matrix(left, right, fwd)
    u_map = PairedMap.from_matrix(right, left, fwd.T)
    return c_map, u_map


# reflections ---------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class Reflection:
    """A quotient of one side of a raw pair.

    ``side`` is ``"carrier"`` (separation) or ``"counter"``
    (extensionalization); ``projection`` maps old coordinates on that side to
    new ones.  The old pairing is recovered as ``P^T G_new`` (carrier) or
    ``G_new Q`` (counter).
    """

    pair: RawPair | PairedSpace
    projection: Matrix
    side: str

    def reproduces(self, original: RawPair | PairedSpace) -> bool:
        G = self.pair.pairing
        rebuilt = self.projection.T @ G if self.side == "carrier" else G @ self.projection
        return rebuilt.equals(original.pairing, 1e-9)


def _as_pair(G: Matrix, name: str) -> RawPair | PairedSpace:
    if G.rows == G.cols and G.is_invertible():
        return PairedSpace(G, name)
    return RawPair(G, name)


def separate(R: RawPair | PairedSpace) -> Reflection:
    """Quotient the carrier by the left radical {x : x^T G = 0}.

    The new carrier is spanned by the first linearly independent rows of G;
    the projection expresses every row in terms of them (the rref of G^T).
    """
    G = R.pairing
    rref, pivots = G.T.rref()
    r = len(pivots)
    newG = G.select_rows(pivots) if r else Matrix.zeros(0, G.cols, G.backend)
    P = rref.select_rows(range(r)) if r else Matrix.zeros(0, G.rows, G.backend)
    return Reflection(_as_pair(newG, R.name), P, "carrier")


def extensionalize(R: RawPair | PairedSpace) -> Reflection:
    """Quotient the counter-space by the right radical {phi : G phi = 0}."""
    G = R.pairing
    rref, pivots = G.rref()
    r = len(pivots)
    newG = G.select_cols(pivots) if r else Matrix.zeros(G.rows, 0, G.backend)
    Q = rref.select_rows(range(r)) if r else Matrix.zeros(0, G.cols, G.backend)
    return Reflection(_as_pair(newG, R.name), Q, "counter")


def left_radical(R: RawPair | PairedSpace) -> list[tuple[Scalar, ...]]:
    return R.pairing.T.nullspace()


def right_radical(R: RawPair | PairedSpace) -> list[tuple[Scalar, ...]]:
    return R.pairing.nullspace()


def separated_extensional(R: RawPair | PairedSpace) -> tuple[PairedSpace | RawPair, Matrix, Matrix]:
    """Separate, then extensionalize.  Returns the pair and both projections."""
    s = separate(R)
    e = extensionalize(s.pair)
    return e.pair, s.projection, e.projection


def extensional_separated(R: RawPair | PairedSpace) -> tuple[PairedSpace | RawPair, Matrix, Matrix]:
    """Extensionalize, then separate.  Returns the pair and both projections."""
    e = extensionalize(R)
    s = separate(e.pair)
    return s.pair, s.projection, e.projection


def canonical_iso(first, second) -> tuple[Matrix, Matrix] | None:
    """Compare two (pair, carrier projection, counter projection) reflections.

    Returns ``(S, T)`` with ``S P1 = P2``, ``T Q1 = Q2`` and ``G1 = S^T G2 T``
    when such invertible maps exist, otherwise None.
    """
    (p1, P1, Q1), (p2, P2, Q2) = first, second
    if (p1.n, p1.m) != (p2.n, p2.m):
        return None
    backend = p1.pairing.backend
    S = P1.solve_left(P2) if P1.rows else Matrix.zeros(P2.rows, 0, backend)
    T = Q1.solve_left(Q2) if Q1.rows else Matrix.zeros(Q2.rows, 0, backend)
    if S.rows and not S.is_invertible():
        return None
    if T.rows and not T.is_invertible():
        return None
    if p1.n and p1.m and not (S.T @ p2.pairing @ T).equals(p1.pairing, 1e-9):
        return None
    return S, T


# free pairs and integration ------------------------------------------------------------


def free_paired(X: FiniteSpace, backend: str = EXACT) -> PairedSpace:
    """M_c(X) = K^X paired with C(X) = K^X by evaluation: G = I on the point basis."""
    I = Matrix.identity(len(X), backend)
    return PairedSpace(I, f"M({X.name})", X.labels, I)


def dirac_vector(X: FiniteSpace, x: str, backend: str = EXACT) -> tuple[Scalar, ...]:
    i = X.index(x)
    zero, one = Scalar.zero(backend), Scalar.one(backend)
    return tuple(one if j == i else zero for j in range(len(X)))


def free_extend(X: FiniteSpace, V: PairedSpace, f: Mapping[str, Sequence] | Callable[[str], Sequence]) -> PairedMap:
    """The unique linear extension of ``f: X -> V`` along the Dirac map.

    Columns of the matrix are the vectors ``f(x)`` in point order.
    """
    get = f.__getitem__ if isinstance(f, Mapping) else f
    cols = []
    for x in X.labels:
        v = tuple(Scalar.coerce(c, V.backend) for c in get(x))
        if len(v) != V.n:
            raise DimensionMismatch(f"f({x!r}) has {len(v)} coordinates, V has dimension {V.n}")
        cols.append(v)
    A = Matrix(V.n, len(X), V.backend, tuple(tuple(c[i] for c in cols) for i in range(V.n)))
    return PairedMap.from_matrix(free_paired(X, V.backend), V, A)


def is_bilinear(
    X: FiniteSpace,
    Y: FiniteSpace,
    V: PairedSpace,
    h: Callable[[Sequence[Scalar], Sequence[Scalar]], Sequence],
    probes: Sequence[Scalar] | None = None,
) -> bool:
    """Check slotwise linearity of ``h: K^X x K^Y -> V`` on all basis pairs.

    For every pair of basis vectors (and a few scalars ``a``) the checks are
    ``h(a e_i + e_j, f_k) = a h(e_i, f_k) + h(e_j, f_k)`` and the mirror image
    in the second slot; ``h(0, f_k) = h(e_i, 0) = 0`` covers the degenerate case.
    """
    backend = V.backend
    if probes is None:
        probes = [Scalar(2, 0, backend), Scalar(-1, 0, backend), Scalar(3, 0, backend) / 7]
    ex = [dirac_vector(X, x, backend) for x in X.labels]
    ey = [dirac_vector(Y, y, backend) for y in Y.labels]
    zx = tuple(Scalar.zero(backend) for _ in X.labels)
    zy = tuple(Scalar.zero(backend) for _ in Y.labels)

    def H(u, v):
        out = tuple(Scalar.coerce(c, backend) for c in h(u, v))
        if len(out) != V.n:
            raise DimensionMismatch(f"bilinear map returned {len(out)} coordinates, V has {V.n}")
        return out

    def close(a, b):
        return all((p == q) if backend == EXACT else p.close_to(q, 1e-9) for p, q in zip(a, b))

    def comb(a, u, w):
        return tuple(a * s + t for s, t in zip(u, w))

    zero_v = tuple(Scalar.zero(backend) for _ in range(V.n))
    for v in ey:
        if not close(H(zx, v), zero_v):
            return False
    for u in ex:
        if not close(H(u, zy), zero_v):
            return False
    for a in probes:
        for u in ex:
            for w in ex:
                for v in ey:
                    if not close(H(comb(a, u, w), v), comb(a, H(u, v), H(w, v))):
                        return False
        for v in ey:
            for w in ey:
                for u in ex:
                    if not close(H(u, comb(a, v, w)), comb(a, H(u, v), H(u, w))):
                        return False
    return True


def bilinear_factor(
    X: FiniteSpace,
    Y: FiniteSpace,
    V: PairedSpace,
    h: Callable[[Sequence[Scalar], Sequence[Scalar]], Sequence],
) -> PairedMap:
    """The unique linear map L on tensor(free(X), free(Y)) with L(u (x) v) = h(u, v).

    Its columns are forced: column ``l + k |Y|`` is ``h(e_k, e_l)``.
    """
    if not is_bilinear(X, Y, V, h):
        raise ValidationError("map is not bilinear on the basis")
    backend = V.backend
    FX, FY = free_paired(X, backend), free_paired(Y, backend)
    T = tensor(FX, FY)
    ex = [dirac_vector(X, x, backend) for x in X.labels]
    ey = [dirac_vector(Y, y, backend) for y in Y.labels]
    cols = [tuple(Scalar.coerce(c, backend) for c in h(u, v)) for u in ex for v in ey]
    A = Matrix(V.n, T.n, backend, tuple(tuple(c[i] for c in cols) for i in range(V.n)))
    return PairedMap.from_matrix(T, V, A)
