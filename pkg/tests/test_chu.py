from __future__ import annotations

from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from measurechu import chu
from measurechu.chu import PairedMap, PairedSpace, RawPair
from measurechu.errors import AdjointMismatch, SingularPairing, ValidationError
from measurechu.linalg import Matrix
from measurechu.measures import Measure
from measurechu.rng import SplitMix64
from measurechu.laws import rand_matrix, rand_paired, rand_paired_map, rand_raw, rand_vector
from measurechu.scalar import EXACT, Scalar
from measurechu.spaces import make_space


def M(rows):
    return Matrix.from_rows(rows, EXACT)


def P(rows, name="A"):
    return PairedSpace(M(rows), name)


def e(n, i):
    return tuple(Scalar(1 if j == i else 0, 0, EXACT) for j in range(n))


def vec(*xs):
    return tuple(Scalar(x, 0, EXACT) for x in xs)


seeds = st.integers(0, 2 ** 32)


def test_singular_pairing_rejected():
    with pytest.raises(SingularPairing):
        P([[1, 2], [2, 4]])


def test_dual_examples():
    assert chu.dual(P([[1, 0], [0, 1]])).pairing == M([[1, 0], [0, 1]])
    assert chu.dual(P([[1, 2], [0, 1]])).pairing == M([[1, 0], [2, 1]])


@given(seeds)
def test_dual_involution(seed):
    r = SplitMix64(seed)
    A = rand_paired(r, r.randint(1, 5))
    assert chu.dual(chu.dual(A)) == A
    f = rand_paired_map(r, A, rand_paired(r, r.randint(1, 4), "B"))
    assert chu.dual_map(chu.dual_map(f)).equals(f)


def test_adjoint_is_validated():
    A, B = P([[1, 2], [0, 1]]), P([[3]], "B")
    f = PairedMap.from_matrix(A, B, M([[1, -1]]))
    # oracle: <f x, psi>_B = <x, f^T psi>_A for basis vectors
    for i in range(2):
        assert B.pair(f(e(2, i)), vec(1)) == A.pair(e(2, i), f.adjoint.apply(vec(1)))
    with pytest.raises(AdjointMismatch):
        PairedMap(A, B, M([[1, -1]]), M([[1], [1]]))


def test_hom_examples():
    D = chu.dualizing()
    B = P([[2, 1, 0], [0, 1, 0], [1, 0, 1]], "B")
    assert chu.internal_hom(D, B) == B
    A = P([[1, 2], [0, 1]])
    H = chu.internal_hom(A, B)
    assert (H.n, H.pairing.cols) == (6, 6)


@given(seeds)
def test_hom_into_dualizing_is_the_dual(seed):
    # transport along phi -> G phi: <G phi, x>_[A,D] = <phi, x>_{A*}
    r = SplitMix64(seed)
    A = rand_paired(r, r.randint(1, 5))
    H = chu.internal_hom(A, chu.dualizing())
    phi, x = rand_vector(r, A.n), rand_vector(r, A.n)
    assert H.pair(A.pairing.apply(phi), x) == chu.dual(A).pair(phi, x)


@given(seeds)
def test_tensor_with_unit_and_dims(seed):
    r = SplitMix64(seed)
    A = rand_paired(r, r.randint(1, 4))
    T = chu.tensor(A, chu.dualizing())
    assert T.n == A.n
    x, psi = rand_vector(r, A.n), rand_vector(r, A.n)
    # counter-space identification psi -> G psi
    assert T.pair(x, A.pairing.apply(psi)) == A.pair(x, psi)
    assert chu.tensor(rand_paired(r, 2), rand_paired(r, 3, "B")).n == 6


@given(seeds)
def test_tensor_pairing_on_rank_one_elements(seed):
    r = SplitMix64(seed)
    A, B = rand_paired(r, 2), rand_paired(r, 2, "B")
    T = chu.tensor(A, B)
    beta = rand_matrix(r, B.n, A.n)  # a bilinear form (x, y) -> y^T G_B beta x
    for k in range(A.n):
        for l in range(B.n):
            x, y = e(A.n, k), e(B.n, l)
            expected = B.pair(y, beta.apply(x))
            assert T.pair(chu.tensor_vector(x, y), chu.hom_element(beta)) == expected


def test_eta_examples():
    I3 = P([[1, 0, 0], [0, 1, 0], [0, 0, 1]])
    assert chu.eta(I3).matrix == Matrix.identity(3, EXACT)
    h = chu.eta(P([[2]]))
    assert h.matrix.is_invertible()


@given(seeds)
def test_triple_dualisation_retraction(seed):
    r = SplitMix64(seed)
    A = rand_paired(r, r.randint(1, 5))
    D = chu.dualizing()
    H = chu.internal_hom(A, D)
    retract = chu.eval_map(H).then(chu.hom_map(chu.eval_map(A), chu.identity(D)))
    assert retract.equals(chu.identity(H))


def test_curry_examples():
    one = P([[5]])
    c, u = chu.curry(one, one, one)
    assert c.matrix == Matrix.identity(1, EXACT)
    r = SplitMix64(3)
    A, B, C = (rand_paired(r, 2, n) for n in "ABC")
    c, u = chu.curry(A, B, C)
    assert c.source.n == c.target.n == 8
    # a permutation matrix: one 1 per row and column
    for row in c.matrix.data:
        assert sorted(x.re for x in row) == [0] * 7 + [1]


@given(seeds)
def test_curry_is_currying(seed):
    r = SplitMix64(seed)
    A, B, C = (rand_paired(r, r.randint(1, 3), n) for n in "ABC")
    c, u = chu.curry(A, B, C)
    m = rand_vector(r, c.source.n)
    assert u(c(m)) == m
    Mx = chu.hom_matrix(m, chu.tensor(A, B), C)
    N = chu.hom_matrix(c(m), A, chu.internal_hom(B, C))
    x, y = rand_vector(r, A.n), rand_vector(r, B.n)
    assert chu.hom_matrix(N.apply(x), B, C).apply(y) == Mx.apply(chu.tensor_vector(x, y))


def test_separate_examples():
    full = RawPair(M([[1, 2], [3, 4]]))
    s = chu.separate(full)
    assert s.projection == Matrix.identity(2, EXACT) and s.pair.pairing == full.pairing
    s = chu.separate(RawPair(M([[1, 0], [0, 0]])))
    assert s.pair.n == 1 and s.reproduces(RawPair(M([[1, 0], [0, 0]])))
    assert chu.separate(RawPair(M([[0, 0], [0, 0]]))).pair.n == 0


def test_extensionalize_examples():
    assert chu.extensionalize(RawPair(M([[1, 2], [3, 4]]))).pair.pairing == M([[1, 2], [3, 4]])
    x = chu.extensionalize(RawPair(M([[1, 0]])))
    assert isinstance(x.pair, PairedSpace) and x.pair.pairing == M([[1]])
    assert chu.extensionalize(RawPair(M([[0, 0], [0, 0]]))).pair.m == 0


@given(seeds)
def test_reflections_commute(seed):
    r = SplitMix64(seed)
    R = rand_raw(r, r.randint(1, 5), r.randint(1, 5))
    se, es = chu.separated_extensional(R), chu.extensional_separated(R)
    assert se[0].n == es[0].n == R.pairing.rank()
    assert chu.canonical_iso(se, es) is not None
    for refl in (chu.separate(R), chu.extensionalize(R)):
        assert refl.reproduces(R)
    # radical vectors pair to zero with everything
    for v in chu.left_radical(R):
        assert all(c.is_zero() for c in R.pairing.T.apply(v))


def test_internal_hom_rejects_raw_pairs():
    with pytest.raises(ValidationError):
        chu.internal_hom(RawPair(M([[1, 0]])), chu.dualizing())


def test_free_paired_examples():
    assert chu.free_paired(make_space("S", ["s"])) == chu.dualizing()
    X = make_space("X", ["a", "b", "c"])
    F = chu.free_paired(X)
    assert F.pairing == Matrix.identity(3, EXACT)
    fvals = vec(4, -1, Fraction(1, 2))
    for i, x in enumerate(X.labels):
        assert F.pair(chu.dirac_vector(X, x), fvals) == fvals[i]


def test_free_extend_examples():
    X = make_space("X", ["a", "b"])
    V = P([[1, 0], [0, 1]], "V")
    assert chu.free_extend(X, V, {"a": [1, 0], "b": [0, 1]}).matrix == Matrix.identity(2, EXACT)
    g = chu.free_extend(X, V, {"a": [1, 1], "b": [1, 1]})
    mu = Measure.from_weights(X, {"a": 2, "b": -1})
    assert g(mu.coordinate_vector()) == vec(1, 1)


@given(seeds)
def test_extensions_agreeing_on_diracs_are_equal(seed):
    r = SplitMix64(seed)
    X = make_space("X", [f"x{i}" for i in range(r.randint(1, 5))])
    V = rand_paired(r, r.randint(1, 3), "V")
    table = {x: [r.rational() for _ in range(V.n)] for x in X.labels}
    f = chu.free_extend(X, V, table)
    g = chu.free_extend(X, V, lambda x: table[x])
    assert all(f(chu.dirac_vector(X, x)) == g(chu.dirac_vector(X, x)) for x in X.labels)
    assert f.equals(g)


def test_bilinear_factorization():
    X, Y = make_space("X", ["a", "b"]), make_space("Y", ["u", "v", "w"])
    V = P([[1, 0], [0, 1]], "V")
    K = M([[1, 2, 0], [0, -1, 3]])

    def h(u, v):  # (u^T K v, u_0 v_2)
        return (sum((u[i] * K[i, j] * v[j] for i in range(2) for j in range(3)), Scalar(0, 0, EXACT)),
                u[0] * v[2])

    assert chu.is_bilinear(X, Y, V, h)
    L = chu.bilinear_factor(X, Y, V, h)
    u, v = vec(3, -2), vec(1, Fraction(1, 2), 5)
    assert L(chu.tensor_vector(u, v)) == tuple(h(u, v))
    assert not chu.is_bilinear(X, Y, V, lambda u, v: (u[0] * u[0], v[0]))
    with pytest.raises(ValidationError):
        chu.bilinear_factor(X, Y, V, lambda u, v: (u[0] + v[0], Scalar(0, 0, EXACT)))
