"""Seeded randomized law suites.

Each suite draws ``cases`` independent instances from a SplitMix64 stream
(case ``k`` uses the ``k``-th fork of ``SplitMix64(seed)``) and checks a fixed
list of identities with exact equality.  Failures carry the serialized inputs
needed to reproduce them.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable

from . import chu
from .chu import PairedMap, PairedSpace, RawPair
from .fourier import char_function, grid_points, injectivity_witness, pd_check
from .integration import VectorFn, double_integral, free_extend_apply, integrate_vector
from .linalg import Matrix
from .measures import (
    Measure,
    MetaMeasure,
    dirac,
    dirac_meta,
    flatten,
    integrate_scalar,
    is_probability,
    meta_map,
    meta_to_json,
    measure_to_json,
    product,
    pushforward,
    total_variation,
    unit_pushforward,
)
from .rng import SplitMix64
from .scalar import EXACT, Scalar
from .serialize import paired_to_json, space_to_json
from .spaces import FiniteSpace, MapTable, Point, identity_map, product_label, product_space, swap_map


@dataclass
class LawReport:
    suite: str
    cases: int
    seed: int
    checks: dict[str, int] = field(default_factory=dict)
    failures: list[dict] = field(default_factory=list)
    wall_time: float = 0.0

    @property
    def passed(self) -> bool:
        return not self.failures

    def record(self, case: int, name: str, ok: bool, reproducer: Callable[[], dict]) -> None:
        self.checks.setdefault(name, 0)
        if ok:
            self.checks[name] += 1
        else:
            self.failures.append({"case": case, "check": name, "inputs": reproducer()})

    def to_json(self) -> dict:
        # wall time is left out so that output is byte-reproducible
        return {
            "suite": self.suite,
            "seed": self.seed,
            "cases": self.cases,
            "checks": {k: f"{v}/{self.cases}" for k, v in self.checks.items()},
            "failures": self.failures,
            "passed": self.passed,
        }


# generators ------------------------------------------------------------------------


def rand_space(r: SplitMix64, max_points: int = 8, name: str = "X", coords: int = 0) -> FiniteSpace:
    n = r.randint(1, max_points)
    if coords:
        seen, points = set(), []
        while len(points) < n:
            c = tuple(Fraction(r.randint(-5, 5), r.randint(1, 4)) for _ in range(coords))
            if c in seen:
                continue
            seen.add(c)
            points.append(Point(f"{name.lower()}{len(points)}", tuple(Scalar(v, 0, EXACT) for v in c)))
        return FiniteSpace(name, tuple(points))
    return FiniteSpace(name, tuple(Point(f"{name.lower()}{i}") for i in range(n)))


def rand_scalar(r: SplitMix64, complex_: bool = False) -> Scalar:
    return Scalar(r.rational(), r.rational() if complex_ else 0, EXACT)


def rand_measure(r: SplitMix64, X: FiniteSpace, complex_: bool = False) -> Measure:
    atoms = [(x, rand_scalar(r, complex_)) for x in X.labels if r.below(3)]
    return Measure.from_weights(X, atoms, EXACT, "complex" if complex_ else "real")


def rand_probability(r: SplitMix64, X: FiniteSpace, max_atoms: int | None = None) -> Measure:
    labels = list(X.labels)
    k = r.randint(1, min(len(labels), max_atoms or len(labels)))
    chosen = []
    for _ in range(k):
        chosen.append(labels.pop(r.below(len(labels))))
    raw = [r.randint(1, 9) for _ in chosen]
    total = sum(raw)
    return Measure.from_weights(X, [(x, Fraction(w, total)) for x, w in zip(chosen, raw)], EXACT)


def rand_map(r: SplitMix64, X: FiniteSpace, Y: FiniteSpace) -> MapTable:
    return MapTable(X, Y, {x: r.choice(Y.labels) for x in X.labels})


def rand_meta(r: SplitMix64, X: FiniteSpace, complex_: bool = False, k: int = 4) -> MetaMeasure:
    atoms = [(rand_measure(r, X, complex_), rand_scalar(r, complex_)) for _ in range(r.randint(1, k))]
    return MetaMeasure.from_atoms(X, atoms, EXACT)


def rand_meta2(r: SplitMix64, X: FiniteSpace, k: int = 3) -> MetaMeasure:
    atoms = [(rand_meta(r, X, k=3), rand_scalar(r)) for _ in range(r.randint(1, k))]
    return MetaMeasure.from_atoms(X, atoms, EXACT)


def rand_matrix(r: SplitMix64, rows: int, cols: int, lo: int = -3, hi: int = 3) -> Matrix:
    return Matrix.from_rows([[r.randint(lo, hi) for _ in range(cols)] for _ in range(rows)], EXACT, (rows, cols))


def rand_invertible(r: SplitMix64, n: int) -> Matrix:
    while True:
        M = rand_matrix(r, n, n)
        if M.is_invertible():
            return M


def rand_paired(r: SplitMix64, n: int, name: str = "A") -> PairedSpace:
    return PairedSpace(rand_invertible(r, n), name)


def rand_paired_map(r: SplitMix64, A: PairedSpace, B: PairedSpace) -> PairedMap:
    return PairedMap.from_matrix(A, B, rand_matrix(r, B.n, A.n))


def rand_raw(r: SplitMix64, n: int, m: int) -> RawPair:
    k = r.randint(0, min(n, m))
    if k == 0:
        return RawPair(Matrix.zeros(n, m, EXACT))
    return RawPair(rand_matrix(r, n, k) @ rand_matrix(r, k, m))


def rand_vector(r: SplitMix64, n: int) -> tuple[Scalar, ...]:
    return tuple(rand_scalar(r) for _ in range(n))


def rand_vector_fn(r: SplitMix64, X: FiniteSpace, V: PairedSpace) -> VectorFn:
    return VectorFn(X, V, {x: rand_vector(r, V.n) for x in X.labels})


def _vec_json(v) -> list:
    return [c.to_json() for c in v]


def _fn_json(f: VectorFn) -> dict:
    return {"space": f.domain.name, "codomain": f.codomain.name,
            "table": {x: _vec_json(v) for x, v in f.table.items()}}


def _map_json(f: MapTable) -> dict:
    return {"source": space_to_json(f.source), "target": space_to_json(f.target), "assignment": dict(f.assignment)}


# suites ----------------------------------------------------------------------------------


def _run(name: str, cases: int, seed: int, body: Callable[[LawReport, int, SplitMix64], None]) -> LawReport:
    report = LawReport(name, cases, seed)
    master = SplitMix64(seed)
    start = time.perf_counter()
    for case in range(cases):
        body(report, case, master.fork())
    report.wall_time = time.perf_counter() - start
    return report


def monad_suite(cases: int = 200, seed: int = 0) -> LawReport:
    """Unit laws, associativity, naturality, functoriality and closure of P."""

    def body(rep: LawReport, case: int, r: SplitMix64) -> None:
        X = rand_space(r, 8, "X")
        Y = rand_space(r, 8, "Y")
        Z = rand_space(r, 8, "Z")
        cplx = r.below(4) == 0
        mu = rand_measure(r, X, cplx)
        pi = rand_meta(r, X, cplx)
        Pi = rand_meta2(r, X)
        f, g = rand_map(r, X, Y), rand_map(r, Y, Z)
        x = r.choice(X.labels)

        def repro():
            return {"space": space_to_json(X), "mu": measure_to_json(mu), "pi": meta_to_json(pi),
                    "Pi": meta_to_json(Pi), "f": _map_json(f), "g": _map_json(g), "x": x}

        rep.record(case, "left_unit", flatten(dirac_meta(mu)) == mu, repro)
        rep.record(case, "right_unit", flatten(unit_pushforward(mu)) == mu, repro)
        rep.record(case, "associativity", flatten(flatten(Pi)) == flatten(meta_map(flatten, Pi, depth=1)), repro)
        rep.record(case, "naturality_flatten",
                   pushforward(f, flatten(pi)) == flatten(meta_map(lambda m: pushforward(f, m), pi, base=Y)), repro)
        rep.record(case, "naturality_dirac", pushforward(f, dirac(X, x)) == dirac(Y, f(x)), repro)
        rep.record(case, "functoriality", pushforward(f.then(g), mu) == pushforward(g, pushforward(f, mu)), repro)
        rep.record(case, "identity", pushforward(identity_map(X), mu) == mu, repro)
        p, q = rand_probability(r, X), rand_probability(r, Y)
        pp = MetaMeasure.from_atoms(X, [(rand_probability(r, X), Fraction(1, 3)), (rand_probability(r, X), Fraction(2, 3))])
        rep.record(case, "probability_closure",
                   is_probability(product(p, q)) and is_probability(pushforward(f, p)) and is_probability(flatten(pp)),
                   repro)
        rep.record(case, "canonical_idempotent", mu.canonical().canonical() == mu.canonical(), repro)

    return _run("monad", cases, seed, body)


def commutative_suite(cases: int = 200, seed: int = 0) -> LawReport:
    """Symmetry of products, scalar Fubini, double integrals, multiplicativity of total variation."""

    def body(rep: LawReport, case: int, r: SplitMix64) -> None:
        X, Y = rand_space(r, 5, "X"), rand_space(r, 5, "Y")
        cplx = r.below(4) == 0
        mu, nu = rand_measure(r, X, cplx), rand_measure(r, Y, cplx)
        XY = product_space(X, Y)
        table = {xy: rand_scalar(r) for xy in XY.labels}
        V = rand_paired(r, r.randint(1, 3), "V")
        F = rand_vector_fn(r, XY, V)

        def repro():
            return {"mu": measure_to_json(mu, True), "nu": measure_to_json(nu, True),
                    "f": {k: v.to_json() for k, v in table.items()}, "V": paired_to_json(V), "F": _fn_json(F)}

        rep.record(case, "symmetry", pushforward(swap_map(X, Y), product(mu, nu)) == product(nu, mu), repro)
        lhs = integrate_scalar(nu, lambda y: integrate_scalar(mu, lambda x: table[product_label(x, y)]))
        rhs = integrate_scalar(mu, lambda x: integrate_scalar(nu, lambda y: table[product_label(x, y)]))
        rep.record(case, "scalar_fubini", lhs == rhs == integrate_scalar(product(mu, nu), table), repro)
        rep.record(case, "double_integral", double_integral(F, mu, nu).agree(), repro)
        mr, nr = rand_measure(r, X), rand_measure(r, Y)
        rep.record(case, "tv_multiplicative",
                   total_variation(product(mr, nr)) == total_variation(mr) * total_variation(nr), repro)

    return _run("commutative", cases, seed, body)


def integration_suite(cases: int = 200, seed: int = 0) -> LawReport:
    """Change of variables, operator exchange, linearity, integration = free extension."""

    def body(rep: LawReport, case: int, r: SplitMix64) -> None:
        X, Y = rand_space(r, 6, "X"), rand_space(r, 6, "Y")
        V = rand_paired(r, r.randint(1, 4), "V")
        W = rand_paired(r, r.randint(1, 4), "W")
        g = rand_map(r, X, Y)
        mu, nu = rand_measure(r, X), rand_measure(r, X)
        f = rand_vector_fn(r, Y, V)
        h1, h2 = rand_vector_fn(r, X, V), rand_vector_fn(r, X, V)
        T = rand_paired_map(r, V, W)
        a = rand_scalar(r)

        def repro():
            return {"X": space_to_json(X), "Y": space_to_json(Y), "g": _map_json(g),
                    "mu": measure_to_json(mu), "nu": measure_to_json(nu), "f": _fn_json(f),
                    "h1": _fn_json(h1), "h2": _fn_json(h2), "V": paired_to_json(V), "W": paired_to_json(W),
                    "T": _vec_json(T.matrix.data[0]) if T.matrix.rows else [], "a": a.to_json()}

        rep.record(case, "change_of_variables",
                   integrate_vector(pushforward(g, mu), f) == integrate_vector(mu, f.compose(g)), repro)
        rep.record(case, "operator_exchange", T(integrate_vector(mu, h1)) == integrate_vector(mu, h1.then(T)), repro)
        rep.record(case, "free_extension", integrate_vector(mu, h1) == free_extend_apply(h1, mu), repro)
        comb = VectorFn(X, V, {x: tuple(a * p + q for p, q in zip(h1(x), h2(x))) for x in X.labels})
        lin_f = integrate_vector(mu, comb) == tuple(
            a * p + q for p, q in zip(integrate_vector(mu, h1), integrate_vector(mu, h2)))
        lin_mu = integrate_vector(mu.scale(a) + nu, h1) == tuple(
            a * p + q for p, q in zip(integrate_vector(mu, h1), integrate_vector(nu, h1)))
        rep.record(case, "linearity", lin_f and lin_mu, repro)

    return _run("integration", cases, seed, body)


def chu_suite(cases: int = 100, seed: int = 0, max_dim: int = 6) -> LawReport:
    """Double-dual, triple dualisation, tensor-hom and reflection identities."""

    def body(rep: LawReport, case: int, r: SplitMix64) -> None:
        A = rand_paired(r, r.randint(1, max_dim), "A")
        B = rand_paired(r, r.randint(1, max_dim), "B")
        f = rand_paired_map(r, A, B)

        def repro():
            return {"A": paired_to_json(A), "B": paired_to_json(B), "f": _vec_json(f.matrix.data[0])}

        eA, eB = chu.eta(A), chu.eta(B)
        rep.record(case, "eta_invertible", eA.matrix.is_invertible() and eA.adjoint.is_invertible(), repro)
        nat = chu.dual_map(chu.dual_map(f))
        rep.record(case, "eta_natural", eA.then(nat).equals(f.then(eB)), repro)
        evA, evB = chu.eval_map(A), chu.eval_map(B)
        D = chu.dualizing(EXACT)
        idD = chu.identity(D)
        hh = chu.hom_map(chu.hom_map(f, idD), idD)
        rep.record(case, "eval_natural", evA.then(hh).equals(f.then(evB)), repro)
        H = chu.internal_hom(A, D)
        triple = chu.eval_map(H).then(chu.hom_map(evA, idD))
        rep.record(case, "triple_dualisation", triple.equals(chu.identity(H)), repro)
        rep.record(case, "adjoint_unique", f.adjoint == f.expected_adjoint(), repro)
        rep.record(case, "tensor_dual", chu.dual(chu.tensor(A, B)) == chu.internal_hom(A, chu.dual(B)), repro)

        # curry on smaller factors: carriers have dimension nA * nB * nC
        A3 = rand_paired(r, r.randint(1, 3), "A")
        B3 = rand_paired(r, r.randint(1, 3), "B")
        C3 = rand_paired(r, r.randint(1, 3), "C")
        c, u = chu.curry(A3, B3, C3)
        elem = rand_vector(r, c.source.n)
        rep.record(case, "curry_roundtrip",
                   c.then(u).equals(chu.identity(c.source)) and u.then(c).equals(chu.identity(c.target))
                   and u(c(elem)) == elem, repro)
        rep.record(case, "curry_semantics", _curry_semantics_ok(A3, B3, C3, c, elem), repro)

        # [f2 f1, g2 g1] = [f1, g2] [f2, g1]
        f1, f2 = rand_paired_map(r, A3, B3), rand_paired_map(r, B3, C3)
        P3 = rand_paired(r, r.randint(1, 3), "P")
        g1, g2 = rand_paired_map(r, P3, A3), rand_paired_map(r, A3, C3)
        whole = chu.hom_map(f1.then(f2), g1.then(g2))
        parts = chu.hom_map(f2, g1).then(chu.hom_map(f1, g2))
        rep.record(case, "hom_functorial", whole.equals(parts), repro)

        R = rand_raw(r, r.randint(1, max_dim), r.randint(1, max_dim))
        se = chu.separated_extensional(R)
        es = chu.extensional_separated(R)
        ok = chu.canonical_iso(se, es) is not None
        ok = ok and (se[0].n == se[0].m == R.pairing.rank())
        ok = ok and (se[0].n == 0 or isinstance(se[0], PairedSpace))
        rep.record(case, "reflections_commute", ok, repro)

    return _run("chu", cases, seed, body)


def _curry_semantics_ok(A, B, C, c: PairedMap, elem) -> bool:
    """Index-free oracle: N(x)(y) must equal M(x (x) y) on all basis pairs."""
    nA, nB = A.n, B.n
    M = chu.hom_matrix(elem, chu.tensor(A, B), C)
    N = chu.hom_matrix(c(elem), A, chu.internal_hom(B, C))
    one, zero = Scalar.one(EXACT), Scalar.zero(EXACT)
    for k in range(nA):
        ek = tuple(one if i == k else zero for i in range(nA))
        Nx = chu.hom_matrix(N.apply(ek), B, C)
        for l in range(nB):
            el = tuple(one if i == l else zero for i in range(nB))
            if Nx.apply(el) != M.apply(chu.tensor_vector(ek, el)):
                return False
    return True


def rand_coord_probability(r: SplitMix64, max_atoms: int = 6, dim: int = 2, den: int = 4) -> Measure:
    """Probability measure with 1..max_atoms atoms at distinct rational points of [-1, 1)^dim."""
    k = r.randint(1, max_atoms)
    seen, points = set(), []
    while len(points) < k:
        c = tuple(Fraction(r.randint(-den, den - 1), den) for _ in range(dim))
        if c not in seen:
            seen.add(c)
            points.append(Point(f"p{len(points)}", tuple(Scalar(v, 0, EXACT) for v in c)))
    X = FiniteSpace("R2", tuple(points))
    return rand_probability(r, X)


def fourier_suite(cases: int = 100, seed: int = 0) -> LawReport:
    """Normalisation, Hermitian symmetry, positive-definiteness, product law, injectivity."""
    grid = grid_points(-2.0, 2.0, 9, 2)

    def body(rep: LawReport, case: int, r: SplitMix64) -> None:
        mu = rand_coord_probability(r)
        mu_f = char_function(mu)
        pts = set()
        while len(pts) < 5:
            pts.add((float(r.rational(8, 4)), float(r.rational(8, 4))))
        pts = sorted(pts)

        def repro():
            return {"mu": measure_to_json(mu, True), "points": [list(p) for p in pts]}

        rep.record(case, "normalisation", abs(mu_f((0.0, 0.0)) - 1) <= 1e-12, repro)
        rep.record(case, "hermitian",
                   all(abs(mu_f(tuple(-c for c in p)) - mu_f(p).conjugate()) <= 1e-12 for p in pts), repro)
        rep.record(case, "positive_definite", pd_check(mu_f, pts, 1e-9).psd, repro)
        nu = rand_coord_probability(r, 4, 1)
        nu_f = char_function(nu)
        prod_f = char_function(product(mu, nu))
        rep.record(case, "product_law",
                   all(abs(prod_f(p + (p[0] - p[1],)) - mu_f(p) * nu_f((p[0] - p[1],))) <= 1e-12 for p in pts),
                   repro)
        while True:
            other = rand_coord_probability(r, 5)
            first = rand_coord_probability(r, 5)
            if not _same_measure(first, other):
                break
        rep.record(case, "injectivity_witness", injectivity_witness(first, other, grid) is not None,
                   lambda: {"mu": measure_to_json(first, True), "nu": measure_to_json(other, True)})

    return _run("fourier", cases, seed, body)


def _same_measure(a: Measure, b: Measure) -> bool:
    def atoms(m):
        return sorted((tuple(c.re for c in m.space.coords(x)), w.re) for x, w in m.atoms)
    return atoms(a) == atoms(b)


SUITES: dict[str, Callable[..., LawReport]] = {
    "monad": monad_suite,
    "commutative": commutative_suite,
    "integration": integration_suite,
    "chu": chu_suite,
    "fourier": fourier_suite,
}
