from __future__ import annotations

import cmath
import math
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from measurechu.errors import DimensionMismatch, DuplicatePoints, InvalidParameter, MissingCoordinates
from measurechu.fourier import (
    char_fn,
    char_function,
    grid_points,
    injectivity_witness,
    levy_diagnostic,
    pd_check,
    quadratic_form,
)
from measurechu.laws import rand_coord_probability
from measurechu.measures import Measure, dirac, product
from measurechu.rng import SplitMix64
from measurechu.scalar import EXACT
from measurechu.spaces import FiniteSpace, Point, make_space
from measurechu.scalar import Scalar


def line(*xs):
    return make_space("R", [(f"p{i}", (x,)) for i, x in enumerate(xs)])


def test_char_examples():
    R = line(0)
    one = char_fn(dirac(R, "p0"), [[0.3], [-2.0], [17.25]])
    assert one.values == (1 + 0j,) * 3
    U = line(Fraction(-1, 2), Fraction(1, 2))
    unif = Measure.from_weights(U, {"p0": Fraction(1, 2), "p1": Fraction(1, 2)})
    assert abs(char_function(unif)([1.0]) - (-1)) <= 1e-12
    phi = dirac(line(1), "p0")
    assert abs(char_function(phi)([0.25]) - 1j) <= 1e-12


def test_char_json_and_dimension_check():
    mu = dirac(line(1), "p0")
    out = char_fn(mu, [[0.5]]).to_json()
    assert out["grid"] == [[0.5]] and len(out["values"][0]) == 2
    with pytest.raises(DimensionMismatch):
        char_fn(mu, [[0.5, 1.0]])
    with pytest.raises(MissingCoordinates):
        char_fn(dirac(make_space("X", ["a"]), "a"), [[0.0]])


def test_pd_examples():
    rep = pd_check(lambda x: 1.0, [(0.0,), (1.0,), (2.5,)])
    assert rep.psd and all(z == 1 for row in rep.gram for z in row)
    U = line(Fraction(-1, 2), Fraction(1, 2))
    unif = Measure.from_weights(U, {"p0": Fraction(1, 2), "p1": Fraction(1, 2)})
    rep = pd_check(unif, [(0.0,), (0.5,)])
    assert rep.psd
    assert all(abs(rep.gram[i][j] - (1 if i == j else 0)) <= 1e-12 for i in range(2) for j in range(2))


def test_pd_witness_for_non_pd_sample():
    f = lambda x: 1.0 if x[0] == 0 else 2.0  # noqa: E731 - Gram [[1, 2], [2, 1]]
    rep = pd_check(f, [(0.0,), (1.0,)])
    assert rep.verdict == "not_psd"
    assert rep.witness == (1, -1) and rep.witness_value == pytest.approx(-2.0)
    assert quadratic_form(rep.gram, rep.witness).real == rep.witness_value


def test_pd_schur_witness():
    # every 1x1 and 2x2 principal minor is fine, the 3x3 Gram is not
    vals = {0: 1.0, 1: 0.9, 2: 0.9, 3: -0.9}

    def f(x):
        return vals[abs(round(x[0]))]

    pts = [(0.0,), (1.0,), (3.0,)]  # differences 1, 3, 2
    rep = pd_check(f, pts)
    assert rep.verdict == "not_psd"
    assert quadratic_form(rep.gram, rep.witness).real < 0


def test_pd_input_checks():
    with pytest.raises(DuplicatePoints):
        pd_check(lambda x: 1.0, [(0.0,), (0.0,)])
    with pytest.raises(InvalidParameter):
        pd_check(lambda x: 1.0, [(0.0,)], tol=0)


@given(st.integers(0, 2 ** 32))
def test_bochner_easy_direction(seed):
    r = SplitMix64(seed)
    mu = rand_coord_probability(r)
    f = char_function(mu)
    pts = sorted({(float(r.rational(8, 4)), float(r.rational(8, 4))) for _ in range(7)})
    assert abs(f((0.0, 0.0)) - 1) <= 1e-12
    assert pd_check(f, pts, 1e-9).psd
    for p in pts:
        assert abs(f((-p[0], -p[1])) - f(p).conjugate()) <= 1e-12


@given(st.integers(0, 2 ** 32))
def test_char_matches_direct_sum_and_product_law(seed):
    r = SplitMix64(seed)
    mu = rand_coord_probability(r, 4)
    nu = rand_coord_probability(r, 3, 1)
    x = (float(r.rational()), float(r.rational()))
    y = (float(r.rational()),)
    # oracle: straight exponential sum
    direct = sum(float(w.re) * cmath.exp(2j * math.pi * sum(float(c.re) * xi for c, xi in zip(mu.space.coords(l), x)))
                 for l, w in mu.atoms)
    assert abs(char_function(mu)(x) - direct) <= 1e-12
    joint = char_function(product(mu, nu))(x + y)
    assert abs(joint - char_function(mu)(x) * char_function(nu)(y)) <= 1e-12


def test_injectivity_witness_found_and_not():
    grid = grid_points(-2.0, 2.0, 9, 2)
    assert len(grid) == 81 and grid[0] == (-2.0, -2.0) and grid[1] == (-2.0, -1.5)
    R = make_space("R2", [("o", (0, 0)), ("q", (Fraction(1, 4), 0)), ("far", (2, 0))])
    assert injectivity_witness(dirac(R, "o"), dirac(R, "q"), grid) is not None
    # points differing by the grid period are invisible to it: no witness, no claim
    assert injectivity_witness(dirac(R, "o"), dirac(R, "far"), grid) is None


def _levy_line(n_max=50):
    pts = [Point("z", (Scalar(0, 0, EXACT),))] + [
        Point(f"p{n}", (Scalar(Fraction(1, n), 0, EXACT),)) for n in range(1, n_max + 1)]
    L = FiniteSpace("L", tuple(pts))
    return L, [dirac(L, f"p{n}") for n in range(1, n_max + 1)]


def test_levy_converging():
    L, seq = _levy_line()
    grid = [(-0.5,), (-0.25,), (0.0,), (0.25,), (0.5,)]
    rep = levy_diagnostic(seq, dirac(L, "z"), grid, [{"z": 0, **{f"p{n}": Fraction(1, n) for n in range(1, 51)}}],
                          1e-1)
    assert rep.char_report.verdict == rep.weak_report.verdict == "converged"
    assert not rep.inconsistent
    # oracle: |exp(2 pi i x / n) - 1| = 2 |sin(pi x / n)|
    assert rep.char_report.deviations[4][9] == pytest.approx(2 * abs(math.sin(math.pi * 0.5 / 10)), rel=1e-12)


def test_levy_constant_and_alternating():
    L = line(0, 1)
    d0, d1 = dirac(L, "p0"), dirac(L, "p1")
    grid = [(0.25,), (0.5,)]
    tests = [{"p0": 0, "p1": 1}]
    const = levy_diagnostic([d1] * 6, d1, grid, tests, 1e-6)
    assert const.char_report.verdict == const.weak_report.verdict == "converged"
    alt = levy_diagnostic([d0 if k % 2 == 0 else d1 for k in range(12)], d0, grid, tests, 1e-3)
    assert alt.char_report.verdict == alt.weak_report.verdict == "diverged"
    assert not alt.inconsistent
