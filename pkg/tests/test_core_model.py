import pytest
from hypothesis import given, strategies as st

from oracles import torus_line_intersections
from pantsblocks.core_model import (
    S04, S05, S11, S12, NotDecomposable, Slope, SupportId, SurfaceType, UnsupportedSurface,
    admits_pants_decomposition, decomposition_census, euler_characteristic, farey_neighbors,
    farey_neighbors_between, farey_slopes, is_elementary_move, slope_intersection,
)
from pantsblocks.pgraph_pcomplex import pgraph_from_decomposition

slopes = st.tuples(st.integers(-12, 12), st.integers(-12, 12)).filter(lambda t: t != (0, 0)).map(lambda t: Slope(*t))


@pytest.mark.parametrize("g,n,chi", [(2, 0, -2), (0, 3, -1), (1, 2, -2)])
def test_euler_characteristic(g, n, chi):
    assert euler_characteristic(SurfaceType(g, n)) == chi


@pytest.mark.parametrize("g,n,ok", [(1, 0, False), (0, 4, True), (0, 2, False), (0, 0, False),
                                    (0, 1, False), (0, 3, True), (1, 1, True)])
def test_admits_pants_decomposition(g, n, ok):
    assert admits_pants_decomposition(SurfaceType(g, n)) is ok


@pytest.mark.parametrize("g,n", [(2, 0), (1, 1), (0, 5), (0, 3), (1, 2), (0, 4), (3, 0), (2, 2), (0, 7)])
def test_census_matches_a_built_decomposition(g, n):
    s = SurfaceType(g, n)
    curves, pants = decomposition_census(s)
    built = _caterpillar(g, n)
    assert len(built) == pants
    interior = {c for p in built for c in p if not c.startswith("d")}
    assert len(interior) == curves
    graph = pgraph_from_decomposition(s, built)
    assert graph.betti() == g and len(graph.leaves()) == n


def _caterpillar(g, n):
    """Pants of S(g,n) built as a chain with genus loops hanging off it."""
    slots = [("loop", i) for i in range(g)] + [("end", i) for i in range(n)]
    if g == 1 and n == 1:
        return [("c0", "c0", "d0")]
    if g == 2 and n == 0:
        return [("c0", "c0", "m"), ("c1", "c1", "m")]
    pants, counter = [], iter(range(1000))

    def hang(slot):
        kind, i = slot
        if kind == "end":
            return f"d{i}"
        x, y = f"l{next(counter)}", f"c{next(counter)}"
        pants.append((y, y, x))
        return x

    if len(slots) < 3:
        raise ValueError("too small for the chain construction")
    labels = [hang(s) for s in slots]
    if len(labels) == 3:
        pants.append(tuple(labels))
        return pants
    spine = [f"m{next(counter)}" for _ in range(len(labels) - 3)]
    pants.append((labels[0], labels[1], spine[0]))
    for j in range(len(spine) - 1):
        pants.append((spine[j], labels[j + 2], spine[j + 1]))
    pants.append((spine[-1], labels[-2], labels[-1]))
    return pants


def test_census_examples():
    assert decomposition_census(SurfaceType(2, 0)) == (3, 2)
    assert decomposition_census(SurfaceType(1, 1)) == (1, 1)
    assert decomposition_census(S05) == (2, 3)


def test_census_rejects_small_surfaces():
    with pytest.raises(NotDecomposable):
        decomposition_census(SurfaceType(1, 0))


@given(st.integers(0, 6), st.integers(0, 8))
def test_census_is_integral_and_counts_pants(g, n):
    s = SurfaceType(g, n)
    if not admits_pants_decomposition(s):
        return
    curves, pants = decomposition_census(s)
    assert -pants == euler_characteristic(s)
    assert 2 * curves + n == 3 * pants


def test_slope_canonical_form():
    assert Slope(2, -4) == Slope(-1, 2)
    assert Slope(-3, 0) == Slope(1, 0)
    assert str(Slope(1, 0)) == "inf"
    assert Slope.parse("inf") == Slope(1, 0)
    assert Slope.parse("-2/6") == Slope(-1, 3)
    with pytest.raises(ValueError):
        Slope(0, 0)


@given(slopes)
def test_slope_invariants(x):
    from math import gcd
    assert gcd(x.p, x.q) == 1 and x.q >= 0
    assert x.q > 0 or (x.p, x.q) == (1, 0)
    assert Slope.parse(str(x)) == x


def test_intersection_examples():
    assert slope_intersection(S11, Slope(0, 1), Slope(1, 0)) == 1
    assert slope_intersection(S11, Slope(1, 2), Slope(1, 2)) == 0
    assert slope_intersection(S04, Slope(0, 1), Slope(1, 0)) == 2
    with pytest.raises(UnsupportedSurface):
        slope_intersection(S05, Slope(0, 1), Slope(1, 0))


@given(slopes, slopes)
def test_intersection_symmetric_and_vanishes_on_equal(x, y):
    for s in (S11, S04):
        assert slope_intersection(s, x, y) == slope_intersection(s, y, x)
        assert (slope_intersection(s, x, y) == 0) == (x == y)


@given(st.tuples(st.integers(-6, 6), st.integers(-6, 6)).filter(lambda t: t != (0, 0)),
       st.tuples(st.integers(-6, 6), st.integers(-6, 6)).filter(lambda t: t != (0, 0)))
def test_intersection_matches_line_oracle(a, b):
    x, y = Slope(*a), Slope(*b)
    assert slope_intersection(S11, x, y) == torus_line_intersections(x, y)


def test_elementary_move_examples():
    assert is_elementary_move(S11, Slope(0, 1), Slope(1, 1))
    assert not is_elementary_move(S04, Slope(0, 1), Slope(2, 1))
    assert not is_elementary_move(S11, Slope(3, 5), Slope(3, 5))
    with pytest.raises(UnsupportedSurface):
        is_elementary_move(S12, Slope(0, 1), Slope(1, 1))


def test_farey_neighbors_between_is_the_lattice_answer():
    for x in farey_slopes(6):
        for z in farey_neighbors(x, 6):
            third = set(farey_neighbors_between(x, z))
            brute = {y for y in farey_slopes(14)
                     if abs(x.determinant(y)) == 1 and abs(z.determinant(y)) == 1}
            assert third == brute


def test_support_ids():
    s = SupportId.parse("h1:1,2")
    assert s.kind == S12 and str(s) == "h1:1,2"
    assert SupportId.parse("h1:(1,2)") == s
    with pytest.raises(ValueError):
        SupportId("x", SurfaceType(2, 0))
    with pytest.raises(ValueError):
        SupportId.parse("nokind")
    assert SurfaceType.parse("(0,4)") == S04
