from __future__ import annotations

import random
from fractions import Fraction

from hypothesis import given, settings
from hypothesis import strategies as st

from generators import random_zone, satisfies
from timedmon.zones import (
    Federation,
    Zone,
    canonicalize,
    extrapolate,
    intersect_guard,
    le,
)

XY = ["x", "y"]


def zone(clocks, *cons):
    return Zone.from_constraints(clocks, cons)


def test_contradiction_is_empty():
    assert zone(1, (1, 0, le(2)), (0, 1, le(-3))) is None


def test_closure_tightens_difference():
    z = zone(2, (1, 0, le(3)), (0, 2, le(-1)), (1, 2, le(5)))
    assert z.dbm[1][2] == le(2)


def test_canonicalize_idempotent_on_example():
    z = zone(2, (1, 0, le(3)), (0, 2, le(-1)), (1, 2, le(5)))
    assert canonicalize(z.dbm) == z.dbm


def test_up_of_point():
    z = Zone.point([0, 3]).up()
    assert z.to_text(XY) == "y>=3 && x-y=-3"


def test_down_keeps_difference():
    z = zone(2, (0, 1, le(-2)), (1, 0, le(3)), (2, 1, le(1)), (1, 2, le(-1)))
    d = z.down()
    assert d.contains((0, 1)) and d.contains((3, 4)) and not d.contains((0, 2))
    assert d.lower(1) == (0, True)


def test_reset_and_free():
    z = zone(2, (1, 0, le(4)), (0, 1, le(-2)))
    assert z.reset([1]).contains((0, 7))
    assert not z.reset([1]).contains((1, 7))
    assert Zone.point([0]).free([1]).to_text(["x"]) == "true"


def test_subtract_interval():
    a = zone(1, (1, 0, le(5)))
    b = zone(1, (1, 0, le(3)), (0, 1, le(-2)))
    parts = sorted(z.to_text(["x"]) for z in a.subtract(b))
    assert parts == ["x<2", "x>3 && x<=5"]


def test_subtract_diagonal():
    parts = Zone.universal(2).subtract(zone(2, (1, 2, le(1))))
    assert len(parts) == 1
    assert parts[0].to_text(XY) == "x>1 && x-y>1"


def test_includes():
    big = zone(1, (1, 0, le(5)))
    small = zone(1, (1, 0, le(3)))
    assert big.includes(small) and not small.includes(big)


def test_extrapolate_drops_large_lower_bound():
    z = zone(1, (0, 1, le(-17)))
    assert extrapolate(z, [0, 10]).to_text(["x"]) == "x>10"


def test_intersect_guard():
    z = intersect_guard(Zone.universal(1), [(1, ">", 2), (1, "<=", 4)])
    assert z.to_text(["x"]) == "x>2 && x<=4"
    assert intersect_guard(z, [(1, "=", 5)]) is None


def test_rational_bounds():
    z = Zone.point([Fraction(51, 10)]).up()
    assert z.lower(1) == (Fraction(51, 10), True)
    assert z.to_text(["x"]) == "x>=51/10"


def test_federation_algebra():
    fed = Federation(1, [zone(1, (1, 0, le(2))), zone(1, (0, 1, le(-4)))])
    gap = Federation.universal(1).subtract(fed)
    assert gap.contains((3,)) and not gap.contains((2,)) and not gap.contains((4,))
    assert fed.union(gap).same_set(Federation.universal(1))


def test_sample_lies_inside():
    rng = random.Random(3)
    for _ in range(200):
        z, cons = random_zone(rng, rng.randint(1, 3))
        assert satisfies(cons, z.sample())


def test_federation_reduce_absorbs():
    a = zone(1, (1, 0, le(5)))
    b = zone(1, (1, 0, le(3)))
    assert len(Federation(1, [a, b]).reduce()) == 1


# property-based checks -------------------------------------------------------

bounds = st.tuples(st.integers(-4, 4), st.booleans()).map(lambda t: (t[0], int(t[1])))


@st.composite
def constraint_sets(draw, clocks=2):
    n = draw(st.integers(0, 5))
    out = []
    for _ in range(n):
        i = draw(st.integers(0, clocks))
        j = draw(st.integers(0, clocks).filter(lambda j, i=i: j != i))
        out.append((i, j, draw(bounds)))
    return out


points = st.tuples(*[st.integers(0, 24).map(lambda k: Fraction(k, 4))] * 2)


@settings(max_examples=200, deadline=None)
@given(constraint_sets(), points)
def test_membership_matches_raw_constraints(cons, p):
    z = Zone.from_constraints(2, cons)
    if z is None:
        return
    assert z.contains(p) == satisfies(cons, p)


@settings(max_examples=200, deadline=None)
@given(constraint_sets(), constraint_sets(), points)
def test_subtraction_pointwise(ca, cb, p):
    a = Zone.from_constraints(2, ca)
    b = Zone.from_constraints(2, cb)
    if a is None or b is None:
        return
    parts = a.subtract(b)
    inside = sum(1 for z in parts if z.contains(p))
    assert inside == (1 if satisfies(ca, p) and not satisfies(cb, p) else 0)


@settings(max_examples=100, deadline=None)
@given(constraint_sets(), points)
def test_up_then_down_contains_original(cons, p):
    z = Zone.from_constraints(2, cons)
    if z is None:
        return
    assert z.up().includes(z) and z.down().includes(z)
    if z.contains(p):
        assert z.up().contains(tuple(x + 1 for x in p))


def test_extrapolation_only_grows():
    rng = random.Random(5)
    for _ in range(200):
        z, _ = random_zone(rng, 2, max_const=8)
        assert extrapolate(z, [0, 3, 3]).includes(z)
