import math
import random
from fractions import Fraction

import pytest
import sympy as sp
from hypothesis import given
from hypothesis import strategies as st

from bbbs.core import INF, SiteState
from bbbs.evolution import CarrierState, carrier_step
from bbbs.whurl import (
    NonPositiveWeight,
    carrier_via_tropical,
    check_yang_baxter,
    random_weights,
    tropical_2wire,
    tropical_3wire,
    whurl_2wire,
    whurl_3wire_mixed,
    yang_baxter_sides,
)

positive = st.fractions(min_value=Fraction(1, 50), max_value=50).filter(lambda q: q > 0)


# -- an independent symbolic evaluator of the printed formulas ----------------------

X1, X2, X3, Y1, Y2, Y3 = sp.symbols("x1 x2 x3 y1 y2 y3", positive=True)

SYM_2WIRE = (
    (Y1 * (X1 + Y2) / (Y1 + X2), Y2 * (X2 + Y1) / (Y2 + X1)),
    (X1 * (X2 + Y1) / (Y2 + X1), X2 * (X1 + Y2) / (Y1 + X2)),
)

_P = X1 * X2 + X1 * X3 + X2 * Y3
_Q = Y2 * X3 + Y1 * X3 + Y1 * X2
_R = X1 * Y2 + Y1 * Y3 + Y2 * Y3
SYM_3WIRE = (
    (Y1 * _P / _Q, Y2 * _P / _R, Y3 * _Q / _R),
    (X1 * _Q / _P, X2 * _R / _P, X3 * _R / _Q),
)


def sym_eval(exprs, x, y):
    names = (X1, X2, X3)[: len(x)] + (Y1, Y2, Y3)[: len(y)]
    subs = dict(zip(names, [sp.Rational(v.numerator, v.denominator) for v in (*x, *y)]))
    return tuple(tuple(Fraction(int(sp.numer(e.subs(subs))), int(sp.denom(e.subs(subs)))) for e in side) for side in exprs)


def test_two_wire_worked_example():
    xp, yp = whurl_2wire((1, 1), (2, 3))
    assert xp == (Fraction(8, 3), Fraction(9, 4))
    assert yp == (Fraction(3, 4), Fraction(4, 3))
    assert (xp, yp) == sym_eval(SYM_2WIRE, (Fraction(1), Fraction(1)), (Fraction(2), Fraction(3)))


def test_three_wire_example_against_symbolic():
    x, y = (Fraction(1), Fraction(2), Fraction(3)), (Fraction(1),) * 3
    assert whurl_3wire_mixed(x, y) == sym_eval(SYM_3WIRE, x, y)


@given(st.tuples(positive, positive), st.tuples(positive, positive))
def test_two_wire_matches_symbolic(x, y):
    assert whurl_2wire(x, y) == sym_eval(SYM_2WIRE, x, y)


@given(st.tuples(positive, positive, positive), st.tuples(positive, positive, positive))
def test_three_wire_matches_symbolic(x, y):
    xp, yp = whurl_3wire_mixed(x, y)
    assert (xp, yp) == sym_eval(SYM_3WIRE, x, y)
    assert all(v > 0 for v in (*xp, *yp))


@pytest.mark.parametrize("v", [Fraction(1), Fraction(7, 3)])
def test_symmetric_points_are_fixed(v):
    assert whurl_2wire((v, v), (v, v)) == ((v, v), (v, v))
    assert whurl_3wire_mixed((v,) * 3, (v,) * 3) == ((v,) * 3, (v,) * 3)
    assert tropical_3wire((4, 4, 4), (4, 4, 4)) == ((4, 4, 4), (4, 4, 4))


def test_product_invariants_symbolically():
    (a, b), (c, d) = SYM_2WIRE
    assert sp.simplify(a * b - Y1 * Y2) == 0 and sp.simplify(c * d - X1 * X2) == 0
    prod = sp.prod(SYM_3WIRE[0]) * sp.prod(SYM_3WIRE[1])
    assert sp.simplify(prod - X1 * X2 * X3 * Y1 * Y2 * Y3) == 0


def test_nonpositive_weights_rejected():
    with pytest.raises(NonPositiveWeight):
        whurl_2wire((1, 0), (1, 1))
    with pytest.raises(NonPositiveWeight):
        whurl_3wire_mixed((1, 1, 1), (1, -2, 1))


# -- Yang-Baxter ----------------------------------------------------------------------


def test_yang_baxter_two_wire_symbolically():
    """Both sides agree as rational functions."""
    zs = sp.symbols("z1 z2", positive=True)

    def r(x, y):
        x1, x2 = x
        y1, y2 = y
        p = (x1 + y2) / (y1 + x2)
        q = (x2 + y1) / (y2 + x1)
        return (y1 * p, y2 * q), (x1 * q, x2 * p)

    def r12(t):
        a, b = r(t[0], t[1])
        return (a, b, t[2])

    def r23(t):
        a, b = r(t[1], t[2])
        return (t[0], a, b)

    w = ((X1, X2), (Y1, Y2), zs)
    lhs, rhs = r12(r23(r12(w))), r23(r12(r23(w)))
    for u, v in zip(lhs, rhs):
        for p, q in zip(u, v):
            assert sp.simplify(p - q) == 0


@pytest.mark.parametrize("mode", ["2wire", "3wire-mixed"])
def test_yang_baxter_random(mode):
    rng = random.Random(7)
    n = 2 if mode == "2wire" else 3
    for _ in range(200):
        assert check_yang_baxter(*(random_weights(rng, n) for _ in range(3)), mode=mode)


@pytest.mark.parametrize("mode", ["2wire", "3wire-mixed"])
def test_yang_baxter_uniform(mode):
    n = 2 if mode == "2wire" else 3
    w = (Fraction(5, 2),) * n
    lhs, rhs = yang_baxter_sides(w, w, w, mode)
    assert lhs == rhs == (w, w, w)


def test_random_weights_in_range():
    for q in random_weights(random.Random(1), 500):
        assert Fraction(1, 1000) <= q <= 1000


# -- tropicalization ------------------------------------------------------------------

SCALE = 2**-60


def valuation(q: Fraction) -> float:
    return math.log(q) / math.log(SCALE)


def lift(values):
    return tuple(Fraction(SCALE) ** v for v in values)


small = st.integers(0, 6)


@given(st.tuples(small, small), st.tuples(small, small))
def test_tropical_two_wire_is_leading_exponent(x, y):
    """At weights ``t**v`` with small ``t`` the exponent of each output is the min-plus value."""
    xp, yp = whurl_2wire(lift(x), lift(y))
    txp, typ = tropical_2wire(x, y)
    assert [round(valuation(v)) for v in (*xp, *yp)] == [*txp, *typ]
    assert all(abs(valuation(v) - t) < 0.1 for v, t in zip((*xp, *yp), (*txp, *typ)))


@given(st.tuples(small, small, small), st.tuples(small, small, small))
def test_tropical_three_wire_is_leading_exponent(x, y):
    xp, yp = whurl_3wire_mixed(lift(x), lift(y))
    txp, typ = tropical_3wire(x, y)
    assert all(abs(valuation(v) - t) < 0.1 for v, t in zip((*xp, *yp), (*txp, *typ)))


@given(st.integers(0, 30), st.integers(0, 30), st.integers(0, 30), st.data())
def test_tropical_with_unbounded_entry_is_the_carrier(b, c, e, data):
    f = data.draw(st.integers(0, e + 1))
    site = SiteState.of(e, f)
    new_site, new_carrier = carrier_step(CarrierState(INF, b, c), site)
    xp, yp = carrier_via_tropical((INF, b, c), site)
    assert xp == tuple(new_site)
    assert yp == (INF, new_carrier.b, new_carrier.c)


@given(st.integers(1, 6), st.integers(0, 6), st.integers(0, 6), st.data())
def test_tropical_with_finite_entry_is_the_finite_carrier(cap, b, c, data):
    c = min(c, cap + b)
    e = data.draw(st.integers(0, 6))
    site = SiteState.of(e, data.draw(st.integers(0, e + 1)))
    carrier = CarrierState(cap, b, c)
    new_site, new_carrier = carrier_step(carrier, site)
    xp, yp = tropical_3wire((carrier.a, b, c), tuple(site))
    assert xp == tuple(new_site)
    assert yp == (new_carrier.a, new_carrier.b, new_carrier.c)


def test_two_wire_tropical_is_the_boxball_carrier():
    """With carrier ``(a, b)`` = (free, balls) and box ``(c, d)`` = (empty, full)."""
    for a, b, d in [(5, 0, 1), (5, 2, 0), (0, 1, 0), (3, 1, 1)]:
        c = 1 - d
        new_carrier, new_box = tropical_2wire((c, d), (a, b))
        up, down = min(b, c), min(a, d)
        assert new_box == (c - up + down, d + up - down)
        assert new_carrier == (a + up - down, b - up + down)
