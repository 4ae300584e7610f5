"""Birational whurl maps on adjacent loops of a cylinder network, and their
min-plus images.

Weights are exact ``Fraction`` values.  Two orientations are covered: two
wires oriented the same way, and three wires of which the last runs the
opposite way (the map behind the box-basket-ball carrier).

Conventions.  ``whurl_2wire(x, y)`` and ``whurl_3wire_mixed(x, y)`` both
return ``(x', y')`` and act on a left loop ``x`` next to a right loop ``y``;
the Yang-Baxter check composes them in that positional sense.

Tropical identifications with the carrier/site picture:

* 3 wires: ``x = carrier (a, b, c)``, ``y = site (d, e, f)``;
  ``x' = new site``, ``y' = new carrier``.
* 2 wires: ``y = carrier (a, b)``, ``x = site (c, d)``;
  ``x' = new carrier``, ``y' = new site``.
"""

from __future__ import annotations

import random
from fractions import Fraction
from typing import Callable, Sequence

from .core import INF, Unbounded

Weights = tuple[Fraction, ...]


class NonPositiveWeight(ValueError):
    """A birational weight was zero or negative."""


def as_weights(values: Sequence, n: int) -> Weights:
    if len(values) != n:
        raise ValueError(f"expected {n} weights, got {len(values)}")
    out = tuple(Fraction(v) for v in values)
    for v in out:
        if v <= 0:
            raise NonPositiveWeight(f"weights must be positive, got {v}")
    return out


def whurl_2wire(x: Sequence, y: Sequence) -> tuple[Weights, Weights]:
    x1, x2 = as_weights(x, 2)
    y1, y2 = as_weights(y, 2)
    p = (x1 + y2) / (y1 + x2)
    q = (x2 + y1) / (y2 + x1)
    xp = (y1 * p, y2 * q)
    yp = (x1 * q, x2 * p)
    assert xp[0] * xp[1] == y1 * y2 and yp[0] * yp[1] == x1 * x2
    return xp, yp


def _three_wire_polys(x1, x2, x3, y1, y2, y3):
    p = x1 * x2 + x1 * x3 + x2 * y3
    q = y2 * x3 + y1 * x3 + y1 * x2
    r = x1 * y2 + y1 * y3 + y2 * y3
    return p, q, r


def whurl_3wire_mixed(x: Sequence, y: Sequence) -> tuple[Weights, Weights]:
    x1, x2, x3 = as_weights(x, 3)
    y1, y2, y3 = as_weights(y, 3)
    p, q, r = _three_wire_polys(x1, x2, x3, y1, y2, y3)
    xp = (y1 * p / q, y2 * p / r, y3 * q / r)
    yp = (x1 * q / p, x2 * r / p, x3 * r / q)
    before = x1 * x2 * x3 * y1 * y2 * y3
    after = xp[0] * xp[1] * xp[2] * yp[0] * yp[1] * yp[2]
    assert before == after
    return xp, yp


# -- min-plus images ---------------------------------------------------------

Trop = int | Unbounded


def tropical_2wire(x: Sequence[Trop], y: Sequence[Trop]) -> tuple[tuple[Trop, Trop], tuple[Trop, Trop]]:
    """Products become sums, sums become minima, quotients become differences."""
    x1, x2 = x
    y1, y2 = y
    p = min(x1, y2) - min(y1, x2)
    q = min(x2, y1) - min(y2, x1)
    return (y1 + p, y2 + q), (x1 + q, x2 + p)


def tropical_3wire(x: Sequence[Trop], y: Sequence[Trop]) -> tuple[tuple[Trop, ...], tuple[Trop, ...]]:
    x1, x2, x3 = x
    y1, y2, y3 = y
    p = min(x1 + x2, x1 + x3, x2 + y3)
    q = min(y2 + x3, y1 + x3, y1 + x2)
    r = min(x1 + y2, y1 + y3, y2 + y3)
    xp = (y1 + p - q, y2 + p - r, y3 + q - r)
    yp = (x1 + q - p, x2 + r - p, x3 + r - q)
    return xp, yp


# -- Yang-Baxter -------------------------------------------------------------

MAPS: dict[str, tuple[Callable, int]] = {
    "2wire": (whurl_2wire, 2),
    "3wire-mixed": (whurl_3wire_mixed, 3),
}


def yang_baxter_sides(w1, w2, w3, mode: str = "3wire-mixed"):
    """Both sides of ``R12 R23 R12 = R23 R12 R23`` applied to ``(w1, w2, w3)``."""
    rmap, n = MAPS[mode]
    state = tuple(as_weights(w, n) for w in (w1, w2, w3))

    def r12(t):
        left, right = rmap(t[0], t[1])
        return (left, right, t[2])

    def r23(t):
        left, right = rmap(t[1], t[2])
        return (t[0], left, right)

    return r12(r23(r12(state))), r23(r12(r23(state)))


def check_yang_baxter(w1, w2, w3, mode: str = "3wire-mixed") -> bool:
    lhs, rhs = yang_baxter_sides(w1, w2, w3, mode)
    return lhs == rhs


def random_weights(rng: random.Random, n: int, bound: int = 1000) -> Weights:
    """Positive rationals with numerator and denominator uniform in ``[1, bound]``."""
    return tuple(Fraction(rng.randint(1, bound), rng.randint(1, bound)) for _ in range(n))


def carrier_via_tropical(carrier, site):
    """Carrier step computed through ``tropical_3wire``.

    ``carrier`` is ``(a, b, c)`` with ``a`` possibly ``INF``; returns
    ``(new_site, new_carrier)`` as plain tuples.
    """
    new_site, new_carrier = tropical_3wire(tuple(carrier), tuple(site))
    return new_site, new_carrier


__all__ = [
    "INF",
    "MAPS",
    "NonPositiveWeight",
    "as_weights",
    "carrier_via_tropical",
    "check_yang_baxter",
    "random_weights",
    "tropical_2wire",
    "tropical_3wire",
    "whurl_2wire",
    "whurl_3wire_mixed",
    "yang_baxter_sides",
]
