"""Time evolutions of the box-basket-ball system.

Three independent routes to one time step are provided:

* ``carrier_step`` / ``evolve``: the piecewise-linear carrier map, for a
  carrier of any capacity ``l`` (``INF`` for unbounded).  Labels are carried
  over in reading order; this route does not move entities.
* ``carrier_step_combinatorial``: the unbounded carrier described in words
  (swap empty baskets, then drop balls and pick up the old ones), with
  entity labels.
* ``evolve_combinatorial``: the two-move rule on the lattice itself (shift
  every empty basket one site right, then move every ball left to right to the
  next free box or basket), with entity labels.

``evolve_boxball`` is the classic Takahashi-Satsuma system.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Iterable, NamedTuple

from .core import (
    EMPTY_LAYOUT,
    INF,
    BoxBallConfiguration,
    Configuration,
    SiteLayout,
    SiteState,
    Unbounded,
    normalize,
)

Capacity = int | Unbounded


class CarrierNotReturned(RuntimeError):
    """The carrier still held cargo after the trailing-vacuum bound."""


@dataclass(frozen=True)
class CarrierState:
    capacity: Capacity
    b: int = 0
    c: int = 0

    def __post_init__(self):
        if self.b < 0 or self.c < 0:
            raise ValueError(f"negative carrier cargo {self}")
        if self.capacity is not INF:
            if self.capacity < 1:
                raise ValueError("capacity must be >= 1")
            if self.c > self.capacity + self.b:
                raise ValueError(f"carrier overloaded: {self}")

    @property
    def a(self) -> Capacity:
        if self.capacity is INF:
            return INF
        return self.capacity + self.b - self.c

    @property
    def is_empty(self) -> bool:
        return self.b == 0 and self.c == 0

    def __iter__(self):
        return iter((self.a, self.b, self.c))


def empty_carrier(capacity: Capacity = INF) -> CarrierState:
    return CarrierState(capacity)


def carrier_step(carrier: CarrierState, site: SiteState) -> tuple[SiteState, CarrierState]:
    """One carrier/site interaction via the min-plus formulas.

    Works for finite and unbounded capacity alike (``INF`` obeys min-plus
    arithmetic).  Returns ``(new_site, new_carrier)``.
    """
    a, b, c = carrier.a, carrier.b, carrier.c
    d, e, f = site
    m1 = min(a + b, a + c, b + f)
    m2 = min(e + c, d + c, d + b)
    m3 = min(a + e, d + f, e + f)
    new_site = SiteState(d + m1 - m2, e + m1 - m3, f + m2 - m3)
    new_carrier = CarrierState(carrier.capacity, b - m1 + m3, c - m2 + m3)
    return new_site, new_carrier


class Cargo(NamedTuple):
    """Labelled load of an unbounded carrier: basket ids and a FIFO of ball ids."""

    baskets: tuple[int, ...] = ()
    balls: tuple[int, ...] = ()


def carry_through(cargo: Cargo, layout: SiteLayout) -> tuple[SiteLayout, Cargo]:
    """Entity-level unbounded carrier passing one site."""
    empty = [bid for bid, ball in layout.baskets if ball is None]
    full = [(bid, ball) for bid, ball in layout.baskets if ball is not None]
    # the carried baskets come from the left, so they go under the ones that stay
    stack = list(cargo.baskets) + [bid for bid, _ in full]
    free = (layout.box is None) + len(cargo.baskets)
    queue = list(cargo.balls)
    dropped, queue = queue[:free], queue[free:]
    queue.extend(layout.ball_ids)
    return SiteLayout.pack(stack, dropped), Cargo(tuple(empty), tuple(queue))


def carrier_step_combinatorial(carrier, site):
    """Unbounded carrier step by the verbal rule.

    She picks up every empty basket and leaves the ones she carried, then
    drops as many balls as fit and collects the balls that were there before.
    Accepts ``(CarrierState, SiteState)`` and returns counts, or
    ``(Cargo, SiteLayout)`` and returns labelled results.
    """
    if isinstance(site, SiteLayout):
        return carry_through(carrier, site)
    if carrier.capacity is not INF:
        raise ValueError("the verbal carrier rule is stated for unbounded capacity only")
    d, e, f = site
    nb = e
    cargo = Cargo(tuple(range(nb + 1, nb + 1 + carrier.b)), tuple(range(-carrier.c, 0)))
    layout = SiteLayout.pack(range(1, nb + 1), range(1, f + 1))
    new_layout, new_cargo = carry_through(cargo, layout)
    return new_layout.state, CarrierState(INF, len(new_cargo.baskets), len(new_cargo.balls))


def _sweep_inf(sites: Iterable[SiteState]) -> tuple[list[SiteState], int, int]:
    out = []
    append = out.append
    b = c = 0
    vac = SiteState(1, 0, 0)
    for d, e, f in sites:
        if not (b or c or e or f):
            append(vac)
            continue
        de = d if d < e else e
        m2 = e + c
        if d + c < m2:
            m2 = d + c
        if d + b < m2:
            m2 = d + b
        append(SiteState(d + b + f - m2, e + b - de, m2 - de))
        c = c + f + de - m2
        b = de
    return out, b, c


def _sweep_finite(sites: Iterable[SiteState], capacity: int) -> tuple[list[SiteState], int, int]:
    out = []
    append = out.append
    b = c = 0
    vac = SiteState(1, 0, 0)
    for d, e, f in sites:
        if not (b or c or e or f):
            append(vac)
            continue
        a = capacity + b - c
        m1 = min(a + b, a + c, b + f)
        m2 = min(e + c, d + c, d + b)
        m3 = min(a + e, d + f, e + f)
        append(SiteState(d + m1 - m2, e + m1 - m3, f + m2 - m3))
        b, c = b - m1 + m3, c - m2 + m3
    return out, b, c


def evolve(config: Configuration, capacity: Capacity = INF) -> Configuration:
    """Apply ``T_l`` once.

    The carrier ``u_l`` sweeps the window and then trailing vacuum until it is
    empty again; that takes at most ``total_balls + 1`` extra sites.
    Labels keep their reading order.
    """
    sites = config.sites
    if capacity is INF:
        out, b, c = _sweep_inf(sites)
    else:
        out, b, c = _sweep_finite(sites, capacity)
    carrier = CarrierState(capacity, b, c)
    bound = config.total_balls + 1
    while not carrier.is_empty:
        if len(out) - len(sites) >= bound:
            raise CarrierNotReturned(f"carrier still holds {carrier} after {bound} trailing sites")
        site, carrier = carrier_step(carrier, SiteState(1, 0, 0))
        out.append(site)
    return normalize(Configuration(config.origin, tuple(out), config.ball_ids, config.basket_ids))


class CombinatorialSweep:
    """Streams the two-move rule over the lattice, one site at a time.

    Move 1 shifts each empty basket one site to the right (it lands under the
    baskets that stay there).  Move 2 takes the balls from left to right and
    puts each into the first free container after its own position, where the
    baskets arriving at a site come before that site's box.  Finally balls at
    each site are repacked box first, lower baskets first.

    Because every container left of the current site is final once the balls
    from further left have been placed, the two moves can be streamed:
    ``pending`` holds the empty baskets leaving the last site and ``in_flight``
    the balls that have not found a container yet.
    """

    def __init__(self):
        self.pending: list[int] = []
        self.in_flight: deque[int] = deque()

    def copy(self) -> CombinatorialSweep:
        other = CombinatorialSweep()
        other.pending = list(self.pending)
        other.in_flight = deque(self.in_flight)
        return other

    @property
    def idle(self) -> bool:
        return not self.pending and not self.in_flight

    def feed(self, layout: SiteLayout) -> SiteLayout:
        arrived = self.pending
        self.pending = [bid for bid, ball in layout.baskets if ball is None]
        stayed = [(bid, ball) for bid, ball in layout.baskets if ball is not None]
        # containers in left-to-right order: [basket, ball-or-None]
        cells = [[bid, None] for bid in arrived]
        cells.append([None, layout.box])
        cells.extend([bid, ball] for bid, ball in stayed)
        own = [k for k, cell in enumerate(cells) if cell[1] is not None]
        for cell in cells:
            if cell[1] is None and self.in_flight:
                cell[1] = self.in_flight.popleft()
        for k in own:
            ball = cells[k][1]
            cells[k][1] = None
            for cell in cells[k + 1 :]:
                if cell[1] is None:
                    cell[1] = ball
                    break
            else:
                self.in_flight.append(ball)
        stack = [cell[0] for cell in cells if cell[0] is not None]
        balls = [cell[1] for cell in cells if cell[1] is not None]
        return SiteLayout.pack(stack, balls)

    def flush(self, bound: int) -> list[SiteLayout]:
        out = []
        while not self.idle:
            if len(out) >= bound:
                raise CarrierNotReturned(
                    f"{len(self.pending)} baskets and {len(self.in_flight)} balls still moving"
                )
            out.append(self.feed(EMPTY_LAYOUT))
        return out


def evolve_combinatorial(config: Configuration) -> Configuration:
    """``T_inf`` by the two-move lattice rule, transporting entity labels."""
    sweep = CombinatorialSweep()
    out = [sweep.feed(lay) for lay in config.layouts()]
    out.extend(sweep.flush(config.total_balls + 1))
    return normalize(Configuration.from_layouts(config.origin, out))


def evolve_by_carrier_rule(config: Configuration) -> Configuration:
    """``T_inf`` by sweeping the labelled verbal carrier across the lattice."""
    cargo = Cargo()
    out = []
    for lay in config.layouts():
        lay, cargo = carry_through(cargo, lay)
        out.append(lay)
    bound = config.total_balls + 1
    while cargo.baskets or cargo.balls:
        if len(out) - len(config) >= bound:
            raise CarrierNotReturned(f"cargo {cargo} after {bound} trailing sites")
        lay, cargo = carry_through(cargo, EMPTY_LAYOUT)
        out.append(lay)
    return normalize(Configuration.from_layouts(config.origin, out))


def evolve_boxball(config: BoxBallConfiguration, capacity: Capacity = INF) -> BoxBallConfiguration:
    """Takahashi-Satsuma step with a carrier of the given capacity."""
    a, b = capacity, 0
    out = []
    cells = list(config.cells)
    k = 0
    while k < len(cells) or b:
        d = cells[k] if k < len(cells) else 0
        c = 1 - d
        up = min(b, c)
        down = min(a, d)
        a, b = a + up - down, b - up + down
        out.append(d + up - down)
        k += 1
        if k > len(cells) + config.balls + 1:
            raise CarrierNotReturned("box-ball carrier did not empty")
    return BoxBallConfiguration(config.origin, tuple(out)).normalized()


def orbit(config: Configuration, capacity: Capacity = INF, steps: int = 1, combinatorial: bool = False) -> list[Configuration]:
    """``[c, T c, T^2 c, ..., T^steps c]`` with element 0 normalized."""
    if combinatorial and capacity is not INF:
        raise ValueError("the lattice rule exists for unbounded capacity only")
    state = normalize(config)
    out = [state]
    for _ in range(steps):
        state = evolve_combinatorial(state) if combinatorial else evolve(state, capacity)
        out.append(state)
    return out


def speed(kind_fast_length: int | None, capacity: Capacity) -> int:
    """Free speed of ``F_k`` (pass ``k``) or of a speed-one soliton (pass None)."""
    if kind_fast_length is None:
        return 1
    return kind_fast_length if capacity is INF else min(capacity, kind_fast_length)
