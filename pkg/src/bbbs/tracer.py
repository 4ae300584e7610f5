"""Instrumented fast/slow scattering under ``T_inf``.

Each time step is split into three moves:

(A) every empty basket moves one site to the right, landing under the
    baskets that stay there;
(B) balls, taken left to right, move to the next free container, a box
    before the lowest free basket;
(C) at every site the balls are repacked into the box and the lowest
    baskets, a slow ball taking the box when there is a choice.

Balls carry a designation, fast or slow.  Baskets of the slow soliton are
numbered from its tail (reading order).  The top basket of the site behind a
non-initial slow ball is *special* and is paired with that ball.  When a fast
ball lands in a special basket during (B) it becomes slow and the ball paired
with the basket becomes fast; the basket is then paired with the newcomer.
The first time the ball in the tail site of the slow soliton (the initial
slow ball) is overtaken by a fast ball, the leftmost fast ball and the
initial slow ball swap designations.

The tracer checks at every integral time, and at the end, the statements
that make the fast/slow phase-shift law work; any failure is logged in
``TraceReport.violations``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

from .core import INF, Configuration, SiteLayout, SiteState
from .solitons import Decomposition, SolitonDescriptor, configuration_of, decompose, soliton


class LemmaViolation(AssertionError):
    def __init__(self, which: str, t: int, detail: str = ""):
        super().__init__(f"{which} at t={t}: {detail}")
        self.which = which
        self.t = t
        self.detail = detail


@dataclass
class Site:
    box: int | None = None
    # [basket_id, ball_id or None], bottom to top
    baskets: list[list] = field(default_factory=list)

    def balls(self) -> list[int]:
        out = [] if self.box is None else [self.box]
        out.extend(ball for _, ball in self.baskets if ball is not None)
        return out

    def state(self) -> SiteState:
        return SiteState.of(len(self.baskets), len(self.balls()))


@dataclass
class TraceStep:
    t: int
    fast_baskets: tuple[int, ...]
    occupied_baskets: tuple[int, ...]
    fast_positions: tuple[int, ...]

    @property
    def interval(self) -> tuple[int, int] | None:
        if not self.fast_baskets:
            return None
        return (min(self.fast_baskets), max(self.fast_baskets))


@dataclass
class TraceReport:
    fast_length: int
    slow_tokens: tuple[str, ...]
    steps: list[TraceStep]
    special_baskets: tuple[int, ...]
    pairing: dict[int, int]
    activation_times: dict[int, int]
    initial_ball: int | None
    role_shifts: dict[str, int]
    basket_shifts: dict[int, int]
    fast_shift: int
    violations: list[LemmaViolation]
    duration: int

    @property
    def ok(self) -> bool:
        return not self.violations

    def to_json(self) -> dict:
        return {
            "fast_length": self.fast_length,
            "slow": " ".join(self.slow_tokens),
            "duration": self.duration,
            "special_baskets": list(self.special_baskets),
            "pairing": {str(k): v for k, v in sorted(self.pairing.items())},
            "activation_times": {str(k): v for k, v in sorted(self.activation_times.items())},
            "initial_ball": self.initial_ball,
            "intervals": [
                {"t": s.t, "interval": list(s.interval)} for s in self.steps if s.interval is not None
            ],
            "role_shifts": dict(sorted(self.role_shifts.items())),
            "basket_shifts": {str(k): v for k, v in sorted(self.basket_shifts.items())},
            "fast_shift": self.fast_shift,
            "violations": [str(v) for v in self.violations],
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=2, sort_keys=True)


class FastSlowTracer:
    def __init__(self, fast_length: int, slow_tokens, gap: int | None = None):
        if fast_length < 2:
            raise ValueError("the fast soliton needs length >= 2")
        slow = soliton(slow_tokens)
        if slow.speed_under(INF) != 1:
            raise ValueError(f"{slow.word} is not a speed-one soliton")
        self.m = fast_length
        self.slow = slow
        gap = fast_length if gap is None else gap
        if gap < 1:
            raise ValueError("gap must be >= 1")
        fast = SolitonDescriptor(soliton(["F"] * fast_length).kind, ("F",) * fast_length, 0)
        self.slow_start = fast_length + gap
        placed = SolitonDescriptor(slow.kind, slow.tokens, self.slow_start)
        cfg = configuration_of([fast, placed])
        self.sites: dict[int, Site] = {}
        for k, lay in enumerate(cfg.layouts()):
            if lay.state.is_vacuum:
                continue
            self.sites[cfg.origin + k] = Site(lay.box, [[bid, ball] for bid, ball in lay.baskets])
        self.role: dict[int, str] = {}
        self.pair: dict[int, int] = {}
        self.initial: int | None = None
        self.renamed = False
        for p, site in self.sites.items():
            for ball in site.balls():
                self.role[ball] = "fast" if p < self.slow_start else "slow"
        for p in range(self.slow_start, placed.end):
            here = self.sites.get(p)
            if here is None or not here.balls():
                continue
            (ball,) = here.balls()
            if p == self.slow_start:
                self.initial = ball
            else:
                # top basket of the site behind
                self.pair[self.sites[p - 1].baskets[-1][0]] = ball
        self.special = frozenset(self.pair)
        self.has_initial = self.initial is not None
        self.handover: tuple[int, int] | None = None
        self.initial_pairing = dict(self.pair)
        self.activated: dict[int, int] = {}
        self.t = 0
        self.start_ball_pos = self.ball_positions()
        self.start_basket_pos = self.basket_positions()
        self.roles_start = self.role_positions()

    # -- views ------------------------------------------------------------------

    def ball_positions(self) -> dict[int, int]:
        return {ball: p for p, s in self.sites.items() for ball in s.balls()}

    def basket_positions(self) -> dict[int, int]:
        return {bid: p for p, s in self.sites.items() for bid, _ in s.baskets}

    def role_positions(self) -> dict[str, int]:
        pos = self.ball_positions()
        out = {f"paired:{s}": pos[b] for s, b in self.pair.items()}
        if self.initial is not None:
            out["initial"] = pos[self.initial]
        return out

    def configuration(self) -> Configuration:
        lo, hi = min(self.sites), max(self.sites) + 1
        layouts = []
        for p in range(lo, hi):
            s = self.sites.get(p)
            layouts.append(SiteLayout(None, ()) if s is None else SiteLayout(s.box, tuple(map(tuple, s.baskets))))
        return Configuration.from_layouts(lo, layouts)

    # -- moves ------------------------------------------------------------------

    def move_baskets(self) -> None:
        """(A)."""
        moving: dict[int, list[list]] = {}
        for p, s in self.sites.items():
            empty = [bk for bk in s.baskets if bk[1] is None]
            if empty:
                moving[p + 1] = empty
                s.baskets = [bk for bk in s.baskets if bk[1] is not None]
        for q, group in moving.items():
            site = self.sites.setdefault(q, Site())
            site.baskets = group + site.baskets

    def move_balls(self) -> bool:
        """(B), including the designation switch on special baskets.

        Returns True when a fast ball lands beyond the site the initial slow
        ball occupied when the move started.
        """
        order = []
        for p in sorted(self.sites):
            s = self.sites[p]
            if s.box is not None:
                order.append((p, s.box))
            order.extend((p, ball) for _, ball in s.baskets if ball is not None)
        watch = None
        if self.initial is not None and not self.renamed:
            watch = self.ball_positions()[self.initial]
        overtaken = False
        for p, ball in order:
            s = self.sites[p]
            if s.box == ball:
                s.box = None
            else:
                for bk in s.baskets:
                    if bk[1] == ball:
                        bk[1] = None
            q = p + 1
            while True:
                target = self.sites.setdefault(q, Site())
                if target.box is None:
                    target.box = ball
                    break
                free = next((bk for bk in target.baskets if bk[1] is None), None)
                if free is not None:
                    free[1] = ball
                    if self.role[ball] == "fast" and free[0] in self.special:
                        self.activate(free[0], ball)
                    break
                q += 1
            if watch is not None and self.role[ball] == "fast" and q > watch:
                overtaken = True
        return overtaken

    def activate(self, basket: int, ball: int) -> None:
        old = self.pair.get(basket)
        self.role[ball] = "slow"
        if old is not None and old != ball:
            self.role[old] = "fast"
        self.pair[basket] = ball
        self.activated.setdefault(basket, self.t)

    def rename_initial(self) -> None:
        """The leftmost fast ball takes over the role of the initial slow ball."""
        pos = self.ball_positions()
        fast = [b for b, r in self.role.items() if r == "fast"]
        leftmost = min(fast, key=lambda b: pos[b])
        self.role[leftmost] = "slow"
        self.role[self.initial] = "fast"
        self.initial = leftmost
        self.renamed = True

    def reconfigure(self) -> None:
        """(C)."""
        for s in self.sites.values():
            balls = s.balls()
            if not balls:
                continue
            balls.sort(key=lambda b: self.role[b] != "slow")
            s.box = balls[0]
            rest = balls[1:]
            for k, bk in enumerate(s.baskets):
                bk[1] = rest[k] if k < len(rest) else None

    def step(self) -> None:
        before = None if self.initial is None else self.ball_positions()[self.initial]
        self.move_baskets()
        if self.move_balls():
            self.rename_initial()
            self.handover = (self.t, before)
        self.reconfigure()
        self.sites = {p: s for p, s in self.sites.items() if s.balls() or s.baskets}
        self.t += 1

    # -- running ----------------------------------------------------------------

    def snapshot(self) -> TraceStep:
        fast_baskets, occupied, fast_pos = [], [], []
        for p, s in sorted(self.sites.items()):
            if s.box is not None and self.role[s.box] == "fast":
                fast_pos.append(p)
            for bid, ball in s.baskets:
                if ball is None:
                    continue
                occupied.append(bid)
                if self.role[ball] == "fast":
                    fast_baskets.append(bid)
                    fast_pos.append(p)
        return TraceStep(self.t, tuple(sorted(fast_baskets)), tuple(sorted(occupied)), tuple(sorted(fast_pos)))

    def check_integral(self, log: list[LemmaViolation]) -> None:
        t = self.t
        nfast = sum(1 for r in self.role.values() if r == "fast")
        if nfast != self.m:
            log.append(LemmaViolation("fast-count", t, f"{nfast} fast balls, expected {self.m}"))
        bpos = self.basket_positions()
        pos = self.ball_positions()
        if self.handover is not None and t == self.handover[0] + 2:
            if pos[self.initial] != self.handover[1]:
                log.append(
                    LemmaViolation(
                        "initial-handover",
                        t,
                        f"new initial ball at {pos[self.initial]}, old one was at {self.handover[1]}",
                    )
                )
        for s in self.special:
            site = self.sites[bpos[s]]
            if any(bid == s and ball is not None for bid, ball in site.baskets):
                log.append(LemmaViolation("special-empty", t, f"special basket {s} is occupied"))
            if self.has_initial:
                # the geometry below is only claimed without an initial slow ball
                continue
            partner = self.pair[s]
            want = bpos[s] if s in self.activated else bpos[s] + 1
            if pos[partner] != want:
                log.append(
                    LemmaViolation("pairing", t, f"basket {s} at {bpos[s]}, partner ball at {pos[partner]}")
                )

    def run(self, horizon: int | None = None) -> TraceReport:
        slow = self.slow
        if horizon is None:
            horizon = 4 * (self.slow_start + len(slow.tokens) + slow.balls + slow.baskets + self.m)
        log: list[LemmaViolation] = []
        steps = [self.snapshot()]
        self.check_integral(log)
        prev = None
        done = None
        while self.t < horizon:
            self.step()
            steps.append(self.snapshot())
            self.check_integral(log)
            dec = decompose(self.configuration())
            if isinstance(dec, Decomposition) and dec.is_sorted:
                if prev is not None and prev == dec.shape():
                    done = self.t
                    break
                prev = dec.shape()
            else:
                prev = None
        if done is None:
            log.append(LemmaViolation("horizon", self.t, "scattering did not finish"))
        return self.report(steps, log)

    def report(self, steps: list[TraceStep], log: list[LemmaViolation]) -> TraceReport:
        n = self.t
        slow = self.slow
        b, a = slow.balls, slow.baskets
        pos = self.ball_positions()
        bpos = self.basket_positions()

        # interval lemma: fast-held baskets advance strictly and avoid specials
        seen = [s for s in steps if s.fast_baskets]
        for s in seen:
            if set(s.fast_baskets) & self.special:
                log.append(LemmaViolation("interval", s.t, f"fast ball in special basket {s.fast_baskets}"))
        for s, nxt in zip(seen, seen[1:]):
            if max(s.fast_baskets) >= min(nxt.fast_baskets):
                log.append(
                    LemmaViolation("interval", nxt.t, f"{s.interval} then {nxt.interval} do not advance")
                )
        # each non-special basket is occupied at exactly one integral time
        for bid in sorted(self.start_basket_pos):
            if bid in self.special:
                continue
            k = sum(bid in s.occupied_baskets for s in steps)
            if k != 1:
                log.append(LemmaViolation("non-special-once", n, f"basket {bid} occupied at {k} integral times"))

        role_shifts = {}
        end_roles = self.role_positions()
        for key, start in self.roles_start.items():
            role_shifts[key] = end_roles[key] - start - n
            want = -2 if key == "initial" else -1
            if role_shifts[key] != want:
                log.append(LemmaViolation(key.split(":")[0] + "-shift", n, f"{key} shifted {role_shifts[key]}"))
        basket_shifts = {bid: bpos[bid] - p - n for bid, p in self.start_basket_pos.items()}
        for bid, d in basket_shifts.items():
            want = 0 if bid in self.special else -1
            if d != want:
                log.append(LemmaViolation("basket-shift", n, f"basket {bid} shifted {d}"))

        fast = sorted(pos[ball] for ball, r in self.role.items() if r == "fast")
        fast_shift = fast[0] - n * self.m
        if fast != list(range(fast[0], fast[0] + self.m)):
            log.append(LemmaViolation("fast-reassembled", n, f"fast balls at {fast}"))
        elif any(self.sites[p].box is None or self.role[self.sites[p].box] != "fast" for p in fast):
            log.append(LemmaViolation("fast-reassembled", n, "fast balls not all in boxes"))
        if fast_shift != 2 * b - a:
            log.append(LemmaViolation("fast-shift", n, f"fast soliton shifted {fast_shift}, expected {2 * b - a}"))

        return TraceReport(
            fast_length=self.m,
            slow_tokens=slow.tokens,
            steps=steps,
            special_baskets=tuple(sorted(self.special)),
            pairing=self.initial_pairing,
            activation_times=dict(self.activated),
            initial_ball=self.initial,
            role_shifts=role_shifts,
            basket_shifts=basket_shifts,
            fast_shift=fast_shift,
            violations=log,
            duration=n,
        )


def trace_fast_slow(fast_length: int, slow_tokens, gap: int | None = None, strict: bool = False) -> TraceReport:
    """Trace ``F_m`` overtaking a slow soliton; with ``strict`` the first violation is raised."""
    rep = FastSlowTracer(fast_length, slow_tokens, gap).run()
    if strict and rep.violations:
        raise rep.violations[0]
    return rep
