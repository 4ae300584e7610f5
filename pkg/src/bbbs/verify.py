"""Seeded verification suites.

Every suite draws its cases from ``random.Random(seed)``, checks them one by
one and reports ``passed/total`` together with the smallest failing case
(smallest by support length, then by amplitude, then by its printed form).
"""

from __future__ import annotations

import random
import time
from dataclasses import dataclass, field
from itertools import combinations, product
from typing import Callable, Iterator

from .core import INF, Configuration, SiteLayout, SiteState, format_capacity, normalize, render_configuration
from .evolution import (
    CarrierNotReturned,
    CarrierState,
    CombinatorialSweep,
    carrier_step,
    evolve,
    evolve_boxball,
    evolve_combinatorial,
)
from .scattering import HorizonTooSmall, build_experiment, check_sorting, run_and_verify
from .solitons import Slow, classify_basic, soliton, unbasket
from .tracer import trace_fast_slow
from .whurl import check_yang_baxter, random_weights, tropical_3wire

CAPACITIES = (1, 2, 3, INF)


# -- generators -------------------------------------------------------------------


def random_site(rng: random.Random, max_baskets: int = 3) -> SiteState:
    b = rng.randint(0, max_baskets)
    return SiteState.of(b, rng.randint(0, b + 1))


def random_configuration(rng: random.Random, max_support: int = 20, max_baskets: int = 3) -> Configuration:
    """Support length uniform in ``[1, max_support]``; every site independent."""
    n = rng.randint(1, max_support)
    return normalize(Configuration(0, tuple(random_site(rng, max_baskets) for _ in range(n))))


def random_slow_tokens(rng: random.Random, max_len: int = 6, max_index: int = 3) -> list[str]:
    """A basic slow soliton by rejection sampling over ``{F, B_a, U_a}``."""
    while True:
        toks = []
        for _ in range(rng.randint(1, max_len)):
            kind = rng.choice("FBU")
            toks.append("F" if kind == "F" else f"{kind}{rng.randint(1, max_index)}")
        if isinstance(classify_basic(toks), Slow):
            return toks


def all_sites(max_baskets: int = 3) -> list[SiteState]:
    return [SiteState.of(b, c) for b in range(max_baskets + 1) for c in range(b + 2)]


# -- results --------------------------------------------------------------------------


@dataclass
class SuiteResult:
    name: str
    passed: int
    total: int
    counterexample: str | None = None
    detail: str = ""
    seconds: float = 0.0
    notes: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return self.passed == self.total

    def summary(self) -> str:
        line = f"{self.name}: {self.passed}/{self.total} pass"
        if self.counterexample is not None:
            line += f"\n  minimal counterexample: {self.counterexample}"
            if self.detail:
                line += f"\n  {self.detail}"
        return line

    def to_json(self) -> dict:
        return {
            "suite": self.name,
            "passed": self.passed,
            "total": self.total,
            "ok": self.ok,
            "counterexample": self.counterexample,
            "detail": self.detail,
            "notes": self.notes,
        }


def _run(name: str, cases: Iterator[tuple[tuple, str, Callable[[], str | None]]]) -> SuiteResult:
    """``cases`` yields ``(size_key, printed_case, check)``; ``check`` returns an error or None."""
    t0 = time.perf_counter()
    passed = total = 0
    worst = None
    for key, printed, check in cases:
        total += 1
        try:
            err = check()
        except (CarrierNotReturned, HorizonTooSmall, AssertionError) as exc:
            err = f"{type(exc).__name__}: {exc}"
        if err is None:
            passed += 1
        elif worst is None or (key, printed) < worst[:2]:
            worst = (key, printed, err)
    res = SuiteResult(name, passed, total, seconds=time.perf_counter() - t0)
    if worst is not None:
        res.counterexample, res.detail = worst[1], worst[2]
    return res


def _config_key(c: Configuration) -> tuple:
    return (len(c), c.total_balls + c.total_baskets)


def _show(c: Configuration) -> str:
    return render_configuration(c, "triples")


# -- suites --------------------------------------------------------------------------


def suite_yang_baxter(seed: int = 0, count: int = 1000) -> SuiteResult:
    """Both whurl maps satisfy Yang-Baxter on random positive rationals."""
    rng = random.Random(seed)

    def cases():
        for _ in range(count):
            w2 = [random_weights(rng, 2) for _ in range(3)]
            w3 = [random_weights(rng, 3) for _ in range(3)]

            def check(w2=w2, w3=w3):
                bad = [m for m, w in (("2wire", w2), ("3wire-mixed", w3)) if not check_yang_baxter(*w, mode=m)]
                return f"fails for {', '.join(bad)}" if bad else None

            printed = f"2wire {[[str(x) for x in w] for w in w2]} 3wire {[[str(x) for x in w] for w in w3]}"
            yield (len(printed),), printed, check

    return _run("yang-baxter", cases())


def suite_tropical(seed: int = 0, count: int = 1000, bound: int = 20) -> SuiteResult:
    """The min-plus 3-wire map with an unbounded first carrier entry is the carrier step."""
    rng = random.Random(seed)

    def cases():
        for _ in range(count):
            b, c = rng.randint(0, bound), rng.randint(0, bound)
            e = rng.randint(0, bound)
            f = rng.randint(0, e + 1)
            site = SiteState.of(e, f)

            def check(b=b, c=c, site=site):
                new_site, new_carrier = carrier_step(CarrierState(INF, b, c), site)
                xp, yp = tropical_3wire((INF, b, c), tuple(site))
                if tuple(xp) != tuple(new_site) or yp[0] is not INF or (yp[1], yp[2]) != (new_carrier.b, new_carrier.c):
                    return f"tropical {xp} {yp} vs carrier {tuple(new_site)} {new_carrier}"
                return None

            yield (b + c + e,), f"carrier (inf,{b},{c}) site {site.triple()}", check

    return _run("tropical", cases())


def suite_commute(seed: int = 0, count: int = 500) -> SuiteResult:
    """``T_k T_l = T_l T_k`` for ``k, l`` in ``{1, 2, 3, inf}``."""
    rng = random.Random(seed)

    def cases():
        for _ in range(count):
            cfg = random_configuration(rng)

            def check(cfg=cfg):
                for k, ell in combinations(CAPACITIES, 2):
                    lhs = evolve(evolve(cfg, k), ell)
                    rhs = evolve(evolve(cfg, ell), k)
                    if not lhs.same_state(rhs):
                        return f"T_{format_capacity(k)} T_{format_capacity(ell)} differ: {_show(lhs)} vs {_show(rhs)}"
                return None

            yield _config_key(cfg), _show(cfg), check

    return _run("commute", cases())


def _equivalence_check(cfg: Configuration) -> str | None:
    a = evolve(cfg, INF)
    b = evolve_combinatorial(cfg)
    if not a.same_state(b):
        return f"carrier {_show(a)} vs lattice rule {_show(b)}"
    return None


def suite_equivalence(seed: int = 0, count: int = 500, exhaustive_sites: int = 6) -> SuiteResult:
    """Carrier and lattice-rule ``T_inf`` agree: every short word, then random states."""
    rng = random.Random(seed)
    full = exhaustive_equivalence(exhaustive_sites)

    def cases():
        for _ in range(count):
            cfg = random_configuration(rng)
            yield _config_key(cfg), _show(cfg), (lambda cfg=cfg: _equivalence_check(cfg))

    res = _run("equivalence", cases())
    res.notes.append(f"random states: {res.passed}/{res.total}")
    res.notes.extend(full.notes)
    res.notes.append(f"exhaustive checks: {full.passed}/{full.total}")
    if full.counterexample is not None:
        res.counterexample, res.detail = full.counterexample, full.detail
    res.passed += full.passed
    res.total += full.total
    res.seconds += full.seconds
    return res


def exhaustive_equivalence(max_sites: int = 6, max_baskets: int = 3) -> SuiteResult:
    """Carrier versus lattice rule on every word of at most ``max_sites`` sites.

    Both rules are left-to-right transducers.  The carrier's state is
    ``(b, c)``; the lattice sweep's state, up to labels, is the number of
    baskets and balls still moving.  A breadth-first search over pairs of
    states, feeding every possible site, visits every word of length at most
    ``max_sites``; at each pair the outputs must agree site by site and the
    tails emitted after the word must agree too.  Words are therefore
    covered without enumerating them one at a time.
    """
    t0 = time.perf_counter()
    sites = all_sites(max_baskets)
    layouts = [SiteLayout.pack(range(1, s.b + 1), range(1, s.c + 1)) for s in sites]

    def sweep_of(pending: int, flying: int) -> CombinatorialSweep:
        sw = CombinatorialSweep()
        sw.pending = list(range(1000, 1000 + pending))
        sw.in_flight.extend(range(2000, 2000 + flying))
        return sw

    def tail_carrier(carrier: CarrierState) -> list[SiteState]:
        out = []
        while not carrier.is_empty:
            site, carrier = carrier_step(carrier, SiteState(1, 0, 0))
            out.append(site)
        return out

    def tail_lattice(pending: int, flying: int) -> list[SiteState]:
        return [lay.state for lay in sweep_of(pending, flying).flush(10 * (pending + flying) + 1)]

    def trimmed(seq: list[SiteState]) -> list[SiteState]:
        while seq and seq[-1].is_vacuum:
            seq = seq[:-1]
        return seq

    passed = total = 0
    worst = None
    frontier = {(0, 0, 0, 0): ()}
    seen = dict(frontier)
    for depth in range(max_sites + 1):
        for (b, c, pend, fly), word in sorted(frontier.items()):
            total += 1
            if trimmed(tail_carrier(CarrierState(INF, b, c))) == trimmed(tail_lattice(pend, fly)):
                passed += 1
            elif worst is None:
                worst = (word, "tails differ")
        if depth == max_sites:
            break
        nxt = {}
        for (b, c, pend, fly), word in sorted(frontier.items()):
            for site, lay in zip(sites, layouts):
                out_c, carrier = carrier_step(CarrierState(INF, b, c), site)
                sw = sweep_of(pend, fly)
                out_l = sw.feed(lay).state
                total += 1
                if out_c != out_l:
                    if worst is None:
                        worst = (word + (site,), f"site outputs {out_c.triple()} vs {out_l.triple()}")
                    continue
                passed += 1
                key = (carrier.b, carrier.c, len(sw.pending), len(sw.in_flight))
                if key not in seen:
                    seen[key] = nxt[key] = word + (site,)
        frontier = nxt
    res = SuiteResult("equivalence-exhaustive", passed, total, seconds=time.perf_counter() - t0)
    res.notes.append(f"{len(seen)} reachable state pairs, words up to {max_sites} sites")
    if worst is not None:
        res.counterexample = " ".join(s.triple() for s in worst[0])
        res.detail = worst[1]
    return res


def literal_equivalence(max_sites: int = 4, max_baskets: int = 3) -> SuiteResult:
    """Carrier versus lattice rule, one word at a time."""
    sites = all_sites(max_baskets)

    def cases():
        for n in range(1, max_sites + 1):
            for word in product(sites, repeat=n):
                cfg = Configuration(0, word)
                yield (n,), _show(cfg), (lambda cfg=cfg: _equivalence_check(cfg))

    return _run("equivalence-literal", cases())


def suite_unbasket(seed: int = 0, count: int = 500) -> SuiteResult:
    """Unbasketing intertwines ``T_inf`` with the box-ball step."""
    rng = random.Random(seed)

    def cases():
        for _ in range(count):
            cfg = random_configuration(rng)

            def check(cfg=cfg):
                lhs = unbasket(evolve(cfg, INF))
                rhs = evolve_boxball(unbasket(cfg), INF)
                if not lhs.same_state(rhs):
                    return f"unbasket after step {lhs.normalized()} vs step after unbasket {rhs.normalized()}"
                return None

            yield _config_key(cfg), _show(cfg), check

    return _run("unbasket", cases())


def suite_phase(seed: int = 0, count: int = 200, max_fast: int = 8, max_len: int = 6) -> SuiteResult:
    """Measured fast-slow shifts equal the predicted ones for ``l`` in ``{2, 3, inf}``."""
    rng = random.Random(seed)

    def cases():
        for _ in range(count):
            m = rng.randint(2, max_fast)
            slow = random_slow_tokens(rng, max_len)

            def check(m=m, slow=slow):
                for cap in (2, 3, INF):
                    v = run_and_verify(build_experiment([soliton(["F"] * m), soliton(slow)], capacity=cap))
                    if not v.ok:
                        return f"l={format_capacity(cap)}: " + "; ".join(v.diffs)
                return None

            yield (m + len(slow),), f"F{m} {' '.join(slow)}", check

    return _run("phase", cases())


def suite_sorting(seed: int = 0, count: int = 500, horizon: int = 200) -> SuiteResult:
    """Random states sort into separated solitons with a conserved census."""
    rng = random.Random(seed)

    def cases():
        for _ in range(count):
            cfg = random_configuration(rng)

            def check(cfg=cfg):
                res = check_sorting(cfg, horizon)
                return None if res.counts_invariant else "soliton census changed after first separation"

            yield _config_key(cfg), _show(cfg), check

    return _run("sorting", cases())


def suite_trace(seed: int = 0, count: int = 100, max_fast: int = 8, max_len: int = 6) -> SuiteResult:
    """The three-move tracer finds no lemma violation."""
    rng = random.Random(seed)

    def cases():
        for _ in range(count):
            m = rng.randint(2, max_fast)
            slow = random_slow_tokens(rng, max_len)

            def check(m=m, slow=slow):
                rep = trace_fast_slow(m, slow)
                return None if rep.ok else "; ".join(str(v) for v in rep.violations[:3])

            yield (m + len(slow),), f"F{m} {' '.join(slow)}", check

    return _run("trace", cases())


SUITES: dict[str, Callable[..., SuiteResult]] = {
    "yang-baxter": suite_yang_baxter,
    "tropical": suite_tropical,
    "commute": suite_commute,
    "equivalence": suite_equivalence,
    "unbasket": suite_unbasket,
    "phase": suite_phase,
    "sorting": suite_sorting,
    "trace": suite_trace,
}

DEFAULT_COUNTS = {
    "yang-baxter": 1000,
    "tropical": 1000,
    "commute": 500,
    "equivalence": 500,
    "unbasket": 500,
    "phase": 200,
    "sorting": 500,
    "trace": 100,
}


def run_suite(name: str, seed: int = 0, count: int | None = None) -> SuiteResult:
    if name not in SUITES:
        raise KeyError(f"unknown suite {name!r}; choose from {', '.join(SUITES)}")
    return SUITES[name](seed=seed, count=DEFAULT_COUNTS[name] if count is None else count)


__all__ = [
    "DEFAULT_COUNTS",
    "SUITES",
    "SuiteResult",
    "all_sites",
    "exhaustive_equivalence",
    "literal_equivalence",
    "random_configuration",
    "random_site",
    "random_slow_tokens",
    "run_suite",
]
