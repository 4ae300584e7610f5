"""Scattering experiments and phase shifts.

A soliton's position is the lattice index of its leftmost non-vacuum site.
After ``N`` steps of ``T_l`` a soliton that started at ``p`` with free speed
``v`` sits at ``p + N v + delta``; ``delta`` is its phase shift.  Entity
shifts are defined the same way for every ball and basket.

Entity correspondence: baskets never overtake each other, so a basket keeps
its label (labels are transported by the lattice rule under ``T_inf`` and
follow reading order otherwise).  Balls are indistinguishable; the k-th ball
of a speed class before scattering is matched with the k-th ball of that
class afterwards.  The classes are: all speed-one material, and ``F_k`` for
each ``k >= 2``.
"""

from __future__ import annotations

import json
from collections import defaultdict
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .core import INF, Configuration, Unbounded, format_capacity
from .evolution import evolve, evolve_combinatorial
from .solitons import (
    Decomposition,
    Fast,
    NotSeparated,
    SolitonCount,
    SolitonDescriptor,
    configuration_of,
    count_solitons,
    decompose,
    parse_soliton_spec,
)

Capacity = int | Unbounded


class BadOrdering(ValueError):
    """Solitons must be listed with non-increasing speed from left to right."""


class InsufficientGap(ValueError):
    pass


class HorizonTooSmall(RuntimeError):
    pass


class UnsupportedPair(ValueError):
    pass


class PredictionUndefined(ValueError):
    """The two-body laws do not apply to an intermediate state."""


def class_key(sol: SolitonDescriptor) -> tuple:
    if isinstance(sol.kind, Fast) and sol.kind.k >= 2:
        return ("fast", sol.kind.k)
    return ("slow",)


def step(config: Configuration, capacity: Capacity) -> Configuration:
    if capacity is INF:
        return evolve_combinatorial(config)
    return evolve(config, capacity)


# -- experiments --------------------------------------------------------------


@dataclass(frozen=True)
class ScatteringExperiment:
    solitons: tuple[SolitonDescriptor, ...]
    gaps: tuple[int, ...]
    capacity: Capacity = INF
    horizon: int = 100

    @property
    def config(self) -> Configuration:
        return configuration_of(self.solitons)

    def speeds(self, capacity: Capacity | None = None) -> list[int]:
        cap = self.capacity if capacity is None else capacity
        return [s.speed_under(cap) for s in self.solitons]

    def entities(self) -> tuple[dict[int, int], dict[int, int]]:
        """Soliton index of every ball id and every basket id."""
        cfg = self.config
        owner_ball, owner_basket = {}, {}
        for owners, sites in ((owner_ball, cfg.ball_sites()), (owner_basket, cfg.basket_sites())):
            for eid, pos in sites.items():
                for k, s in enumerate(self.solitons):
                    if s.position <= pos < s.end:
                        owners[eid] = k
                        break
        return owner_ball, owner_basket


def default_horizon(solitons: Sequence[SolitonDescriptor], gaps: Sequence[int]) -> int:
    support = sum(len(s.tokens) for s in solitons) + sum(gaps)
    amplitude = sum(s.balls + s.baskets for s in solitons)
    return 4 * (support + amplitude)


def build_experiment(
    specs: Iterable,
    gaps: Sequence[int] | int | None = None,
    capacity: Capacity = INF,
    horizon: int | None = None,
) -> ScatteringExperiment:
    """Lay solitons out left to right, the first starting at 0.

    ``specs`` are descriptors or strings such as ``"F3"`` and ``"B1U3F"``.
    Each gap must be at least the speed of the soliton to its right, so that
    the layout is reachable by free motion from a widely spaced one.  The
    default gap is the larger of the two neighbouring speeds.
    """
    sols = [s if isinstance(s, SolitonDescriptor) else parse_soliton_spec(s) for s in specs]
    if not sols:
        raise ValueError("an experiment needs at least one soliton")
    speeds = [s.speed_under(capacity) for s in sols]
    for a, b in zip(speeds, speeds[1:]):
        if a < b:
            raise BadOrdering(f"speeds {speeds} increase from left to right")
    n = len(sols) - 1
    if gaps is None:
        gap_list = [max(a, b) for a, b in zip(speeds, speeds[1:])]
    elif isinstance(gaps, int):
        gap_list = [gaps] * n
    else:
        gap_list = list(gaps)
    if len(gap_list) != n:
        raise ValueError(f"need {n} gaps, got {len(gap_list)}")
    for g, v in zip(gap_list, speeds[1:]):
        if g < v:
            raise InsufficientGap(f"gap {g} is below the speed {v} of the soliton to its right")
    placed = []
    pos = 0
    for k, s in enumerate(sols):
        placed.append(SolitonDescriptor(s.kind, s.tokens, pos))
        pos += len(s.tokens) + (gap_list[k] if k < n else 0)
    if horizon is None:
        horizon = default_horizon(placed, gap_list)
    return ScatteringExperiment(tuple(placed), tuple(gap_list), capacity, horizon)


# -- measurement ----------------------------------------------------------------


@dataclass(frozen=True)
class SolitonShift:
    label: str
    initial_position: int
    final_position: int
    delta: int


@dataclass
class PhaseReport:
    capacity: Capacity
    steps: tuple[int, ...]
    solitons: tuple[SolitonShift, ...]
    ball_shifts: dict[int, int]
    basket_shifts: dict[int, int]
    final: Decomposition | None = None
    schedule: tuple = ()
    matching: str = "baskets by label, balls by order within speed class"

    @property
    def deltas(self) -> tuple[int, ...]:
        return tuple(s.delta for s in self.solitons)

    def to_json(self) -> dict:
        return {
            "capacity": format_capacity(self.capacity),
            "schedule": [format_capacity(c) for c in self.schedule],
            "steps": list(self.steps),
            "solitons": [
                {
                    "label": s.label,
                    "initial_position": s.initial_position,
                    "final_position": s.final_position,
                    "delta": s.delta,
                }
                for s in self.solitons
            ],
            "ball_shifts": {str(k): v for k, v in sorted(self.ball_shifts.items())},
            "basket_shifts": {str(k): v for k, v in sorted(self.basket_shifts.items())},
            "final": None if self.final is None else [s.to_json() for s in self.final.solitons],
            "matching": self.matching,
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=2, sort_keys=True)


def run_until_sorted(config: Configuration, capacity: Capacity, horizon: int) -> tuple[Configuration, int, Decomposition]:
    """Evolve until the state is a sorted decomposition with the same shape twice in a row."""
    state = config
    prev = None
    for t in range(horizon + 1):
        dec = decompose(state, capacity)
        if isinstance(dec, Decomposition) and dec.is_sorted:
            if prev is not None and prev.shape() == dec.shape():
                return state, t, dec
            prev = dec
        else:
            prev = None
        if t < horizon:
            state = step(state, capacity)
    raise HorizonTooSmall(f"not separated and sorted within {horizon} steps")


def _labels(exp: ScatteringExperiment) -> list[str]:
    return [f"F{s.kind.k}" if isinstance(s.kind, Fast) and s.kind.k > 1 else "".join(s.tokens) for s in exp.solitons]


def _measure(exp: ScatteringExperiment, schedule: Sequence[Capacity]) -> PhaseReport:
    cfg0 = exp.config
    owner_ball, owner_basket = exp.entities()
    ball0 = cfg0.ball_sites()
    basket0 = cfg0.basket_sites()
    state = cfg0
    steps = []
    free = [0] * len(exp.solitons)
    dec = None
    for cap in schedule:
        state, n, dec = run_until_sorted(state, cap, exp.horizon)
        steps.append(n)
        for k, s in enumerate(exp.solitons):
            free[k] += n * s.speed_under(cap)

    # match balls by order inside each speed class
    init_by_class: dict[tuple, list[tuple[int, int]]] = defaultdict(list)
    for bid, pos in ball0.items():
        init_by_class[class_key(exp.solitons[owner_ball[bid]])].append((pos, bid))
    final_sites = state.ball_sites()
    final_by_class: dict[tuple, list[int]] = defaultdict(list)
    for sol in dec.solitons:
        key = class_key(sol)
        final_by_class[key].extend(p for p in final_sites.values() if sol.position <= p < sol.end)
    ball_final: dict[int, int] = {}
    for key, items in init_by_class.items():
        got = sorted(final_by_class.get(key, []))
        if len(got) != len(items):
            raise HorizonTooSmall(f"class {key}: {len(items)} balls before, {len(got)} after")
        for (_, bid), p in zip(sorted(items), got):
            ball_final[bid] = p
    basket_final = state.basket_sites()

    ball_shifts = {b: ball_final[b] - ball0[b] - free[owner_ball[b]] for b in ball0}
    basket_shifts = {b: basket_final[b] - basket0[b] - free[owner_basket[b]] for b in basket0}
    shifts = []
    for k, (s, label) in enumerate(zip(exp.solitons, _labels(exp))):
        ends = [ball_final[b] for b in ball0 if owner_ball[b] == k]
        ends += [basket_final[b] for b in basket0 if owner_basket[b] == k]
        final_pos = min(ends)
        shifts.append(SolitonShift(label, s.position, final_pos, final_pos - s.position - free[k]))
    return PhaseReport(
        capacity=schedule[-1],
        steps=tuple(steps),
        solitons=tuple(shifts),
        ball_shifts=ball_shifts,
        basket_shifts=basket_shifts,
        final=dec,
        schedule=tuple(schedule),
    )


def measure_phase(exp: ScatteringExperiment) -> PhaseReport:
    """Evolve the experiment to separation and read off every phase shift."""
    return _measure(exp, [exp.capacity])


# -- predictions ---------------------------------------------------------------


def fast_slow_pass(balls: dict[int, int], baskets: dict[int, int]) -> tuple[dict[int, int], dict[int, int]]:
    """Entity shifts of speed-one material when one fast soliton passes through it.

    ``balls`` and ``baskets`` map ids to sites; basket ids increase upward
    within a site.  Per basic piece: the ball in the tail site loses 2, every
    other ball loses 1, the top basket of the site behind each such ball
    (its special basket) keeps its place and every other basket loses 1.
    """
    at: dict[int, tuple[list[int], list[int]]] = defaultdict(lambda: ([], []))
    for b, p in balls.items():
        at[p][0].append(b)
    for b, p in baskets.items():
        at[p][1].append(b)
    dball: dict[int, int] = {}
    dbasket: dict[int, int] = {b: -1 for b in baskets}
    occupied = sorted(at)
    for p in occupied:
        here, _ = at[p]
        if len(here) > 1:
            raise PredictionUndefined(f"two slow balls at site {p}")
        if not here:
            continue
        if p - 1 not in at:
            dball[here[0]] = -2
            continue
        behind = at[p - 1][1]
        if not behind:
            raise PredictionUndefined(f"ball at {p} follows a site without baskets")
        dball[here[0]] = -1
        dbasket[max(behind)] = 0
    return dball, dbasket


@dataclass
class Prediction:
    solitons: tuple[SolitonShift, ...]
    ball_shifts: dict[int, int]
    basket_shifts: dict[int, int]

    @property
    def deltas(self) -> tuple[int, ...]:
        return tuple(s.delta for s in self.solitons)

    def to_json(self) -> dict:
        return {
            "solitons": [{"label": s.label, "delta": s.delta} for s in self.solitons],
            "ball_shifts": {str(k): v for k, v in sorted(self.ball_shifts.items())},
            "basket_shifts": {str(k): v for k, v in sorted(self.basket_shifts.items())},
        }


def predict(exp: ScatteringExperiment, capacity: Capacity | None = None) -> Prediction:
    """Phase shifts from two-body laws, factorised over every overtaking pair.

    Fast/fast: the faster gains ``2n`` and the slower loses ``2n``.  Fast/slow:
    the fast soliton gains ``2b - a`` (balls and baskets of the slow one) and
    the slow material is updated by ``fast_slow_pass`` once per fast soliton.
    """
    cap = exp.capacity if capacity is None else capacity
    sols = exp.solitons
    cfg = exp.config
    owner_ball, owner_basket = exp.entities()
    ball0 = cfg.ball_sites()
    basket0 = cfg.basket_sites()
    speeds = [s.speed_under(cap) for s in sols]
    dball = {b: 0 for b in ball0}
    dbasket = {b: 0 for b in basket0}
    slow_idx = [k for k, s in enumerate(sols) if class_key(s) == ("slow",)]
    passes = 0
    for i, si in enumerate(sols):
        for j in range(i + 1, len(sols)):
            if speeds[i] <= speeds[j]:
                continue
            sj = sols[j]
            if class_key(sj) == ("slow",):
                gain = 2 * sj.balls - sj.baskets
            else:
                gain = 2 * sj.kind.k
                for b in ball0:
                    if owner_ball[b] == j:
                        dball[b] -= gain
            for b in ball0:
                if owner_ball[b] == i:
                    dball[b] += gain
        if speeds[i] > 1 and any(k > i for k in slow_idx):
            passes += 1
    slow_balls = {b for b in ball0 if owner_ball[b] in slow_idx}
    slow_baskets = {b for b in basket0 if owner_basket[b] in slow_idx}
    for _ in range(passes):
        pb, pk = fast_slow_pass(
            {b: ball0[b] + dball[b] for b in slow_balls},
            {b: basket0[b] + dbasket[b] for b in slow_baskets},
        )
        for b, d in pb.items():
            dball[b] += d
        for b, d in pk.items():
            dbasket[b] += d
    shifts = []
    for k, (s, label) in enumerate(zip(sols, _labels(exp))):
        ends = [ball0[b] + dball[b] for b in ball0 if owner_ball[b] == k]
        ends += [basket0[b] + dbasket[b] for b in basket0 if owner_basket[b] == k]
        shifts.append(SolitonShift(label, s.position, min(ends), min(ends) - s.position))
    return Prediction(tuple(shifts), dball, dbasket)


def predict_two_body(a, b, capacity: Capacity = INF) -> Prediction:
    """Prediction for soliton ``a`` (left, faster) scattering with ``b`` (right)."""
    exp = build_experiment([a, b], capacity=capacity)
    va, vb = exp.speeds()
    if va <= vb:
        raise UnsupportedPair(f"speeds {va} and {vb}: the left soliton never catches up")
    return predict(exp)


# -- verification ----------------------------------------------------------------


@dataclass
class Verdict:
    ok: bool
    measured: PhaseReport
    predicted: Prediction
    diffs: list[str] = field(default_factory=list)

    def to_json(self) -> dict:
        return {
            "ok": self.ok,
            "measured": self.measured.to_json(),
            "predicted": self.predicted.to_json(),
            "diffs": self.diffs,
        }


def compare(measured: PhaseReport, predicted: Prediction) -> list[str]:
    diffs = []
    for m, p in zip(measured.solitons, predicted.solitons):
        if m.delta != p.delta:
            diffs.append(f"soliton {m.label}: measured {m.delta}, predicted {p.delta}")
    for name, got, want in (
        ("ball", measured.ball_shifts, predicted.ball_shifts),
        ("basket", measured.basket_shifts, predicted.basket_shifts),
    ):
        for k in sorted(want):
            if got.get(k) != want[k]:
                diffs.append(f"{name} {k}: measured {got.get(k)}, predicted {want[k]}")
    return diffs


def run_and_verify(exp: ScatteringExperiment) -> Verdict:
    measured = measure_phase(exp)
    predicted = predict(exp)
    diffs = compare(measured, predicted)
    return Verdict(not diffs, measured, predicted, diffs)


def staged_schedule(exp: ScatteringExperiment) -> list[Capacity]:
    """``T_2``, ``T_3``, ... up to the largest fast length."""
    top = max((s.kind.k for s in exp.solitons if isinstance(s.kind, Fast)), default=1)
    return list(range(2, top + 1)) or [INF]


def run_n_body(exp: ScatteringExperiment, staged: bool = False) -> Verdict:
    """Measure an n-soliton scattering and compare with the factorised prediction.

    With ``staged=True`` the state is evolved by ``T_2`` until sorted, then
    by ``T_3``, and so on, instead of by the experiment's own capacity.
    """
    schedule = staged_schedule(exp) if staged else [exp.capacity]
    measured = _measure(exp, schedule)
    predicted = predict(exp, INF if staged else exp.capacity)
    diffs = compare(measured, predicted)
    return Verdict(not diffs, measured, predicted, diffs)


# -- sorting ----------------------------------------------------------------------


@dataclass
class SortingResult:
    decomposition: Decomposition
    steps: int
    first_separation: int
    count: SolitonCount
    counts_invariant: bool


def check_sorting(config: Configuration, horizon: int = 200, capacity: Capacity = INF) -> SortingResult:
    """Evolve until sorted and shape-stable; check the census from first separation on."""
    state = config
    prev = None
    first = None
    census = None
    invariant = True
    for t in range(horizon + 1):
        dec = decompose(state, capacity)
        if isinstance(dec, Decomposition):
            c = count_solitons(dec).multisets()
            if first is None:
                first, census = t, c
            elif c != census:
                invariant = False
            if dec.is_sorted and prev is not None and prev.shape() == dec.shape():
                return SortingResult(dec, t, first, count_solitons(dec), invariant)
            prev = dec if dec.is_sorted else None
        else:
            prev = None
        if t < horizon:
            state = evolve(state, capacity)
    raise HorizonTooSmall(f"no sorted decomposition within {horizon} steps")


# -- purification by a train of fast solitons ---------------------------------------


def fast_train(tokens, k: int, count: int) -> Configuration:
    """``count`` copies of ``F_k`` (gaps ``k``) followed, after a gap ``k``, by ``tokens``."""
    sols = []
    pos = 0
    for _ in range(count):
        sols.append(SolitonDescriptor(Fast(k), ("F",) * k, pos))
        pos += 2 * k
    target = parse_soliton_spec(tokens) if isinstance(tokens, str) else parse_soliton_spec(" ".join(tokens))
    sols.append(SolitonDescriptor(target.kind, target.tokens, pos))
    return configuration_of(sols)


def is_pure(sol: SolitonDescriptor) -> bool:
    return isinstance(sol.kind, Fast) or all(t[0] == "B" for t in sol.tokens)


@dataclass
class PurificationResult:
    trains: int
    steps: int
    remnants: tuple[SolitonDescriptor, ...]
    count: SolitonCount

    @property
    def words(self) -> list[str]:
        return [s.word for s in self.remnants]


def purify(tokens, k: int = 5, max_trains: int = 70, stride: int = 10) -> PurificationResult:
    """Send ever longer trains of ``F_k`` through ``tokens`` until what is left is pure.

    Returns the pure solitons that remain (the train itself removed) and their
    census.  Trains grow by ``stride`` up to ``max_trains``.
    """
    if k < 2:
        raise ValueError("the train needs k >= 2")
    for m in range(stride, max_trains + stride, stride):
        m = min(m, max_trains)
        cfg = fast_train(tokens, k, m)
        horizon = 4 * (len(cfg) + cfg.total_balls + cfg.total_baskets)
        _, steps, dec = run_until_sorted(cfg, INF, horizon)
        rest = tuple(s for s in dec.solitons if not (isinstance(s.kind, Fast) and s.kind.k == k))
        if all(is_pure(s) for s in rest):
            return PurificationResult(m, steps, rest, count_solitons(Decomposition(rest)))
        if m == max_trains:
            break
    raise HorizonTooSmall(f"{max_trains} trains of F_{k} do not purify {tokens}")


__all__ = [
    "BadOrdering",
    "HorizonTooSmall",
    "InsufficientGap",
    "NotSeparated",
    "PhaseReport",
    "Prediction",
    "PredictionUndefined",
    "PurificationResult",
    "ScatteringExperiment",
    "SolitonShift",
    "SortingResult",
    "UnsupportedPair",
    "Verdict",
    "build_experiment",
    "check_sorting",
    "class_key",
    "compare",
    "fast_slow_pass",
    "fast_train",
    "is_pure",
    "measure_phase",
    "predict",
    "predict_two_body",
    "purify",
    "run_and_verify",
    "run_n_body",
    "run_until_sorted",
    "staged_schedule",
]
