import json
import random
from pathlib import Path

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bbbs.core import INF, Configuration, parse_configuration
from bbbs.scattering import (
    BadOrdering,
    HorizonTooSmall,
    InsufficientGap,
    UnsupportedPair,
    build_experiment,
    check_sorting,
    fast_train,
    is_pure,
    fast_slow_pass,
    measure_phase,
    predict,
    predict_two_body,
    purify,
    run_and_verify,
    run_n_body,
    run_until_sorted,
)
from bbbs.solitons import Fast, Slow, count_solitons
from bbbs.solitons import soliton as soliton_at
from bbbs.verify import random_configuration, random_slow_tokens

GOLDEN = Path(__file__).parent / "golden"
CAPS = (2, 3, INF)


def golden_first(name):
    return parse_configuration((GOLDEN / name).read_text().splitlines()[0])


# -- building experiments -------------------------------------------------------------


@pytest.mark.parametrize("cap, name", [(INF, "figure1.txt"), (2, "figure2.txt")])
def test_build_reproduces_figure_start(cap, name):
    exp = build_experiment(["F3", "B1U3F"], gaps=2, capacity=cap)
    assert exp.config.same_state(golden_first(name))


def test_build_errors():
    with pytest.raises(BadOrdering):
        build_experiment(["F2", "F5"])
    with pytest.raises(InsufficientGap):
        build_experiment(["F5", "F3"], gaps=2)
    with pytest.raises(ValueError):
        build_experiment([])


def test_default_gap_and_horizon():
    exp = build_experiment(["F5", "F2"])
    assert exp.gaps == (5,)
    assert exp.horizon == 4 * ((5 + 2 + 5) + (5 + 2))


def test_equal_speeds_are_allowed():
    exp = build_experiment(["F5", "F3"], capacity=2)
    assert exp.speeds() == [2, 2]


# -- measurement ----------------------------------------------------------------------


@pytest.mark.parametrize("cap", CAPS)
def test_single_soliton_has_no_shift(cap):
    for spec in ("F4", "B1U3F", "B2"):
        rep = measure_phase(build_experiment([spec], capacity=cap))
        assert rep.deltas == (0,)
        assert set(rep.ball_shifts.values()) <= {0} and set(rep.basket_shifts.values()) <= {0}


def test_fast_fast_under_unbounded():
    rep = measure_phase(build_experiment(["F3", "F2"]))
    assert rep.deltas == (4, -4)


def test_figure1_experiment_entities():
    rep = measure_phase(build_experiment(["F3", "B1U3F"], gaps=2, capacity=INF))
    assert rep.deltas == (0, 0)
    # fast balls 1-3; slow balls 4 (tail of U3) and 5 (the F), special baskets 1 and 4
    assert rep.ball_shifts == {1: 0, 2: 0, 3: 0, 4: -1, 5: -1}
    assert rep.basket_shifts == {1: 0, 2: -1, 3: -1, 4: 0}
    assert [s.tokens for s in rep.final] == [("U3", "U1"), ("F", "F", "F")]


def test_figure2_experiment_matches_figure1():
    a = measure_phase(build_experiment(["F3", "B1U3F"], gaps=2, capacity=2))
    b = measure_phase(build_experiment(["F3", "B1U3F"], gaps=2, capacity=INF))
    assert a.deltas == b.deltas and a.ball_shifts == b.ball_shifts and a.basket_shifts == b.basket_shifts


def test_pure_basket_under_t2():
    rep = measure_phase(build_experiment(["F2", "B3"], capacity=2))
    assert rep.deltas == (-3, -1)


def test_horizon_too_small():
    with pytest.raises(HorizonTooSmall):
        measure_phase(build_experiment(["F5", "F2"], horizon=1))


def test_phase_report_json():
    rep = measure_phase(build_experiment(["F3", "B1U3F"]))
    doc = json.loads(rep.dumps())
    assert [s["delta"] for s in doc["solitons"]] == [0, 0]
    assert doc["capacity"] == "inf" and doc["basket_shifts"]["1"] == 0


def test_run_until_sorted_needs_two_equal_shapes():
    cfg = parse_configuration("F F V V F")
    _, t, dec = run_until_sorted(cfg, INF, 50)
    assert dec.is_sorted and t >= 1


# -- predictions ----------------------------------------------------------------------


def test_predict_fast_fast():
    assert predict_two_body("F5", "F2").deltas == (4, -4)


def test_predict_fast_slow_items():
    p = predict_two_body("F3", "B1U3F")
    assert p.deltas == (0, 0)
    assert p.basket_shifts == {1: 0, 2: -1, 3: -1, 4: 0}
    assert p.ball_shifts == {1: 0, 2: 0, 3: 0, 4: -1, 5: -1}


def test_predict_initial_slow_ball():
    p = predict_two_body("F4", "FB2")
    assert p.deltas == (0, -2)
    assert p.ball_shifts[5] == -2
    assert set(p.basket_shifts.values()) == {-1}


def test_predict_rejects_slow_slow():
    with pytest.raises(UnsupportedPair):
        predict_two_body("B2", "B1")
    with pytest.raises(UnsupportedPair):
        predict_two_body("F5", "F3", capacity=2)


def test_fast_slow_pass_on_figure1_slow_soliton():
    # B1 U3 F at sites 0, 1, 2: baskets 1 | 2 3 4, balls at sites 1 and 2
    balls, baskets = fast_slow_pass({4: 1, 5: 2}, {1: 0, 2: 1, 3: 1, 4: 1})
    assert balls == {4: -1, 5: -1}
    assert baskets == {1: 0, 2: -1, 3: -1, 4: 0}


def test_fast_slow_pass_initial_ball():
    balls, baskets = fast_slow_pass({9: 0}, {1: 1, 2: 1})
    assert balls == {9: -2} and baskets == {1: -1, 2: -1}


@pytest.mark.parametrize("m, n", [(m, n) for m in range(2, 9) for n in range(1, m)])
@pytest.mark.parametrize("cap", CAPS)
def test_fast_fast_law_whenever_speeds_differ(m, n, cap):
    exp = build_experiment([f"F{m}", f"F{n}"], capacity=cap)
    rep = measure_phase(exp)
    va, vb = exp.speeds()
    if va > vb:
        assert rep.deltas == (2 * n, -2 * n)
    else:
        assert rep.deltas == (0, 0)
    assert run_and_verify(exp).ok


@settings(max_examples=40, deadline=None)
@given(st.integers(2, 8), st.integers(0, 10**6))
def test_fast_slow_law(m, seed):
    slow = random_slow_tokens(random.Random(seed))
    reports = []
    for cap in CAPS:
        v = run_and_verify(build_experiment([f"F{m}", " ".join(slow)], capacity=cap))
        assert v.ok, v.diffs
        reports.append(v.measured)
    # the shifts do not depend on the capacity
    for r in reports[1:]:
        assert (r.deltas, r.ball_shifts, r.basket_shifts) == (reports[0].deltas, reports[0].ball_shifts, reports[0].basket_shifts)


@settings(max_examples=25, deadline=None)
@given(st.integers(2, 8), st.integers(0, 10**6))
def test_fast_shift_is_two_balls_minus_baskets(m, seed):
    slow = random_slow_tokens(random.Random(seed))
    exp = build_experiment([f"F{m}", " ".join(slow)])
    s = exp.solitons[1]
    assert measure_phase(exp).deltas[0] == 2 * s.balls - s.baskets


def test_pure_basket_law():
    for a in (1, 2, 3, 5):
        for m in (2, 4):
            assert measure_phase(build_experiment([f"F{m}", f"B{a}"])).deltas == (-a, -1)
    rep = measure_phase(build_experiment(["F3", "B2B1"]))
    assert rep.deltas == (-3, -1)


def test_leading_free_ball_does_not_change_the_slow_soliton():
    plain = measure_phase(build_experiment(["F4", "B1U3F"]))
    with_f = measure_phase(build_experiment(["F4", "F", "B1U3F"]))
    assert plain.basket_shifts == with_f.basket_shifts
    assert plain.deltas[1] == with_f.deltas[2]


# -- n bodies -------------------------------------------------------------------------


@pytest.mark.parametrize(
    "specs, deltas",
    [
        (["F4", "F3", "F2"], (10, -2, -8)),
        (["F3", "B2", "B1"], (-3, -1, -1)),
        (["F5"], (0,)),
    ],
)
def test_n_body(specs, deltas):
    v = run_n_body(build_experiment(specs))
    assert v.ok, v.diffs
    assert v.measured.deltas == deltas


@pytest.mark.parametrize("specs", [["F4", "F3", "F2"], ["F5", "F3", "B1U2F"], ["F4", "F2", "B2", "B1"]])
def test_staged_schedule_gives_the_same_totals(specs):
    direct = run_n_body(build_experiment(specs))
    staged = run_n_body(build_experiment(specs), staged=True)
    assert staged.ok and direct.ok
    assert staged.measured.deltas == direct.measured.deltas


@pytest.mark.parametrize("specs", [["F5", "F3", "F1"], ["F5", "F3", "B2"], ["F6", "F4", "F2", "B1B3"]])
def test_n_body_sums_pairwise_soliton_shifts_for_pure_solitons(specs):
    total = [0] * len(specs)
    for i in range(len(specs)):
        for j in range(i + 1, len(specs)):
            di, dj = predict_two_body(specs[i], specs[j]).deltas
            total[i] += di
            total[j] += dj
    assert run_n_body(build_experiment(specs)).measured.deltas == tuple(total)


def test_composite_slow_soliton_shifts_through_its_entities():
    # two passes move every non-special entity by -2; the leftmost entity
    # after scattering is then no longer the special basket at the tail
    v = run_n_body(build_experiment(["F5", "F3", "B1U2F"]))
    assert v.ok, v.diffs
    assert v.measured.deltas == (7, -5, -2)
    assert predict_two_body("F5", "B1U2F").deltas[1] == predict_two_body("F3", "B1U2F").deltas[1] == 0


# -- sorting --------------------------------------------------------------------------


def test_sorting_figure1_input():
    res = check_sorting(parse_configuration("F F F V V B1 U3 F"))
    assert [type(s.kind) for s in res.decomposition] == [Slow, Fast]
    assert res.first_separation == 5 and res.counts_invariant


def test_sorting_vacuum():
    res = check_sorting(Configuration(0, ()))
    assert len(res.decomposition) == 0 and res.first_separation == 0


def test_sorting_random_states():
    rng = random.Random(3)
    for _ in range(40):
        res = check_sorting(random_configuration(rng))
        assert res.counts_invariant and res.decomposition.is_sorted


def test_sorting_raises_when_the_horizon_is_short():
    with pytest.raises(HorizonTooSmall):
        check_sorting(parse_configuration("F F F V V B1 U3 F"), horizon=2)


def test_census_conserved_through_scattering():
    exp = build_experiment(["F3", "B1U3F"])
    before = count_solitons(exp.config)
    after = count_solitons(measure_phase(exp).final)
    assert before.multisets() == after.multisets()


def test_prediction_is_labelled():
    p = predict(build_experiment(["F3", "B1U3F"]))
    assert [s.label for s in p.solitons] == ["F3", "B1U3F"]


# -- purification by fast trains -------------------------------------------------------


def test_fast_train_layout():
    cfg = fast_train("B2", 3, 2)
    assert str(cfg) == "F F F V V V F F F V V V B2"


def test_is_pure():
    assert is_pure(soliton_at("F F F")) and is_pure(soliton_at("B3 B1"))
    assert not is_pure(soliton_at("B1 U3 F"))


def test_purify_census_word():
    res = purify("U10 B7 B8 U12 U9 F B9 F")
    assert res.words == ["F", "F", "F", "F", "F", "B10 B7 B29 B9"]
    assert res.trains <= 70
    assert (res.count.ball_solitons, res.count.basket_solitons) == (5, 4)
    assert sorted(res.count.basket_amplitudes) == [7, 9, 10, 29]


def test_purify_gives_up_after_max_trains():
    with pytest.raises(HorizonTooSmall):
        purify("U10 B7 B8 U12 U9 F B9 F", max_trains=10)
    with pytest.raises(ValueError):
        purify("B2", k=1)


@settings(max_examples=15, deadline=None)
@given(st.integers(0, 10**6))
def test_purify_preserves_the_census(seed):
    toks = random_slow_tokens(random.Random(seed), max_len=4)
    res = purify(toks, max_trains=200)
    assert all(is_pure(s) for s in res.remnants)
    assert res.count.multisets() == count_solitons(parse_configuration(" ".join(toks))).multisets()
