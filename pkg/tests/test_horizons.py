from __future__ import annotations

import math
import random
from fractions import Fraction

import pytest

from generators import random_dtma, random_observation
from oracles import RegionOracle
from timedmon import fixtures
from timedmon.automaton import Automaton, Buchi, Transition
from timedmon.horizons import (
    Delay,
    bounded_bot_ntba,
    bounded_bot_witness,
    step_horizon,
    time_horizon,
    wait_delay,
)
from timedmon.mitl import compile_fragment, parse_mitl
from timedmon.limits import Limits, ResourceLimitExceeded
from timedmon.monitor import MonitorSpec, Observation, Verdict, verdict
from timedmon.monitorability import weak_monitorable


def spec_of(name):
    return MonitorSpec.from_dtma(fixtures.load(name))


def test_a10_nob20_step_horizon(a10_nob20_spec):
    h = step_horizon(a10_nob20_spec)
    assert (h.n_top, h.n_bot) == (2, 1)
    end = h.witness_top.events[-1][1]
    assert verdict(a10_nob20_spec, Observation(h.witness_top, end)) == Verdict.TOP
    assert verdict(a10_nob20_spec, Observation(h.witness_bot, h.witness_bot.events[-1][1])) == Verdict.BOT


def test_step_horizon_already_bot(a10_nob20_spec):
    assert step_horizon(a10_nob20_spec, Observation.of([("b", 1)])).n_bot == 0


def test_gfa_step_horizon_infinite():
    h = step_horizon(spec_of("gfa"))
    assert h.n_top == h.n_bot == math.inf


def test_step_horizon_matches_region_distances():
    rng = random.Random(61)
    for _ in range(40):
        spec = MonitorSpec.from_dtma(random_dtma(rng, max_locations=4))
        oracle = RegionOracle(spec)
        obs = random_observation(rng, spec.alphabet)
        h = step_horizon(spec, obs)
        assert (h.n_top, h.n_bot) == oracle.steps(obs)


def test_bounded_bot_a10_nob20(a10_nob20):
    obs = Observation.of([("a", 3)], 4)
    assert not bounded_bot_ntba(a10_nob20, obs, 0)
    assert bounded_bot_ntba(a10_nob20, obs, 1)
    w = bounded_bot_witness(a10_nob20, obs, 1)
    assert w.events[0][0] == "b" and 4 <= w.events[0][1] <= 20


def test_bounded_bot_already_bot(a10_nob20):
    assert bounded_bot_ntba(a10_nob20, Observation.of([("a", 11)]), 0)


def test_bounded_bot_universal_language():
    a = Automaton(["q"], ["q"], ["a", "b"], [], [Transition("q", "q", "a"), Transition("q", "q", "b")], Buchi({"q"}))
    assert not any(bounded_bot_ntba(a, Observation.of([("a", 1)], 2), n) for n in range(3))


def test_bounded_bot_nondeterministic():
    # guessing automaton: p loops, may jump to q on a when x >= 1; q needs b forever
    a = Automaton(
        ["p", "q"], ["p"], ["a", "b"], ["x"],
        [Transition("p", "p", "a"), Transition("p", "p", "b"),
         Transition("p", "q", "a", (("x", ">=", 1),)), Transition("q", "q", "b")],
        Buchi({"q"}),
    )
    obs = Observation.of([("b", 0)], 0)
    assert not bounded_bot_ntba(a, obs, 2)


def test_bounded_bot_sequence_guard(a10_nob20):
    with pytest.raises(ResourceLimitExceeded):
        bounded_bot_ntba(a10_nob20, Observation(), 3, limits=Limits(max_sequences=10))


def test_f2040b_time_horizon():
    r = time_horizon(spec_of("f2040b"), Observation.of([("a", Fraction(51, 10))]))
    assert r.verdict == Verdict.UNKNOWN
    assert r.v_plus == Delay(Fraction(149, 10), True)
    assert r.v_minus == Delay(Fraction(349, 10), False)


def test_a10_nob20_time_horizon(a10_nob20_spec):
    r = time_horizon(a10_nob20_spec, Observation.of([("a", 3)], 4))
    assert r.v_plus == Delay(16, False)
    assert r.v_minus == Delay(0, True)


def test_time_horizon_conclusive(a10_nob20_spec):
    r = time_horizon(a10_nob20_spec, Observation.of([("a", 3), ("c", 7)], 22))
    assert r.verdict == Verdict.TOP
    assert r.to_json() == {"verdict": "TOP"}


def test_horizon_zero_without_verdict():
    r = time_horizon(spec_of("fa"), Observation.of([("b", 1)], 1))
    assert r.verdict == Verdict.UNKNOWN
    assert r.v_plus == Delay(0, True) and r.v_minus.value == math.inf


def test_wait_delays(a10_nob20_spec):
    fa10 = MonitorSpec.from_dtma(compile_fragment(parse_mitl("F[0,10] a"), ["a", "b"]))
    assert wait_delay(fa10) == Delay(10, False)
    assert wait_delay(a10_nob20_spec, Observation.of([("a", 3), ("c", 7)], 7)) == Delay(13, False)
    assert wait_delay(a10_nob20_spec, Observation.of([("b", 1)])) == Delay(0, True)


def test_wait_delay_against_ticks():
    rng = random.Random(62)
    for _ in range(60):
        spec = MonitorSpec.from_dtma(random_dtma(rng, max_locations=4))
        obs = random_observation(rng, spec.alphabet)
        d = wait_delay(spec, obs)
        for k in range(0, 40):
            e = Fraction(k, 4)
            conclusive = verdict(spec, Observation(obs.word, obs.now + e)).conclusive
            # conclusive verdicts latch, so the waiting times form an up-closed ray
            assert conclusive == (e > d.value or (e == d.value and d.attained)), (e, d)


def _extensions(spec, obs, depth, steps):
    """Grid extensions of ``obs`` with up to ``depth`` events, yielding ``(observation, elapsed)``."""
    frontier = [obs]
    for level in range(depth + 1):
        nxt = []
        for o in frontier:
            for k in steps:
                t = o.now + k
                yield Observation(o.word, t), t - obs.now
                if level < depth:
                    nxt.extend(o.extend([(s, t)]) for s in spec.alphabet)
        frontier = nxt


def test_time_horizon_is_a_lower_bound_on_grid_extensions():
    rng = random.Random(63)
    steps = [Fraction(k, 2) for k in range(0, 9)]
    for _ in range(25):
        spec = MonitorSpec.from_dtma(random_dtma(rng, max_locations=3, max_clocks=1))
        obs = random_observation(rng, spec.alphabet, max_events=2)
        r = time_horizon(spec, obs)
        if r.verdict.conclusive:
            continue
        for ext, elapsed in _extensions(spec, obs, 2, steps):
            v = verdict(spec, ext)
            if v == Verdict.TOP:
                assert r.v_plus.key() <= (elapsed, 0)
            elif v == Verdict.BOT:
                assert r.v_minus.key() <= (elapsed, 0)


def test_weak_iff_some_horizon_finite_on_fixtures():
    for name in fixtures.names():
        spec = spec_of(name)
        for events in ([], [("a", 0)], [("b", 0)], [("a", 3), ("b", 25)]):
            events = [(s, t) for s, t in events if s in spec.alphabet]
            obs = Observation.of(events)
            r = time_horizon(spec, obs)
            finite = r.verdict.conclusive or r.v_plus.finite or r.v_minus.finite
            assert weak_monitorable(spec, obs) == finite, (name, events)


def test_verdict_consistency(a10_nob20_spec):
    for events, now in [([("b", 1)], 1), ([("a", 3), ("c", 7)], 30)]:
        obs = Observation.of(events, now)
        assert time_horizon(a10_nob20_spec, obs).verdict == verdict(a10_nob20_spec, obs)
