"""One test per acceptance criterion; each prints a PASS/FAIL line in the summary."""

from __future__ import annotations

import json
import math
import random
import time
from fractions import Fraction


from conftest import record
from generators import grid_points, random_dtma, random_events, random_observation, random_zone, satisfies
from oracles import RegionOracle, in_down, in_free, in_reset, in_up
from timedmon import fixtures
from timedmon.cli import EXIT_INPUT, main
from timedmon.horizons import bounded_bot_witness, step_horizon, time_horizon
from timedmon.monitor import MonitorSpec, Observation, TimedWord, Verdict, verdict
from timedmon.monitorability import strong_monitorable, weak_monitorable
from timedmon.zones import Zone, canonicalize

QUERIES = [
    ([("a", 3)], 4, Verdict.UNKNOWN),
    ([("a", 11)], 11, Verdict.BOT),
    ([("a", 3), ("c", 7)], 13, Verdict.UNKNOWN),
    ([("a", 3), ("c", 7), ("c", 22)], 22, Verdict.TOP),
    ([("a", 3), ("c", 7), ("b", 12)], 12, Verdict.BOT),
    ([("a", 3), ("c", 7)], 22, Verdict.TOP),
    ([("a", 3), ("c", 7)], 7, Verdict.UNKNOWN),
]


def test_criterion_1_example_table():
    start = time.perf_counter()
    specs = [MonitorSpec.from_dtma(fixtures.load("a10_nob20")), MonitorSpec.from_pair(*fixtures.load_pair("a10_nob20"))]
    got = [[verdict(spec, Observation.of(ev, now)) for ev, now, _ in QUERIES] for spec in specs]
    elapsed = time.perf_counter() - start
    expected = [v for _, _, v in QUERIES]
    ok = all(g == expected for g in got) and elapsed < 1
    tokens = " ".join(v.value for v in got[0])
    record(1, "verdict table for F[0,10] a & G[0,20] !b", ok, f"{tokens}; {elapsed:.2f}s")
    assert ok


def test_criterion_2_time_horizon():
    start = time.perf_counter()
    spec = MonitorSpec.from_dtma(fixtures.load("f2040b"))
    result = time_horizon(spec, Observation.of([("a", Fraction(51, 10))], Fraction(51, 10)))
    elapsed = time.perf_counter() - start
    ok = (result.verdict == Verdict.UNKNOWN
          and result.v_plus.value == Fraction(149, 10)
          and result.v_minus.value == Fraction(349, 10)
          and elapsed < 1)
    record(2, "time horizon for F[20,40] b", ok,
           f"v_plus={result.v_plus.value} v_minus={result.v_minus.value}; {elapsed:.2f}s")
    assert ok


def test_criterion_3_monitorability_battery():
    start = time.perf_counter()
    fa = MonitorSpec.from_dtma(fixtures.load("fa"))
    aig = MonitorSpec.from_dtma(fixtures.load("a_implies_gfa"))
    gfa = MonitorSpec.from_dtma(fixtures.load("gfa"))
    answers = (
        strong_monitorable(fa),
        weak_monitorable(aig),
        strong_monitorable(aig, Observation.of([("a", 0)], 0)),
        weak_monitorable(gfa),
    )
    elapsed = time.perf_counter() - start
    ok = answers == (True, True, False, False) and elapsed < 5
    record(3, "monitorability battery", ok, f"{answers}; {elapsed:.2f}s")
    assert ok


def _horizon_finite(spec, obs) -> bool:
    result = time_horizon(spec, obs)
    if result.verdict.conclusive:
        return True
    return min(result.v_plus.value, result.v_minus.value) < math.inf


def test_criterion_4_weak_iff_finite_horizon():
    rng = random.Random(20241)
    agree = total = 0
    mismatches = []
    for _ in range(100):
        spec = MonitorSpec.from_dtma(random_dtma(rng, max_locations=5, max_clocks=2, max_const=3))
        for _ in range(5):
            obs = random_observation(rng, spec.alphabet)
            w = weak_monitorable(spec, obs)
            f = _horizon_finite(spec, obs)
            total += 1
            if w == f:
                agree += 1
            else:
                mismatches.append((spec.positive.to_json(None), obs))
    record(4, "weak monitorability iff a finite time horizon", agree == total == 500, f"{agree}/{total}")
    assert agree == total == 500, mismatches[:1]


def test_criterion_5_region_oracle():
    rng = random.Random(777)
    agree = 0
    failures = []
    for i in range(50):
        spec = MonitorSpec.from_dtma(random_dtma(rng, max_locations=5, max_clocks=2, max_const=3))
        oracle = RegionOracle(spec)
        obs = random_observation(rng, spec.alphabet)
        ne_ok = (spec.ne_positive.same_set(oracle.graph.to_state_set(oracle.ne_pos))
                 and spec.ne_negative.same_set(oracle.graph.to_state_set(oracle.ne_neg)))
        weak_ok = weak_monitorable(spec, obs) == oracle.weak(obs)
        h = step_horizon(spec, obs)
        top, bot = oracle.steps(obs)
        steps_ok = ((h.n_top < math.inf) == (top < math.inf)) and ((h.n_bot < math.inf) == (bot < math.inf))
        if ne_ok and weak_ok and steps_ok:
            agree += 1
        else:
            failures.append((i, ne_ok, weak_ok, steps_ok))
    record(5, "region-graph oracle agreement", agree == 50, f"{agree}/50")
    assert agree == 50, failures


def _zone_violations(rng, shared_points) -> int:
    """Checks every zone operation of one random zone pair against raw constraints."""
    bad = 0
    z, cons = random_zone(rng, 2)
    if canonicalize(canonicalize(z.dbm)) != canonicalize(z.dbm) or canonicalize(z.dbm) != z.dbm:
        bad += 1
    other, other_cons = random_zone(rng, 2)
    parts = z.subtract(other)
    for p in shared_points:
        hits = sum(1 for part in parts if part.contains(p))
        if hits != (1 if satisfies(cons, p) and not satisfies(other_cons, p) else 0):
            bad += 1
    up, down = z.up(), z.down()
    clock = rng.randint(1, 2)
    reset, freed = z.reset([clock]), z.free([clock])
    probes = rng.sample(shared_points, 6) + [up.sample(), down.sample(), reset.sample(), freed.sample()]
    for p in probes:
        bad += up.contains(p) != in_up(cons, p)
        bad += down.contains(p) != in_down(cons, p)
        bad += reset.contains(p) != in_reset(cons, p, clock - 1)
        bad += freed.contains(p) != in_free(cons, p, clock - 1)
    both = z.reset([1, 2])
    bad += not (both.contains((0, 0)) and both.upper(1) == (0, True) and both.upper(2) == (0, True))
    bad += z.free([1, 2]) != Zone.universal(2)
    return bad


def test_criterion_6_zone_algebra():
    rng = random.Random(6)
    points = grid_points(rng, 2, 1000, high=8, denominator=4)
    violations = sum(_zone_violations(rng, points) for _ in range(1000))
    record(6, "zone algebra properties over 1000 zones", violations == 0, f"{violations} violations")
    assert violations == 0


def _latched(spec, obs, ext_events, ext_now) -> bool:
    base = verdict(spec, obs)
    if not base.conclusive:
        return True
    return verdict(spec, obs.extend(ext_events, ext_now)) == base


def _dual(spec, obs) -> bool:
    v = verdict(spec, obs)
    return verdict(spec.swapped(), obs) == v.swapped()


def test_criterion_7_irrevocability_and_duality():
    rng = random.Random(7)
    pool = [MonitorSpec.from_dtma(fixtures.load(name)) for name in fixtures.names()]
    pool += [MonitorSpec.from_dtma(random_dtma(rng, max_locations=4, max_clocks=2, max_const=3)) for _ in range(30)]
    ok = conclusive = 0
    for _ in range(200):
        spec = rng.choice(pool)
        obs = random_observation(rng, spec.alphabet, max_events=4, max_gap=8)
        ext = random_events(rng, spec.alphabet, rng.randint(0, 3), start=obs.now, max_gap=8)
        ext_now = (ext[-1][1] if ext else obs.now) + Fraction(rng.randint(0, 40), 4)
        conclusive += verdict(spec, obs).conclusive
        ok += _latched(spec, obs, ext, ext_now) and _dual(spec, obs)
    record(7, "verdict irrevocability and duality", ok == 200, f"{ok}/200, {conclusive} conclusive")
    assert ok == 200


def _bot_witness_holds(spec, obs, word: TimedWord) -> bool:
    now = word.events[-1][1] if word.events else obs.now
    return verdict(spec, obs.extend(word.events, now)) == Verdict.BOT


def test_criterion_8_bounded_bot_against_step_horizon():
    rng = random.Random(8)
    instances = [(MonitorSpec.from_dtma(fixtures.load("a10_nob20")), Observation.of([("a", 3)], 4))]
    while len(instances) < 30:
        spec = MonitorSpec.from_dtma(random_dtma(rng, max_locations=4, max_clocks=2, max_const=3))
        instances.append((spec, random_observation(rng, spec.alphabet)))
    ok = 0
    for spec, obs in instances:
        h = step_horizon(spec, obs)
        good = h.n_bot == math.inf or _bot_witness_holds(spec, obs, h.witness_bot)
        for n in (0, 1, 2):
            w = bounded_bot_witness(spec.positive, obs, n, spec.ne_positive)
            good &= (w is not None) == (n >= h.n_bot)
            if w is not None:
                good &= _bot_witness_holds(spec, obs, w)
        ok += good
    record(8, "bounded BOT search against step horizon", ok == 30, f"{ok}/30")
    assert ok == 30


def test_criterion_9_nondeterministic_rejected(tmp_path, capsys):
    ntba = {
        "locations": ["p", "q"],
        "initial": ["p"],
        "alphabet": ["a"],
        "clocks": ["x"],
        "transitions": [
            {"from": "p", "to": "p", "label": "a", "guard": [], "resets": []},
            {"from": "p", "to": "q", "label": "a", "guard": [{"clock": "x", "op": ">=", "const": 1}], "resets": []},
            {"from": "q", "to": "q", "label": "a", "guard": [], "resets": []},
        ],
        "acceptance": {"buchi": ["q"]},
    }
    path = tmp_path / "ntba.json"
    path.write_text(json.dumps(ntba))
    codes = []
    messages = []
    for mode in ("weak", "strong"):
        codes.append(main(["monitorability", "--mode", mode, "--spec", str(path)]))
        messages.append(capsys.readouterr().err)
    ok = codes == [EXIT_INPUT, EXIT_INPUT] and all("undecidable" in m and "nondeterministic" in m for m in messages)
    record(9, "nondeterministic specs rejected for monitorability", ok, messages[0].strip())
    assert ok
