from __future__ import annotations

import json
import random
from fractions import Fraction

import pytest

from generators import random_dtma
from timedmon import fixtures
from timedmon.automaton import (
    Automaton,
    Buchi,
    InvalidAutomaton,
    Muller,
    NotComplete,
    NotDeterministic,
    Transition,
    buchi_to_muller,
    check_deterministic,
    complement_dtma,
    complete_with_sink,
    is_complete,
    muller_component,
    tma_to_tba,
    to_dot,
)
from timedmon.lasso import Lasso, accepts_lasso, random_lasso


def one_location(guards, acceptance=None):
    trs = [Transition("q", "q", "a", g) for g in guards]
    return Automaton(["q"], ["q"], ["a"], ["x"], trs, acceptance or Buchi({"q"}))


def test_a10_nob20_is_deterministic(a10_nob20):
    assert check_deterministic(a10_nob20) == (True, None)


def test_overlapping_guards_witness():
    a = one_location([(("x", "<=", 5),), (("x", ">=", 5),)])
    ok, witness = check_deterministic(a)
    assert not ok and witness.valuation == (5,)


def test_two_initial_locations():
    a = Automaton(["p", "q"], ["p", "q"], ["a"], [], [], Buchi({"p"}))
    assert not check_deterministic(a)[0]


def test_sink_only_where_no_guard_covers(a10_nob20):
    completed = complete_with_sink(a10_nob20)
    assert is_complete(completed)
    sink_edges = [tr for tr in completed.transitions if tr.target == "sink" and tr.source != "sink"]
    assert not any(tr.source == "q0" and tr.label == "a" for tr in sink_edges)


def test_sink_not_added_when_complete():
    a = one_location([(("x", "<", 2),), (("x", ">=", 2),)])
    assert complete_with_sink(a) is a


def test_sink_covers_gap():
    a = one_location([(("x", "<", 2),), (("x", ">", 2),)])
    completed = complete_with_sink(a)
    assert completed.step("q", "a", (2,)) == [("sink", (2,))]
    assert check_deterministic(completed)[0]


def test_buchi_to_muller_family():
    a = Automaton(["p", "q"], ["p"], ["a"], [], [], Buchi({"q"}))
    fam = set(buchi_to_muller(a).acceptance.family)
    assert fam == {frozenset({"q"}), frozenset({"p", "q"})}


def test_a10_nob20_muller_family_contains_phi(a10_nob20):
    fam = buchi_to_muller(a10_nob20).acceptance.family
    assert all("phi" in s for s in fam)
    assert len(fam) == 2 ** (len(a10_nob20.locations) - 1)


def test_complement_is_involution(a10_nob20):
    m = buchi_to_muller(complete_with_sink(a10_nob20))
    twice = complement_dtma(complement_dtma(m))
    assert set(twice.acceptance.family) == set(m.acceptance.family)
    assert not twice.acceptance.complemented


def test_complement_of_a10_nob20_rejects_phi_sets(a10_nob20):
    m = buchi_to_muller(complete_with_sink(a10_nob20))
    comp = complement_dtma(m)
    assert not comp.acceptance.accepts_set({"phi"})
    assert comp.acceptance.accepts_set({"nphi"})


def test_complement_requires_determinism_and_completeness():
    gap = one_location([(("x", "<", 2),)], Muller([{"q"}]))
    with pytest.raises(NotComplete):
        complement_dtma(gap)
    overlap = one_location([(("x", "<=", 2),), (("x", ">=", 2),)], Muller([{"q"}]))
    with pytest.raises(NotDeterministic):
        complement_dtma(overlap)


def test_single_set_component():
    a = one_location([()], Muller([{"q"}]))
    comp = muller_component(a, frozenset({"q"}))
    assert set(comp.locations) == {"q@F0.0", "q@F0.1"}
    assert comp.acceptance.accepting == {"q@F0.1"}
    assert accepts_lasso(comp, Lasso((), (("a", 1),)))


def test_muller_a10_nob20_rejects_nphi_loop(a10_nob20):
    tba = tma_to_tba(buchi_to_muller(complete_with_sink(a10_nob20)))
    word = Lasso((("b", 0),), (("b", 1),))
    assert not accepts_lasso(a10_nob20, word)
    assert not accepts_lasso(tba, word)


def test_json_roundtrip(a10_nob20):
    again = Automaton.from_json(a10_nob20.to_json())
    assert again.to_dict() == a10_nob20.to_dict()


def test_schema_rejects_bad_operator(a10_nob20):
    data = a10_nob20.to_dict()
    data["transitions"][0]["guard"] = [{"clock": "x", "op": "!=", "const": 1}]
    with pytest.raises(InvalidAutomaton):
        Automaton.from_dict(data)


def test_unknown_clock_rejected(a10_nob20):
    data = a10_nob20.to_dict()
    data["transitions"][0]["resets"] = ["nope"]
    with pytest.raises(InvalidAutomaton):
        Automaton.from_json(json.dumps(data))


def test_dot_mentions_every_location(a10_nob20):
    dot = to_dot(a10_nob20)
    assert all(f'"{q}"' in dot for q in a10_nob20.locations)


def test_shipped_pairs_look_complementary():
    for name in fixtures.names():
        pos, neg = fixtures.load_pair(name)
        rng = random.Random(name)
        for _ in range(60):
            w = random_lasso(rng, list(pos.alphabet), max_gap=pos.max_constant + 2, denominator=2)
            assert accepts_lasso(pos, w) != accepts_lasso(neg, w), (name, str(w))


def _lasso_battery(rng, count=200):
    for _ in range(count):
        a = complete_with_sink(random_dtma(rng, max_locations=4, max_clocks=2, max_const=3, muller=True))
        w = random_lasso(rng, list(a.alphabet), max_gap=4, denominator=2)
        yield a, w


def test_complement_accepts_exactly_the_other_words():
    rng = random.Random(11)
    for a, w in _lasso_battery(rng):
        assert accepts_lasso(a, w) != accepts_lasso(complement_dtma(a), w)


def test_tma_to_tba_language_equivalence():
    rng = random.Random(12)
    for a, w in _lasso_battery(rng, 120):
        assert accepts_lasso(tma_to_tba(a), w) == accepts_lasso(a, w)


def test_lasso_oracle_on_hand_words(a10_nob20):
    assert accepts_lasso(a10_nob20, Lasso((("a", 3), ("c", 7)), (("c", 1),)))
    assert not accepts_lasso(a10_nob20, Lasso((("a", 11),), (("c", 1),)))
    assert not accepts_lasso(a10_nob20, Lasso((("a", 3), ("b", Fraction(39, 2))), (("c", 1),)))


def test_lasso_events_and_shift():
    w = Lasso((("a", 1),), (("b", 2), ("c", 1)))
    assert w.events(4) == [("a", 1), ("b", 3), ("c", 4), ("b", 6)]
    assert w.period == 3
    assert w.after((("x", 0),), 5).events(3) == [("x", 0), ("a", 6), ("b", 8)]


def test_lasso_after_with_empty_prefix():
    w = Lasso((), (("b", 1),))
    assert w.after((("a", 2),), 2).events(3) == [("a", 2), ("b", 3), ("b", 4)]


def test_zero_duration_loop_rejected():
    with pytest.raises(ValueError):
        Lasso((), (("a", 0),))
