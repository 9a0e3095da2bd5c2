"""
Monitoring a timed property online
==================================

"a happens within 10 time units and no b happens during the first 20".
"""

from fractions import Fraction

from timedmon import MonitorSession, MonitorSpec, Observation, fixtures, parse_mitl, compile_fragment, verdict

# the shipped automaton for the property; x is never reset
a10_nob20 = fixtures.load("a10_nob20")
print(a10_nob20.to_json())

# a deterministic automaton gives its own complement
spec = MonitorSpec.from_dtma(a10_nob20)

# one-shot verdicts: events plus the current time
for events, now in [
    ([("a", 3)], 4),
    ([("a", 11)], 11),
    ([("a", 3), ("c", 7)], 13),
    ([("a", 3), ("c", 7)], 22),  # time alone settles it
    ([("a", 3), ("c", 7), ("b", 12)], 12),
]:
    obs = Observation.of(events, now)
    print(obs, "->", verdict(spec, obs))

# the same property compiled from the formula
formula = parse_mitl("F[0,10] a & G[0,20] !b", ["a", "b", "c"])
compiled = MonitorSpec.from_dtma(compile_fragment(formula, ["a", "b", "c"]))
print(len(compiled.positive.locations), "product locations")
print(verdict(compiled, Observation.of([("a", 3)], 4)))

# streaming: events and clock ticks arrive one at a time
session = MonitorSession(spec)
print(session.event("a", 3))
print(session.tick(4))
print(session.event("c", 7))
print(session.tick(Fraction(41, 2)))  # 20.5: no b can hurt any more
print(session.event("b", 30))  # verdicts latch once conclusive
