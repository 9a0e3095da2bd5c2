"""
Can a monitor ever say something?
=================================

Weak: some continuation yields a conclusive verdict.  Strong: that stays
true after every continuation.
"""

from timedmon import MonitorSpec, Observation, fixtures, strong_monitorable, weak_monitorable
from timedmon.monitorability import explain

for name in fixtures.names():
    spec = MonitorSpec.from_dtma(fixtures.load(name))
    print(f"{fixtures.FORMULAS[name]:28}  weak={weak_monitorable(spec)!s:5}  strong={strong_monitorable(spec)}")

# after an initial a, "a -> G F a" can no longer be decided either way
aig = MonitorSpec.from_dtma(fixtures.load("a_implies_gfa"))
print(strong_monitorable(aig, Observation.of([("b", 0)])))
print(strong_monitorable(aig, Observation.of([("a", 0)])))

# the state sets behind an answer
facts = explain(MonitorSpec.from_dtma(fixtures.load("gfa")), Observation(), "strong")
print(facts["reach_state"], facts["in_pre_star_conclusive"], facts["in_pre_star_hopeless"])

# nondeterministic automata are refused
from timedmon.automaton import Automaton, Buchi, NotDeterministic, Transition

guess = Automaton(["p", "q"], ["p"], ["a"], [],
                  [Transition("p", "p", "a"), Transition("p", "q", "a"), Transition("q", "q", "a")],
                  Buchi({"q"}))
try:
    weak_monitorable(guess)
except NotDeterministic as exc:
    print("refused:", exc)
