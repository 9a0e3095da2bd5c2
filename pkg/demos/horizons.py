"""
How far away is a verdict?
==========================

Counted in events (step horizon) or in elapsed time (time horizon), plus the
delay after which waiting alone is enough.
"""

from fractions import Fraction

from timedmon import MonitorSpec, Observation, bounded_bot_ntba, fixtures, step_horizon, time_horizon, wait_delay
from timedmon.monitor import format_rational

a10_nob20 = MonitorSpec.from_dtma(fixtures.load("a10_nob20"))

# fewest further events, with witness continuations
h = step_horizon(a10_nob20)
print(h.n_top, h.witness_top)
print(h.n_bot, h.witness_bot)

# the same bound from the letter-sequence search, which also works without determinism
obs = Observation.of([("a", 3)], 4)
print([bounded_bot_ntba(a10_nob20, obs, n) for n in range(3)])

# "b between 20 and 40" after an a at 5.1
f2040b = MonitorSpec.from_dtma(fixtures.load("f2040b"))
r = time_horizon(f2040b, Observation.of([("a", Fraction(51, 10))]))
print("TOP after", format_rational(r.v_plus.value), "attained" if r.v_plus.attained else "approached")
print("BOT after", format_rational(r.v_minus.value), "attained" if r.v_minus.attained else "approached")

# waiting without events
d = wait_delay(a10_nob20, Observation.of([("a", 3), ("c", 7)], 7))
print("conclusive once more than", d.value, "units pass")

# unbounded recurrence never becomes conclusive
gfa = MonitorSpec.from_dtma(fixtures.load("gfa"))
print(step_horizon(gfa).to_json(), time_horizon(gfa).to_json())
