"""Online monitoring and monitorability analysis for timed properties.

Properties are timed automata (Büchi or Muller acceptance) or formulas of a
deterministic fragment of metric interval temporal logic.  All clock
arithmetic is exact over the rationals.
"""

from .automaton import (
    Automaton,
    Buchi,
    Muller,
    Transition,
    buchi_to_muller,
    check_deterministic,
    complement_dtma,
    complete_with_sink,
    tma_to_tba,
)
from .horizons import (
    StepHorizon,
    RefinedVerdict,
    bounded_bot_ntba,
    step_horizon,
    time_horizon,
    wait_delay,
)
from .langstates import (
    build_zone_graph,
    nonempty_states,
    nonempty_states_tba,
    nonempty_states_tma,
    region_nonempty_oracle,
)
from .lasso import Lasso, accepts_lasso
from .mitl import compile_fragment, evaluate, parse_mitl
from .monitor import (
    MonitorSession,
    MonitorSpec,
    Observation,
    TimedWord,
    Verdict,
    concat_at,
    parse_trace,
    reach_set,
    session_step,
    verdict,
)
from .monitorability import pre_star, strong_monitorable, weak_monitorable
from .states import StateSet
from .zones import Federation, Zone

__version__ = "0.1.0"

__all__ = [
    "Automaton",
    "Buchi",
    "Muller",
    "Transition",
    "buchi_to_muller",
    "check_deterministic",
    "complement_dtma",
    "complete_with_sink",
    "tma_to_tba",
    "StepHorizon",
    "RefinedVerdict",
    "bounded_bot_ntba",
    "step_horizon",
    "time_horizon",
    "wait_delay",
    "build_zone_graph",
    "nonempty_states",
    "nonempty_states_tba",
    "nonempty_states_tma",
    "region_nonempty_oracle",
    "MonitorSession",
    "MonitorSpec",
    "Observation",
    "TimedWord",
    "Verdict",
    "concat_at",
    "parse_trace",
    "reach_set",
    "session_step",
    "verdict",
    "Lasso",
    "accepts_lasso",
    "compile_fragment",
    "evaluate",
    "parse_mitl",
    "pre_star",
    "strong_monitorable",
    "weak_monitorable",
    "StateSet",
    "Federation",
    "Zone",
]
