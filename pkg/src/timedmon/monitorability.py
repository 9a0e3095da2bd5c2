"""Backward reachability and weak/strong monitorability of deterministic specs."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Union

from .automaton import Automaton, NotDeterministic, check_deterministic
from .langstates import backward_closure, pre_step
from .limits import Limits
from .monitor import MonitorSpec, Observation, run_concrete
from .states import StateSet

UNDECIDABLE_NONDETERMINISTIC = (
    "monitorability is undecidable for properties given by nondeterministic timed "
    "Büchi automata; supply a deterministic (DTMA) specification"
)
OPEN_FOR_PAIRS = (
    "monitorability for a property given together with a separate complement automaton "
    "is an open problem and not supported; supply one deterministic automaton instead"
)


@dataclass(frozen=True)
class PreStarResult:
    states: StateSet
    iterations: int


def pre_star(a: Automaton, target: StateSet, limits: Optional[Limits] = None) -> PreStarResult:
    """States from which some finite word followed by a delay enters ``target``."""
    states = backward_closure(a, target, include_target=True, limits=limits)
    return PreStarResult(states, states.zone_count())


def is_pre_fixpoint(a: Automaton, states: StateSet) -> bool:
    return states.includes(pre_step(a, states)) and states.includes(states.down())


def as_deterministic_spec(spec: Union[Automaton, MonitorSpec]) -> MonitorSpec:
    if isinstance(spec, MonitorSpec):
        if not spec.deterministic:
            ok, _ = check_deterministic(spec.positive)
            if not ok:
                raise NotDeterministic(UNDECIDABLE_NONDETERMINISTIC)
            raise NotDeterministic(OPEN_FOR_PAIRS)
        return spec
    ok, _ = check_deterministic(spec)
    if not ok:
        raise NotDeterministic(UNDECIDABLE_NONDETERMINISTIC)
    return MonitorSpec.from_dtma(spec)


class _Analysis:
    """Pre* sets shared by all queries on one spec."""

    def __init__(self, spec: MonitorSpec):
        self.spec = spec
        a = spec.positive
        self.conclusive = spec.e_positive.union(spec.e_negative)
        self.weak = pre_star(a, self.conclusive).states
        self.hopeless = self.weak.complement(a.locations)
        self.not_strong = pre_star(a, self.hopeless).states


def _analysis(spec: MonitorSpec) -> _Analysis:
    cached = spec.__dict__.get("_monitorability")
    if cached is None:
        cached = _Analysis(spec)
        spec.__dict__["_monitorability"] = cached
    return cached


def reach_state(spec: MonitorSpec, obs: Observation) -> Optional[tuple]:
    states = run_concrete(spec.positive, obs.word, obs.now)
    if len(states) != 1:
        # a complete deterministic automaton always has exactly one run
        raise NotDeterministic("expected exactly one reach state")
    return next(iter(states))


def weak_monitorable(spec: Union[Automaton, MonitorSpec], obs: Observation = Observation()) -> bool:
    spec = as_deterministic_spec(spec)
    q, v = reach_state(spec, obs)
    return _analysis(spec).weak.contains(q, v)


def strong_monitorable(spec: Union[Automaton, MonitorSpec], obs: Observation = Observation()) -> bool:
    spec = as_deterministic_spec(spec)
    q, v = reach_state(spec, obs)
    return not _analysis(spec).not_strong.contains(q, v)


def explain(spec: Union[Automaton, MonitorSpec], obs: Observation, mode: str) -> dict:
    """The membership facts behind a weak or strong answer, as plain data."""
    from .monitor import format_rational

    spec = as_deterministic_spec(spec)
    info = _analysis(spec)
    a = spec.positive
    q, v = reach_state(spec, obs)
    data = {
        "reach_state": {"location": q, "valuation": {x: str(val) for x, val in zip(a.clocks, v)}},
        "in_conclusive_states": info.conclusive.contains(q, v),
        "in_pre_star_conclusive": info.weak.contains(q, v),
        "pre_star_conclusive": info.weak.to_json(a.clocks, a.locations),
    }
    if mode == "strong":
        data["in_pre_star_hopeless"] = info.not_strong.contains(q, v)
        data["hopeless_states"] = info.hopeless.to_json(a.clocks, a.locations)
        data["pre_star_hopeless"] = info.not_strong.to_json(a.clocks, a.locations)
        data["strong"] = not data["in_pre_star_hopeless"]
    else:
        data["weak"] = data["in_pre_star_conclusive"]
    data["observation"] = {
        "events": [[s, format_rational(t)] for s, t in obs.word],
        "now": format_rational(obs.now),
    }
    return data
