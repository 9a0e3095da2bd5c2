"""Zone graphs and the states with a non-empty accepted language.

``NE(A)`` is computed backwards and exactly: with ``Pre`` the one-step
predecessor (delay, then a transition), ``Reach1(T) = mu X. Pre(T | X)`` and
for Büchi acceptance ``NE = nu Y. Reach1(F & Y)``.  Muller acceptance goes
through the Büchi component of every accepted set and keeps the states of
the copy tier.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, Optional

import networkx as nx

from .automaton import (
    Automaton,
    Buchi,
    InvalidAutomaton,
    Muller,
    Transition,
    component_for_set,
    tba_component_name,
)
from .limits import Limits, current as current_limits
from .states import StateSet
from .zones import Federation, Zone


# ---------------------------------------------------------------------------
# forward zone graph


@dataclass(frozen=True)
class SymbolicState:
    location: str
    zone: Zone


@dataclass
class ZoneGraph:
    nodes: list = field(default_factory=list)
    edges: list = field(default_factory=list)  # (node index, transition, node index)
    initial: list = field(default_factory=list)

    def successors(self, i: int) -> list:
        return [(tr, j) for k, tr, j in self.edges if k == i]


def successor(a: Automaton, zone: Zone, tr: Transition, extrapolate: bool = True) -> Optional[Zone]:
    z = zone.up().constrain_all(a.guard_constraints(tr))
    if z is None:
        return None
    z = z.reset(a.reset_indices(tr))
    if extrapolate:
        z = z.extrapolate(a.max_constants)
    return z


def build_zone_graph(a: Automaton, seeds: Iterable[SymbolicState], limits: Optional[Limits] = None) -> ZoneGraph:
    limits = limits or current_limits()
    graph = ZoneGraph()
    index: dict = {}

    def add(state: SymbolicState) -> int:
        key = (state.location, state.zone)
        if key not in index:
            index[key] = len(graph.nodes)
            graph.nodes.append(state)
            limits.check_zones(len(graph.nodes), "zone graph")
            todo.append(index[key])
        return index[key]

    todo: deque = deque()
    for s in seeds:
        if s.zone is None:
            continue
        graph.initial.append(add(SymbolicState(s.location, s.zone.extrapolate(a.max_constants))))
    while todo:
        i = todo.popleft()
        node = graph.nodes[i]
        for tr in a.outgoing[node.location]:
            z = successor(a, node.zone, tr)
            if z is not None:
                j = add(SymbolicState(tr.target, z))
                graph.edges.append((i, tr, j))
    return graph


# ---------------------------------------------------------------------------
# backward predecessor operators


def transition_pre(a: Automaton, tr: Transition, zone: Zone) -> Optional[Zone]:
    """Valuations at ``tr.source`` that can delay, fire ``tr`` and land in ``zone``."""
    resets = a.reset_indices(tr)
    z: Optional[Zone] = zone
    for x in resets:
        z = z.constrain(x, 0, (0, 1))
        if z is None:
            return None
    z = z.free(resets)
    z = z.constrain_all(a.guard_constraints(tr))
    if z is None:
        return None
    return z.down()


def pre_step(a: Automaton, target: StateSet) -> StateSet:
    """One delay followed by one transition into ``target``."""
    parts: dict = {}
    for loc, fed in target.items():
        for tr in a.incoming.get(loc, ()):
            for z in fed:
                p = transition_pre(a, tr, z)
                if p is not None:
                    parts.setdefault(tr.source, []).append(p)
    return StateSet(a.dim, {q: Federation(a.dim, zs).reduce() for q, zs in parts.items()})


class _Accumulator:
    """Per-location federation that only grows; remembers what was added."""

    def __init__(self, clocks: int, limits: Limits):
        self.clocks = clocks
        self.parts: dict = {}
        self.limits = limits
        self.count = 0

    def add(self, loc: str, zone: Zone) -> bool:
        fed = self.parts.get(loc)
        if fed is None:
            self.parts[loc] = Federation(self.clocks, [zone])
        else:
            if fed.covers_zone(zone):
                return False
            self.parts[loc] = fed.add(zone)
        self.count += 1
        self.limits.check_zones(self.count, "fixpoint")
        return True

    def result(self) -> StateSet:
        return StateSet(self.clocks, {q: f.reduce() for q, f in self.parts.items()})


def backward_closure(a: Automaton, target: StateSet, include_target: bool,
                     limits: Optional[Limits] = None) -> StateSet:
    """States reaching ``target`` by delays and transitions.

    With ``include_target`` the empty path counts (delays only, so the
    down-closure of the target is included); otherwise at least one
    transition is required.
    """
    limits = limits or current_limits()
    acc = _Accumulator(a.dim, limits)
    work: deque = deque()
    if include_target:
        for loc, z in target.pairs():
            d = z.down()
            if acc.add(loc, d):
                work.append((loc, d))
    seeds = list(target.pairs())
    for loc, z in seeds:
        for tr in a.incoming.get(loc, ()):
            p = transition_pre(a, tr, z)
            if p is not None and acc.add(tr.source, p):
                work.append((tr.source, p))
    while work:
        loc, z = work.popleft()
        for tr in a.incoming.get(loc, ()):
            p = transition_pre(a, tr, z)
            if p is not None and acc.add(tr.source, p):
                work.append((tr.source, p))
    return acc.result()


def _buchi_nonempty(a: Automaton, accepting: frozenset, limits: Limits) -> StateSet:
    if not accepting:
        return StateSet.empty(a.dim)
    y = StateSet.universal(a.dim, [q for q in a.locations if q in accepting])
    while True:
        reach = backward_closure(a, y, include_target=False, limits=limits)
        y_next = StateSet(a.dim, {q: reach[q] for q in accepting if reach[q]})
        if y_next.includes(y):
            return reach
        y = y_next


def nonempty_states_tba(a: Automaton, limits: Optional[Limits] = None) -> StateSet:
    if not isinstance(a.acceptance, Buchi):
        raise InvalidAutomaton("nonempty_states_tba needs Büchi acceptance")
    return _buchi_nonempty(a, a.acceptance.accepting, limits or current_limits())


def _strongly_connected_within(a: Automaton, fset: frozenset) -> bool:
    g = nx.DiGraph()
    g.add_nodes_from(fset)
    for tr in a.transitions:
        if tr.source in fset and tr.target in fset and a.guard_zone(tr) is not None:
            g.add_edge(tr.source, tr.target)
    if g.number_of_edges() == 0:
        return False
    return nx.is_strongly_connected(g)


def muller_candidate_sets(a: Automaton) -> list:
    """Accepted sets that could be exactly the recurring locations of a run."""
    acc = a.acceptance
    assert isinstance(acc, Muller)
    g = nx.DiGraph()
    g.add_nodes_from(a.locations)
    for tr in a.transitions:
        if a.guard_zone(tr) is not None:
            g.add_edge(tr.source, tr.target)
    out = []
    for comp in nx.strongly_connected_components(g):
        sub = g.subgraph(comp)
        if sub.number_of_edges() == 0:
            continue
        for fset in acc.sets(within=comp):
            if _strongly_connected_within(a, fset):
                out.append(fset)
    return out


def nonempty_states_tma(a: Automaton, limits: Optional[Limits] = None) -> StateSet:
    if not isinstance(a.acceptance, Muller):
        raise InvalidAutomaton("nonempty_states_tma needs Muller acceptance")
    limits = limits or current_limits()
    result = StateSet.empty(a.dim)
    order = {q: i for i, q in enumerate(a.locations)}
    for idx, fset in enumerate(muller_candidate_sets(a)):
        locations, initial, transitions, accepting = component_for_set(a, fset, idx, order)
        comp = Automaton(locations, initial, a.alphabet, a.clocks, transitions, Buchi(frozenset(accepting)))
        ne = _buchi_nonempty(comp, comp.acceptance.accepting, limits)
        tier0 = {q: ne[tba_component_name(q, idx, 0)] for q in a.locations}
        result = result.union(StateSet(a.dim, {q: f for q, f in tier0.items() if f}))
    return result


def nonempty_states(a: Automaton, limits: Optional[Limits] = None) -> StateSet:
    if isinstance(a.acceptance, Buchi):
        return nonempty_states_tba(a, limits)
    return nonempty_states_tma(a, limits)


def empty_states(a: Automaton, ne: Optional[StateSet] = None) -> StateSet:
    ne = nonempty_states(a) if ne is None else ne
    return ne.complement(a.locations)


def region_nonempty_oracle(a: Automaton) -> StateSet:
    from .regions import RegionGraph

    return RegionGraph(a).nonempty_states()
