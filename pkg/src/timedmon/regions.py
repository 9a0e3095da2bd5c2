"""Classical region graph, used as an independent check of the zone algorithms.

A region is keyed by the integer part of every clock (``None`` once the clock
exceeds its maximal constant), the clocks with zero fractional part, and the
ordered groups of clocks with equal positive fractional part.  Every
computation works on representative valuations of regions, never on zones.
"""

from __future__ import annotations

import itertools
import math
from collections import deque
from fractions import Fraction
from typing import Iterable, Optional, Sequence

import networkx as nx

from .automaton import Automaton, Buchi, guard_holds
from .limits import Limits, ResourceLimitExceeded, current as current_limits
from .states import StateSet
from .zones import Federation, Zone, le, lt

MAX_REGION_NODES = 200_000


def _ordered_partitions(items: tuple):
    """Every way to split ``items`` into a sequence of non-empty groups."""
    if not items:
        yield ()
        return
    first, rest = items[0], items[1:]
    for part in _ordered_partitions(rest):
        # put ``first`` into an existing group or into a new group at any slot
        for i in range(len(part)):
            yield part[:i] + (tuple(sorted(part[i] + (first,))),) + part[i + 1:]
        for i in range(len(part) + 1):
            yield part[:i] + ((first,),) + part[i:]


class RegionGraph:
    def __init__(self, a: Automaton, limits: Optional[Limits] = None):
        self.a = a
        self.n = len(a.clocks)
        self.caps = tuple(a.max_constants[1:])
        self.limits = limits or current_limits()
        self.keys = self._all_keys()
        if len(self.keys) * len(a.locations) > MAX_REGION_NODES:
            raise ResourceLimitExceeded("region graph too large for the oracle")
        self.graph = self._build()

    # regions ------------------------------------------------------------------

    def _all_keys(self) -> list:
        keys = []
        choices = [list(range(c + 1)) + [None] for c in self.caps]
        for ints in itertools.product(*choices):
            bounded = tuple(i for i in range(self.n) if ints[i] is not None)
            at_cap = {i for i in bounded if ints[i] == self.caps[i]}
            for r in range(len(bounded) + 1):
                for zero in itertools.combinations(bounded, r):
                    # a clock at its maximal constant with a fractional part is already above it
                    if not at_cap <= set(zero):
                        continue
                    rest = tuple(i for i in bounded if i not in zero)
                    for groups in _ordered_partitions(rest):
                        keys.append((tuple(ints), tuple(zero), groups))
        return keys

    def key(self, valuation: Sequence) -> tuple:
        ints = []
        fracs = {}
        for i, v in enumerate(valuation):
            v = Fraction(v)
            if v > self.caps[i]:
                ints.append(None)
            else:
                k = math.floor(v)
                ints.append(k)
                fracs[i] = v - k
        zero = tuple(sorted(i for i, f in fracs.items() if f == 0))
        positive = sorted({f for f in fracs.values() if f != 0})
        groups = tuple(tuple(sorted(i for i, f in fracs.items() if f == p)) for p in positive)
        return (tuple(ints), zero, groups)

    def representative(self, key: tuple) -> tuple:
        ints, zero, groups = key
        denom = len(groups) + 1
        v = []
        for i in range(self.n):
            if ints[i] is None:
                v.append(Fraction(self.caps[i] + 1))
                continue
            rank = 0
            for g, members in enumerate(groups):
                if i in members:
                    rank = g + 1
            v.append(Fraction(ints[i]) + Fraction(rank, denom))
        return tuple(v)

    def zone(self, key: tuple) -> Zone:
        ints, zero, groups = key
        cons = []
        rank = {}
        for g, members in enumerate(groups):
            for i in members:
                rank[i] = g + 1
        for i in zero:
            rank[i] = 0
        for i in range(self.n):
            x = i + 1
            if ints[i] is None:
                cons.append((0, x, lt(-self.caps[i])))
            elif rank[i] == 0:
                cons += [(x, 0, le(ints[i])), (0, x, le(-ints[i]))]
            else:
                cons += [(x, 0, lt(ints[i] + 1)), (0, x, lt(-ints[i]))]
        for i, j in itertools.permutations(rank, 2):
            d = ints[i] - ints[j]
            if rank[i] == rank[j]:
                cons.append((i + 1, j + 1, le(d)))
            elif rank[i] < rank[j]:
                cons.append((i + 1, j + 1, lt(d)))
        z = Zone.from_constraints(self.n, cons)
        assert z is not None
        return z

    def delay_successors(self, v: tuple) -> list:
        """Regions met while letting time pass from ``v``, in order, including its own."""
        cuts = set()
        for i, x in enumerate(v):
            if x > self.caps[i]:
                continue
            for k in range(math.floor(x), self.caps[i] + 1):
                d = k - x
                if d > 0:
                    cuts.add(d)
        cuts = sorted(cuts)
        samples = [Fraction(0)]
        prev = Fraction(0)
        for d in cuts:
            samples.append((prev + d) / 2)
            samples.append(d)
            prev = d
        samples.append(prev + 1)
        out = []
        for d in samples:
            k = self.key(tuple(x + d for x in v))
            if not out or out[-1] != k:
                out.append(k)
        return out

    def _build(self) -> nx.DiGraph:
        a = self.a
        g = nx.DiGraph()
        self.delays = {}
        for key in self.keys:
            self.delays[key] = self.delay_successors(self.representative(key))
        for q in a.locations:
            for key in self.keys:
                node = (q, key)
                g.add_node(node)
                for k2 in self.delays[key]:
                    w = self.representative(k2)
                    for tr in a.outgoing[q]:
                        if guard_holds(a.guard_atoms(tr), w):
                            resets = set(a.reset_indices(tr))
                            u = tuple(0 if (i + 1) in resets else x for i, x in enumerate(w))
                            g.add_edge(node, (tr.target, self.key(u)))
        return g

    # analyses -------------------------------------------------------------

    def node_of(self, location: str, valuation: Sequence) -> tuple:
        return (location, self.key(valuation))

    def nonempty_nodes(self, acceptance=None) -> set:
        acc = self.a.acceptance if acceptance is None else acceptance
        g = self.graph
        good: set = set()
        if isinstance(acc, Buchi):
            for comp in nx.strongly_connected_components(g):
                sub = g.subgraph(comp)
                if sub.number_of_edges() and any(node[0] in acc.accepting for node in comp):
                    good |= comp
        else:
            for fset in acc.sets():
                sub = g.subgraph([node for node in g.nodes if node[0] in fset])
                for comp in nx.strongly_connected_components(sub):
                    part = sub.subgraph(comp)
                    if part.number_of_edges() and {node[0] for node in comp} == fset:
                        good |= comp
        return self.backward(good)

    def backward(self, targets: Iterable) -> set:
        seen = set(targets)
        todo = deque(seen)
        g = self.graph
        while todo:
            node = todo.popleft()
            for p in g.predecessors(node):
                if p not in seen:
                    seen.add(p)
                    todo.append(p)
        return seen

    def all_nodes(self) -> set:
        return set(self.graph.nodes)

    def pre_star_nodes(self, targets: Iterable) -> set:
        """Nodes from which some steps followed by a delay reach ``targets``."""
        targets = set(targets)
        delayed_into = set()
        for q, key in self.graph.nodes:
            if any((q, k2) in targets for k2 in self.delays[key]):
                delayed_into.add((q, key))
        return self.backward(delayed_into)

    def step_distance(self, start: tuple, targets: Iterable) -> Optional[int]:
        """Fewest transitions from ``start`` to a target node, or None."""
        targets = set(targets)
        if start in targets:
            return 0
        dist = {start: 0}
        todo = deque([start])
        while todo:
            node = todo.popleft()
            for s in self.graph.successors(node):
                if s not in dist:
                    dist[s] = dist[node] + 1
                    if s in targets:
                        return dist[s]
                    todo.append(s)
        return None

    def to_state_set(self, nodes: Iterable) -> StateSet:
        parts: dict = {}
        for q, key in nodes:
            parts.setdefault(q, []).append(self.zone(key))
        return StateSet(self.n, {q: Federation(self.n, zs) for q, zs in parts.items()})

    def nonempty_states(self) -> StateSet:
        return self.to_state_set(self.nonempty_nodes())
