"""Brute-force references built on the region graph and on grid enumeration."""

from __future__ import annotations

import math
from fractions import Fraction

from generators import satisfies
from timedmon.monitor import run_concrete
from timedmon.regions import RegionGraph


class RegionOracle:
    """Region-graph answers for a deterministic spec pair sharing one structure."""

    def __init__(self, spec):
        self.spec = spec
        self.graph = RegionGraph(spec.positive)
        self.ne_pos = self.graph.nonempty_nodes(spec.positive.acceptance)
        self.ne_neg = self.graph.nonempty_nodes(spec.negative.acceptance)
        nodes = self.graph.all_nodes()
        self.e_pos = nodes - self.ne_pos
        self.e_neg = nodes - self.ne_neg
        self.weak_nodes = self.graph.pre_star_nodes(self.e_pos | self.e_neg)

    def reach_node(self, obs):
        (q, v), = run_concrete(self.spec.positive, obs.word, obs.now)
        return self.graph.node_of(q, v)

    def weak(self, obs) -> bool:
        return self.reach_node(obs) in self.weak_nodes

    def steps(self, obs) -> tuple:
        start = self.reach_node(obs)
        top = self.graph.step_distance(start, self.e_neg)
        bot = self.graph.step_distance(start, self.e_pos)
        return (math.inf if top is None else top, math.inf if bot is None else bot)


def grid(high, denominator) -> list:
    return [Fraction(k, denominator) for k in range(int(high * denominator) + 1)]


def in_up(cons, p, denominator=8) -> bool:
    """Some delay ``d`` with ``p - d`` satisfying ``cons``."""
    return any(satisfies(cons, tuple(x - d for x in p)) for d in grid(min(p, default=0), denominator))


def in_down(cons, p, horizon=24, denominator=8) -> bool:
    """Some delay ``d`` with ``p + d`` satisfying ``cons``."""
    return any(satisfies(cons, tuple(x + d for x in p)) for d in grid(horizon, denominator))


def in_free(cons, p, clock, high=24, denominator=8) -> bool:
    """Some value of ``clock`` (0-based) making ``p`` satisfy ``cons``."""
    for w in grid(high, denominator):
        q = list(p)
        q[clock] = w
        if satisfies(cons, q):
            return True
    return False


def in_reset(cons, p, clock, **kw) -> bool:
    return p[clock] == 0 and in_free(cons, p, clock, **kw)
