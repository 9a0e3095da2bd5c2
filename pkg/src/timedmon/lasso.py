"""Ultimately periodic timed words and an exact acceptance check for them.

A lasso is a finite prefix of ``(letter, absolute time)`` events followed by a
loop of ``(letter, delay)`` events repeated forever.  The loop delays must
sum to a positive period, so the word is not Zeno.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, Sequence

import networkx as nx

from .automaton import Automaton, Buchi, Muller, guard_holds
from .zones import as_rational


@dataclass(frozen=True)
class Lasso:
    prefix: tuple  # ((letter, time), ...), absolute non-decreasing times
    loop: tuple  # ((letter, delay), ...), delays from the previous event

    def __post_init__(self):
        prefix = tuple((s, as_rational(t)) for s, t in self.prefix)
        loop = tuple((s, as_rational(d)) for s, d in self.loop)
        object.__setattr__(self, "prefix", prefix)
        object.__setattr__(self, "loop", loop)
        last = 0
        for _, t in prefix:
            if t < last:
                raise ValueError("prefix timestamps must be non-decreasing and non-negative")
            last = t
        if not loop:
            raise ValueError("the loop must contain at least one event")
        if any(d < 0 for _, d in loop):
            raise ValueError("loop delays must be non-negative")
        if self.period <= 0:
            raise ValueError("the loop must take positive time (zero-duration loop)")

    @property
    def period(self):
        return sum((d for _, d in self.loop), 0)

    @property
    def prefix_end(self):
        return self.prefix[-1][1] if self.prefix else 0

    def event(self, k: int) -> tuple:
        """The ``k``-th event (0-based) as ``(letter, absolute time)``."""
        if k < len(self.prefix):
            return self.prefix[k]
        j = k - len(self.prefix)
        rounds, pos = divmod(j, len(self.loop))
        t = self.prefix_end + rounds * self.period + sum((d for _, d in self.loop[: pos + 1]), 0)
        return self.loop[pos][0], t

    def events(self, count: int) -> list:
        return [self.event(k) for k in range(count)]

    def letters(self) -> set:
        return {s for s, _ in self.prefix} | {s for s, _ in self.loop}

    def shifted(self, offset) -> "Lasso":
        """Same word with every timestamp moved by ``offset``."""
        offset = as_rational(offset)
        return Lasso(tuple((s, t + offset) for s, t in self.prefix), self.loop)

    def after(self, word: Sequence, at) -> "Lasso":
        """``word`` followed by this lasso shifted to start at time ``at``."""
        at = as_rational(at)
        word = tuple((s, as_rational(t)) for s, t in word)
        if word and at < word[-1][1]:
            raise ValueError("concatenation time precedes the end of the word")
        # unroll one loop round so the loop delays stay anchored to our own events
        base = self if self.prefix else self.unrolled()
        prefix = word + tuple((s, t + at) for s, t in base.prefix)
        return Lasso(prefix, base.loop)

    def unrolled(self) -> "Lasso":
        return Lasso(tuple(self.events(len(self.prefix) + len(self.loop))), self.loop)

    def __str__(self) -> str:
        pre = "".join(f"({s},{t})" for s, t in self.prefix)
        loop = "".join(f"({s},+{d})" for s, d in self.loop)
        return f"{pre}[{loop}]^w"


def _truncate(v: tuple, caps: Sequence) -> tuple:
    return tuple(min(x, caps[i] + 1) if x > caps[i] else x for i, x in enumerate(v))


def _post(a: Automaton, states: set, letter: str, delay, caps) -> set:
    out = set()
    for q, v in states:
        w = _truncate(tuple(x + delay for x in v), caps)
        for tr in a.by_label.get((q, letter), ()):
            if guard_holds(a.guard_atoms(tr), w):
                resets = set(a.reset_indices(tr))
                nv = tuple(0 if (i + 1) in resets else x for i, x in enumerate(w))
                out.add((tr.target, nv))
    return out


def lasso_graph(a: Automaton, word: Lasso):
    """Run graph on the loop part: nodes ``(loop position, location, clocks)``.

    Returns ``(graph, start_nodes)``; ``start_nodes`` are states reached after
    the prefix (position 0, before the first loop event).
    """
    caps = a.max_constants[1:]
    zero = tuple(0 for _ in a.clocks)
    states = {(q, zero) for q in a.initial}
    last = 0
    for s, t in word.prefix:
        states = _post(a, states, s, t - last, caps)
        last = t
    g = nx.DiGraph()
    starts = {(0, q, v) for q, v in states}
    g.add_nodes_from(starts)
    todo = list(starts)
    n = len(word.loop)
    while todo:
        node = todo.pop()
        j, q, v = node
        letter, delay = word.loop[j]
        for q2, v2 in _post(a, {(q, v)}, letter, delay, caps):
            succ = ((j + 1) % n, q2, v2)
            if succ not in g:
                todo.append(succ)
            g.add_edge(node, succ, location=q2)
    return g, starts


def _reachable(g, starts) -> set:
    seen = set()
    for s in starts:
        if s in seen:
            continue
        seen |= nx.descendants(g, s) | {s}
    return seen


def accepts_lasso(a: Automaton, word: Lasso) -> bool:
    """Exact acceptance of an ultimately periodic word.

    The recurring locations of a run are the targets of the loop edges it
    takes infinitely often; node locations stand in for them here.
    """
    if not word.letters() <= set(a.alphabet):
        raise ValueError("lasso uses letters outside the automaton alphabet")
    g, starts = lasso_graph(a, word)
    live = g.subgraph(_reachable(g, starts))
    acc = a.acceptance
    if isinstance(acc, Buchi):
        for comp in nx.strongly_connected_components(live):
            sub = live.subgraph(comp)
            if sub.number_of_edges() == 0:
                continue
            if any(node[1] in acc.accepting for node in comp):
                return True
        return False
    return any(_has_cycle_exactly(live, f) for f in _muller_candidates(live, acc))


def _muller_candidates(g, acc: Muller) -> Iterator[frozenset]:
    present = frozenset(node[1] for node in g.nodes)
    yield from acc.sets(within=present)


def _has_cycle_exactly(g, fset: frozenset) -> bool:
    sub = g.subgraph([node for node in g.nodes if node[1] in fset])
    for comp in nx.strongly_connected_components(sub):
        part = sub.subgraph(comp)
        if part.number_of_edges() == 0:
            continue
        if {node[1] for node in comp} == fset:
            return True
    return False


def random_lasso(rng, alphabet: Sequence[str], max_prefix: int = 3, max_loop: int = 3,
                 max_gap: int = 4, denominator: int = 4, start=0) -> Lasso:
    """Random lasso with timestamps on a ``1/denominator`` grid."""
    prefix = []
    t = Fraction(start)
    for _ in range(rng.randint(0, max_prefix)):
        t += Fraction(rng.randint(0, max_gap * denominator), denominator)
        prefix.append((rng.choice(alphabet), t))
    loop = []
    for _ in range(rng.randint(1, max_loop)):
        loop.append((rng.choice(alphabet), Fraction(rng.randint(0, max_gap * denominator), denominator)))
    if sum(d for _, d in loop) == 0:
        s, _ = loop[-1]
        loop[-1] = (s, Fraction(rng.randint(1, max_gap * denominator), denominator))
    return Lasso(tuple(prefix), tuple(loop))
