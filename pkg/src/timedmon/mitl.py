"""Metric interval temporal logic over single-letter positions.

Surface syntax (loosest to tightest binding)::

    f -> g            right associative
    f | g
    f & g
    f U[a,b] g        right associative
    !f  F[a,b] f  G[a,b] f  X[a,b] f  (f)  true  false  letter

Intervals are ``[a,b]``, ``(a,b)``, mixed brackets, ``b`` may be ``inf``;
``>=n``, ``>n``, ``<=n`` and ``<n`` are shorthands.  An operator without an
interval ranges over ``[0,inf)``.
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

from .automaton import Automaton, Muller, Transition
from .lasso import Lasso


class MitlSyntaxError(ValueError):
    def __init__(self, message: str, position: int):
        super().__init__(f"{message} at position {position}")
        self.position = position


class UnknownAtom(ValueError):
    pass


class FragmentUnsupported(ValueError):
    """Formula lies outside the compilable fragment."""

    def __init__(self, subformula, reason: str = ""):
        text = to_text(subformula) if isinstance(subformula, Formula) else str(subformula)
        super().__init__(f"unsupported subformula {text}" + (f": {reason}" if reason else ""))
        self.subformula = subformula


# ---------------------------------------------------------------------------
# syntax tree


@dataclass(frozen=True)
class Interval:
    lo: int = 0
    hi: Optional[int] = None  # None means unbounded
    lo_strict: bool = False
    hi_strict: bool = True

    def __post_init__(self):
        if self.lo < 0:
            raise ValueError("interval endpoints must be non-negative")
        if self.hi is None:
            object.__setattr__(self, "hi_strict", True)
        elif self.hi < self.lo:
            raise ValueError(f"empty interval {self}")
        elif self.hi == self.lo:
            raise ValueError(f"singular interval {self}")

    def contains(self, d) -> bool:
        if d < self.lo or (self.lo_strict and d == self.lo):
            return False
        if self.hi is None:
            return True
        return d < self.hi or (not self.hi_strict and d == self.hi)

    def below(self, d) -> bool:
        return d < self.lo or (self.lo_strict and d == self.lo)

    def above(self, d) -> bool:
        return self.hi is not None and (d > self.hi or (self.hi_strict and d == self.hi))

    @property
    def unbounded(self) -> bool:
        return self.hi is None

    def __str__(self) -> str:
        left = "(" if self.lo_strict else "["
        if self.hi is None:
            return f"{left}{self.lo},inf)"
        right = ")" if self.hi_strict else "]"
        return f"{left}{self.lo},{self.hi}{right}"


ALWAYS = Interval()


class Formula:
    """Base class of syntax-tree nodes."""


@dataclass(frozen=True)
class Atom(Formula):
    name: str


@dataclass(frozen=True)
class TrueF(Formula):
    pass


@dataclass(frozen=True)
class FalseF(Formula):
    pass


@dataclass(frozen=True)
class Not(Formula):
    arg: Formula


@dataclass(frozen=True)
class Or(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class And(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Implies(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Next(Formula):
    interval: Interval
    arg: Formula


@dataclass(frozen=True)
class Until(Formula):
    interval: Interval
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Finally(Formula):
    interval: Interval
    arg: Formula


@dataclass(frozen=True)
class Globally(Formula):
    interval: Interval
    arg: Formula


def atoms(f: Formula) -> set:
    if isinstance(f, Atom):
        return {f.name}
    out: set = set()
    for child in children(f):
        out |= atoms(child)
    return out


def children(f: Formula) -> tuple:
    if isinstance(f, (Not, Next, Finally, Globally)):
        return (f.arg,)
    if isinstance(f, (Or, And, Implies, Until)):
        return (f.left, f.right)
    return ()


def is_temporal(f: Formula) -> bool:
    return isinstance(f, (Next, Until, Finally, Globally))


def has_temporal(f: Formula) -> bool:
    return is_temporal(f) or any(has_temporal(c) for c in children(f))


# ---------------------------------------------------------------------------
# printing


def to_text(f: Formula) -> str:
    """Fully parenthesised text that parses back to the same tree."""
    if isinstance(f, Atom):
        return f.name
    if isinstance(f, TrueF):
        return "true"
    if isinstance(f, FalseF):
        return "false"
    if isinstance(f, Not):
        return f"!{_wrap(f.arg)}"
    if isinstance(f, Or):
        return f"({to_text(f.left)} | {to_text(f.right)})"
    if isinstance(f, And):
        return f"({to_text(f.left)} & {to_text(f.right)})"
    if isinstance(f, Implies):
        return f"({to_text(f.left)} -> {to_text(f.right)})"
    if isinstance(f, Until):
        return f"({to_text(f.left)} U{f.interval} {to_text(f.right)})"
    op = {Next: "X", Finally: "F", Globally: "G"}[type(f)]
    return f"{op}{f.interval} {_wrap(f.arg)}"


def _wrap(f: Formula) -> str:
    text = to_text(f)
    if isinstance(f, (Atom, TrueF, FalseF)) or text.startswith("("):
        return text
    return f"({text})"


# ---------------------------------------------------------------------------
# parsing

_TOKEN = re.compile(
    r"\s*(?:(?P<num>\d+)|(?P<ident>[A-Za-z_][A-Za-z0-9_]*)|(?P<op>->|→|&&|\|\||<=|>=|[!¬~&∧|∨()\[\],<>]))"
)


def _tokenize(text: str) -> list:
    tokens = []
    pos = 0
    while pos < len(text):
        if text[pos:].strip() == "":
            break
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            start = pos + (len(text[pos:]) - len(text[pos:].lstrip()))
            raise MitlSyntaxError(f"unexpected character {text[start]!r}", start)
        kind = m.lastgroup
        value = m.group(kind)
        start = m.start(kind)
        value = {"→": "->", "&&": "&", "∧": "&", "||": "|", "∨": "|", "¬": "!", "~": "!"}.get(value, value)
        tokens.append((kind, value, start))
        pos = m.end()
    tokens.append(("end", "", len(text)))
    return tokens


_TEMPORAL = {"F", "G", "X"}


class _Parser:
    def __init__(self, text: str, alphabet: Optional[Iterable[str]]):
        self.text = text
        self.tokens = _tokenize(text)
        self.i = 0
        self.alphabet = None if alphabet is None else set(alphabet)

    def peek(self, k: int = 0):
        return self.tokens[min(self.i + k, len(self.tokens) - 1)]

    def take(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect(self, value: str):
        tok = self.take()
        if tok[1] != value:
            found = "end of input" if tok[0] == "end" else repr(tok[1])
            raise MitlSyntaxError(f"expected {value!r}, found {found}", tok[2])
        return tok

    def parse(self) -> Formula:
        f = self.implies()
        tok = self.peek()
        if tok[0] != "end":
            raise MitlSyntaxError(f"unexpected {tok[1]!r}", tok[2])
        return f

    def implies(self) -> Formula:
        left = self.disj()
        if self.peek()[1] == "->":
            self.take()
            return Implies(left, self.implies())
        return left

    def disj(self) -> Formula:
        f = self.conj()
        while self.peek()[1] == "|":
            self.take()
            f = Or(f, self.conj())
        return f

    def conj(self) -> Formula:
        f = self.until()
        while self.peek()[1] == "&":
            self.take()
            f = And(f, self.until())
        return f

    def until(self) -> Formula:
        left = self.unary()
        tok = self.peek()
        if tok[0] == "ident" and tok[1] == "U":
            self.take()
            interval = self.interval()
            return Until(interval, left, self.until())
        return left

    def unary(self) -> Formula:
        kind, value, pos = self.peek()
        if value == "!":
            self.take()
            return Not(self.unary())
        if value == "(":
            self.take()
            f = self.implies()
            self.expect(")")
            return f
        if kind == "ident":
            self.take()
            if value in _TEMPORAL:
                interval = self.interval()
                arg = self.unary()
                return {"F": Finally, "G": Globally, "X": Next}[value](interval, arg)
            if value == "true":
                return TrueF()
            if value == "false":
                return FalseF()
            if value == "U":
                raise MitlSyntaxError("'U' needs a left operand", pos)
            if self.alphabet is not None and value not in self.alphabet:
                raise UnknownAtom(f"unknown atom {value!r} at position {pos}")
            return Atom(value)
        found = "end of input" if kind == "end" else repr(value)
        raise MitlSyntaxError(f"expected a formula, found {found}", pos)

    def interval(self) -> Interval:
        kind, value, pos = self.peek()
        if value in (">=", ">", "<=", "<"):
            self.take()
            n = self.number()
            try:
                if value == ">=":
                    return Interval(n, None, False)
                if value == ">":
                    return Interval(n, None, True)
                if value == "<=":
                    return Interval(0, n, False, False)
                return Interval(0, n, False, True)
            except ValueError as exc:
                raise MitlSyntaxError(str(exc), pos) from None
        if value == "[" or (value == "(" and self.peek(1)[0] == "num" and self.peek(2)[1] == ","):
            self.take()
            lo_strict = value == "("
            lo = self.number()
            self.expect(",")
            hi_tok = self.peek()
            if hi_tok[0] == "ident" and hi_tok[1] == "inf":
                self.take()
                hi = None
            else:
                hi = self.number()
            close = self.take()
            if close[1] not in ("]", ")"):
                raise MitlSyntaxError("expected ']' or ')'", close[2])
            try:
                return Interval(lo, hi, lo_strict, close[1] == ")")
            except ValueError as exc:
                raise MitlSyntaxError(str(exc), pos) from None
        return ALWAYS

    def number(self) -> int:
        kind, value, pos = self.take()
        if kind != "num":
            raise MitlSyntaxError("expected a non-negative integer", pos)
        return int(value)


def parse_mitl(text: str, alphabet: Optional[Iterable[str]] = None) -> Formula:
    return _Parser(text, alphabet).parse()


# ---------------------------------------------------------------------------
# evaluation on lasso words


def max_constant(f: Formula) -> int:
    here = 0
    if isinstance(f, (Next, Until, Finally, Globally)):
        here = max(f.interval.lo, f.interval.hi or 0)
    return max([here] + [max_constant(c) for c in children(f)])


class _Evaluator:
    def __init__(self, word: Lasso):
        self.word = word
        self.p = len(word.prefix)
        self.n = len(word.loop)
        self.memo: dict = {}

    def canon(self, i: int) -> int:
        # positions are 0-based here; the suffix from i and from i + n is the
        # same word shifted in time once i is inside the loop
        if i < self.p:
            return i
        return self.p + (i - self.p) % self.n

    def time(self, i: int):
        return self.word.event(i)[1]

    def letter(self, i: int) -> str:
        return self.word.event(i)[0]

    def holds(self, f: Formula, i: int, anchor=None) -> bool:
        if anchor is None:
            key = (f, self.canon(i))
            cached = self.memo.get(key)
            if cached is not None:
                return cached
            value = self._holds(f, self.canon(i), None)
            self.memo[key] = value
            return value
        return self._holds(f, i, anchor)

    def _holds(self, f: Formula, i: int, anchor) -> bool:
        if isinstance(f, Atom):
            return self.letter(i) == f.name
        if isinstance(f, TrueF):
            return True
        if isinstance(f, FalseF):
            return False
        if isinstance(f, Not):
            return not self.holds(f.arg, i, anchor)
        if isinstance(f, Or):
            return self.holds(f.left, i, anchor) or self.holds(f.right, i, anchor)
        if isinstance(f, And):
            return self.holds(f.left, i, anchor) and self.holds(f.right, i, anchor)
        if isinstance(f, Implies):
            return (not self.holds(f.left, i, anchor)) or self.holds(f.right, i, anchor)
        base = self.time(i) if anchor is None else anchor
        if isinstance(f, Next):
            return f.interval.contains(self.time(i + 1) - base) and self.holds(f.arg, i + 1)
        if isinstance(f, Finally):
            return self._until(f.interval, TrueF(), f.arg, i, base)
        if isinstance(f, Globally):
            return not self._until(f.interval, TrueF(), Not(f.arg), i, base)
        if isinstance(f, Until):
            return self._until(f.interval, f.left, f.right, i, base)
        raise TypeError(f"unknown formula node {f!r}")

    def _until(self, interval: Interval, left: Formula, right: Formula, i: int, base) -> bool:
        k = i
        settled = None  # first loop position where every later time is past the lower endpoint
        while True:
            d = self.time(k) - base
            if interval.above(d):
                return False
            if interval.contains(d) and self.holds(right, k):
                return True
            if not self.holds(left, k):
                return False
            if interval.unbounded and settled is None and k >= self.p and not interval.below(d):
                settled = k
            if settled is not None and k >= settled + self.n:
                return False
            k += 1


def evaluate(f: Formula, word: Lasso, position: int = 1, origin=None) -> bool:
    """Truth of ``f`` at a 1-based ``position`` of a lasso word.

    With ``origin`` given, the outermost temporal operators measure time from
    ``origin`` instead of from the timestamp at ``position``; ``origin=0``
    gives the absolute-time reading used by the compiled automata.
    """
    if not isinstance(word, Lasso):
        raise TypeError("evaluate needs a Lasso word")
    if position < 1:
        raise ValueError("positions start at 1")
    ev = _Evaluator(word)
    return ev.holds(f, position - 1, origin)


# ---------------------------------------------------------------------------
# compiling the deterministic fragment


@dataclass(frozen=True)
class _FirstLetter:
    letters: frozenset


@dataclass(frozen=True)
class _UntilPattern:
    interval: Interval
    hold: frozenset
    goal: frozenset


@dataclass(frozen=True)
class _NextPattern:
    interval: Interval
    goal: frozenset


def _letters_of(f: Formula, alphabet: Sequence[str]):
    """Letters satisfying a formula without temporal operators, else None."""
    if has_temporal(f):
        return None
    return frozenset(s for s in alphabet if _state_holds(f, s))


def _state_holds(f: Formula, letter: str) -> bool:
    if isinstance(f, Atom):
        return f.name == letter
    if isinstance(f, TrueF):
        return True
    if isinstance(f, FalseF):
        return False
    if isinstance(f, Not):
        return not _state_holds(f.arg, letter)
    if isinstance(f, Or):
        return _state_holds(f.left, letter) or _state_holds(f.right, letter)
    if isinstance(f, And):
        return _state_holds(f.left, letter) and _state_holds(f.right, letter)
    if isinstance(f, Implies):
        return (not _state_holds(f.left, letter)) or _state_holds(f.right, letter)
    raise TypeError(f"not a state formula: {f!r}")


def _split(f: Formula, alphabet: Sequence[str], patterns: list):
    """Boolean skeleton over pattern indices; patterns are appended in order."""
    letters = _letters_of(f, alphabet)
    if letters is not None:
        patterns.append(_FirstLetter(letters))
        return ("leaf", len(patterns) - 1)
    if isinstance(f, Not):
        return ("not", _split(f.arg, alphabet, patterns))
    if isinstance(f, (And, Or, Implies)):
        kind = {And: "and", Or: "or", Implies: "implies"}[type(f)]
        return (kind, _split(f.left, alphabet, patterns), _split(f.right, alphabet, patterns))
    every = frozenset(alphabet)

    def state(g: Formula) -> frozenset:
        s = _letters_of(g, alphabet)
        if s is None:
            raise FragmentUnsupported(f, "nested temporal operators")
        return s

    if isinstance(f, Finally):
        patterns.append(_UntilPattern(f.interval, every, state(f.arg)))
        return ("leaf", len(patterns) - 1)
    if isinstance(f, Globally):
        patterns.append(_UntilPattern(f.interval, every, every - state(f.arg)))
        return ("not", ("leaf", len(patterns) - 1))
    if isinstance(f, Until):
        patterns.append(_UntilPattern(f.interval, state(f.left), state(f.right)))
        return ("leaf", len(patterns) - 1)
    if isinstance(f, Next):
        patterns.append(_NextPattern(f.interval, state(f.arg)))
        return ("leaf", len(patterns) - 1)
    raise FragmentUnsupported(f)


def _skeleton_value(node, verdicts: Sequence[bool]) -> bool:
    kind = node[0]
    if kind == "leaf":
        return verdicts[node[1]]
    if kind == "not":
        return not _skeleton_value(node[1], verdicts)
    a = _skeleton_value(node[1], verdicts)
    b = _skeleton_value(node[2], verdicts)
    if kind == "and":
        return a and b
    if kind == "or":
        return a or b
    return (not a) or b


# Each component is (initial, {location: accepting?}, {(location, letter): [(pieces, target)]})
# where ``pieces`` is a guard on the component's own clock as a list of atoms.


def _interval_pieces(interval: Interval, outcome) -> list:
    """Partition [0, inf) into below / inside / above the interval.

    ``outcome(region)`` names the target for ``region`` in
    ``("below", "in", "above")``; adjacent pieces with equal targets merge.
    """
    pieces = []
    # bounds are (value, closed) on the left and right
    if interval.lo > 0 or interval.lo_strict:
        pieces.append(("below", (0, True), (interval.lo, interval.lo_strict)))
    lo_closed = not interval.lo_strict
    if interval.hi is None:
        pieces.append(("in", (interval.lo, lo_closed), None))
    else:
        pieces.append(("in", (interval.lo, lo_closed), (interval.hi, not interval.hi_strict)))
        pieces.append(("above", (interval.hi, interval.hi_strict), None))
    merged: list = []
    for region, left, right in pieces:
        target = outcome(region)
        if merged and merged[-1][0] == target:
            merged[-1] = (target, merged[-1][1], right)
        else:
            merged.append((target, left, right))
    out = []
    for target, left, right in merged:
        atoms = []
        if left != (0, True):
            atoms.append((">=" if left[1] else ">", left[0]))
        if right is not None:
            atoms.append(("<=" if right[1] else "<", right[0]))
        out.append((atoms, target))
    return out


def _component(pattern, alphabet: Sequence[str]):
    if isinstance(pattern, _FirstLetter):
        delta = {}
        for s in alphabet:
            delta[("start", s)] = [([], "sat" if s in pattern.letters else "fail")]
            for q in ("sat", "fail"):
                delta[(q, s)] = [([], q)]
        return "start", {"start": False, "sat": True, "fail": False}, delta, False
    if isinstance(pattern, _UntilPattern):
        delta = {}
        for s in alphabet:
            in_goal = s in pattern.goal
            in_hold = s in pattern.hold

            def outcome(region, in_goal=in_goal, in_hold=in_hold):
                if region == "above":
                    return "fail"
                if region == "in" and in_goal:
                    return "sat"
                return "wait" if in_hold else "fail"

            delta[("wait", s)] = _interval_pieces(pattern.interval, outcome)
            for q in ("sat", "fail"):
                delta[(q, s)] = [([], q)]
        return "wait", {"wait": False, "sat": True, "fail": False}, delta, True
    if isinstance(pattern, _NextPattern):
        delta = {}
        for s in alphabet:
            delta[("start", s)] = [([], "mid")]
            in_goal = s in pattern.goal
            delta[("mid", s)] = _interval_pieces(
                pattern.interval, lambda region, g=in_goal: "sat" if region == "in" and g else "fail"
            )
            for q in ("sat", "fail"):
                delta[(q, s)] = [([], q)]
        return "start", {"start": False, "mid": False, "sat": True, "fail": False}, delta, True
    raise TypeError(pattern)


def compile_fragment(f: Formula, alphabet: Sequence[str]) -> Automaton:
    """Deterministic complete Muller automaton for a boolean combination of patterns.

    Each timed pattern owns a clock that is never reset, so intervals are
    measured from time 0.
    """
    alphabet = list(alphabet)
    unknown = atoms(f) - set(alphabet)
    if unknown:
        raise UnknownAtom(f"atoms outside the alphabet: {sorted(unknown)}")
    patterns: list = []
    skeleton = _split(f, alphabet, patterns)
    comps = [_component(p, alphabet) for p in patterns]
    clocks = []
    clock_of = []
    for c in comps:
        if c[3]:
            clocks.append(f"x{len(clocks) + 1}")
            clock_of.append(clocks[-1])
        else:
            clock_of.append(None)
    if len(clocks) == 1:
        clocks = ["x"]
        clock_of = ["x" if c else None for c in clock_of]

    def name(loc: tuple) -> str:
        return "|".join(loc)

    start = tuple(c[0] for c in comps)
    seen = {start}
    order = [start]
    transitions = []
    todo = [start]
    while todo:
        loc = todo.pop(0)
        for s in alphabet:
            options = [comps[i][2][(loc[i], s)] for i in range(len(comps))]
            for combo in itertools.product(*options):
                guard = []
                for i, (atoms_, _) in enumerate(combo):
                    guard += [(clock_of[i], op, c) for op, c in atoms_]
                target = tuple(t for _, t in combo)
                transitions.append(Transition(name(loc), name(target), s, guard))
                if target not in seen:
                    seen.add(target)
                    order.append(target)
                    todo.append(target)
    accepted = []
    for loc in order:
        verdicts = [comps[i][1][loc[i]] for i in range(len(comps))]
        if _skeleton_value(skeleton, verdicts):
            accepted.append(frozenset({name(loc)}))
    return Automaton(
        locations=[name(loc) for loc in order],
        initial=[name(start)],
        alphabet=alphabet,
        clocks=clocks,
        transitions=transitions,
        acceptance=Muller(tuple(accepted)),
    )
