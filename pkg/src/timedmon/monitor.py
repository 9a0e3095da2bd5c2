"""Three-valued online monitoring against a property/complement automaton pair."""

from __future__ import annotations

import enum
import random
import re
import warnings
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Optional

from .automaton import (
    Automaton,
    Buchi,
    InvalidAutomaton,
    NotDeterministic,
    buchi_to_muller,
    check_deterministic,
    complement_dtma,
    complete_with_sink,
)
from .states import StateSet
from .zones import as_rational


class Verdict(enum.Enum):
    TOP = "TOP"
    BOT = "BOT"
    UNKNOWN = "UNKNOWN"

    @property
    def conclusive(self) -> bool:
        return self is not Verdict.UNKNOWN

    def swapped(self) -> "Verdict":
        return {Verdict.TOP: Verdict.BOT, Verdict.BOT: Verdict.TOP}.get(self, self)

    def __str__(self) -> str:
        return self.value


@dataclass(frozen=True)
class TimedWord:
    events: tuple = ()

    def __post_init__(self):
        events = tuple((str(s), as_rational(t)) for s, t in self.events)
        last = 0
        for s, t in events:
            if t < last:
                raise ValueError(f"timestamps must be non-negative and non-decreasing (got {t} after {last})")
            last = t
        object.__setattr__(self, "events", events)

    @property
    def duration(self):
        return self.events[-1][1] if self.events else 0

    def __len__(self) -> int:
        return len(self.events)

    def __iter__(self):
        return iter(self.events)

    def __str__(self) -> str:
        return "".join(f"({s},{format_rational(t)})" for s, t in self.events) or "ε"


def concat_at(a: TimedWord, b: TimedWord, t=None) -> TimedWord:
    """``a`` followed by ``b`` shifted by ``t`` (default: the duration of ``a``)."""
    t = a.duration if t is None else as_rational(t)
    if t < a.duration:
        raise ValueError("concatenation point precedes the end of the first word")
    return TimedWord(a.events + tuple((s, u + t) for s, u in b.events))


@dataclass(frozen=True)
class Observation:
    word: TimedWord = TimedWord()
    now: object = 0

    def __post_init__(self):
        if not isinstance(self.word, TimedWord):
            object.__setattr__(self, "word", TimedWord(tuple(self.word)))
        object.__setattr__(self, "now", as_rational(self.now))
        if self.now < self.word.duration:
            raise ValueError("observation time precedes the last event")

    @classmethod
    def of(cls, events: Iterable = (), now=None) -> "Observation":
        word = TimedWord(tuple(events))
        return cls(word, word.duration if now is None else now)

    def extend(self, events: Iterable = (), now=None) -> "Observation":
        """Append events given in absolute time."""
        word = TimedWord(self.word.events + tuple(events))
        if word.duration < self.now:
            if len(word) > len(self.word):
                raise ValueError("extension events precede the observation time")
        end = max(word.duration, self.now)
        return Observation(word, end if now is None else now)

    def __str__(self) -> str:
        return f"({self.word}, {format_rational(self.now)})"


def format_rational(x) -> str:
    """Shortest exact decimal when it terminates, else ``p/q``."""
    x = Fraction(x)
    if x.denominator == 1:
        return str(x.numerator)
    d = x.denominator
    twos = fives = 0
    while d % 2 == 0:
        d //= 2
        twos += 1
    while d % 5 == 0:
        d //= 5
        fives += 1
    if d != 1:
        return f"{x.numerator}/{x.denominator}"
    digits = max(twos, fives)
    scaled = x * 10**digits
    sign = "-" if scaled < 0 else ""
    n = abs(int(scaled))
    s = str(n).rjust(digits + 1, "0")
    return f"{sign}{s[:-digits]}.{s[-digits:]}".rstrip("0").rstrip(".")


# ---------------------------------------------------------------------------
# reach sets


def run_concrete(a: Automaton, word: TimedWord, now=None, start: Optional[set] = None, start_time=0) -> set:
    """Concrete ``(location, valuation)`` states after ``word``, delayed to ``now``."""
    for s, _ in word:
        if s not in a.alphabet:
            raise ValueError(f"symbol {s!r} is not in the automaton alphabet")
    if start is None:
        zero = tuple(0 for _ in a.clocks)
        states = {(q, zero) for q in a.initial}
    else:
        states = set(start)
    last = as_rational(start_time)
    for s, t in word:
        states = _advance(a, states, t - last)
        states = _fire(a, states, s)
        last = t
    if now is not None:
        states = _advance(a, states, as_rational(now) - last)
    return states


def _advance(a: Automaton, states: set, d) -> set:
    if d == 0:
        return states
    if d < 0:
        raise ValueError("time regression")
    return {(q, tuple(x + d for x in v)) for q, v in states}


def _fire(a: Automaton, states: set, s: str) -> set:
    out = set()
    for q, v in states:
        out.update(a.step(q, s, v))
    return out


def reach_set(a: Automaton, obs: Observation) -> StateSet:
    states = run_concrete(a, obs.word, obs.now)
    out = StateSet.empty(a.dim)
    for q, v in states:
        out = out.union(StateSet.point(q, v))
    return out


def _meets(states: Iterable, ne: StateSet) -> bool:
    return any(ne.contains(q, v) for q, v in states)


# ---------------------------------------------------------------------------
# specifications


class MonitorSpec:
    """A property automaton together with an automaton for its complement."""

    def __init__(self, positive: Automaton, negative: Automaton, *, deterministic: bool = False):
        if tuple(positive.alphabet) != tuple(negative.alphabet) and set(positive.alphabet) != set(negative.alphabet):
            raise InvalidAutomaton("the automaton pair must share one alphabet")
        self.positive = positive
        self.negative = negative
        self.deterministic = deterministic

    @classmethod
    def from_dtma(cls, a: Automaton) -> "MonitorSpec":
        """Complete a deterministic automaton and derive its complement."""
        ok, witness = check_deterministic(a)
        if not ok:
            raise NotDeterministic(f"automaton is not deterministic: {witness.reason}")
        completed = complete_with_sink(a)
        muller = buchi_to_muller(completed) if isinstance(completed.acceptance, Buchi) else completed
        return cls(muller, complement_dtma(muller), deterministic=True)

    @classmethod
    def from_pair(cls, positive: Automaton, negative: Automaton, check: bool = True,
                  samples: int = 50, seed: int = 0) -> "MonitorSpec":
        """Use a caller-supplied complement; complementarity is only spot-checked."""
        spec = cls(positive, negative)
        if check:
            bad = spec.sample_complementarity(samples, seed)
            if bad is not None:
                warnings.warn(
                    f"automata do not look complementary: lasso {bad} is accepted by "
                    "both or by neither",
                    stacklevel=2,
                )
        return spec

    def sample_complementarity(self, samples: int = 50, seed: int = 0):
        from .lasso import accepts_lasso, random_lasso

        rng = random.Random(seed)
        bound = max(self.positive.max_constant, self.negative.max_constant, 1)
        for _ in range(samples):
            w = random_lasso(rng, list(self.positive.alphabet), max_gap=bound + 1, denominator=2)
            if accepts_lasso(self.positive, w) == accepts_lasso(self.negative, w):
                return w
        return None

    def swapped(self) -> "MonitorSpec":
        spec = MonitorSpec(self.negative, self.positive, deterministic=self.deterministic)
        # NE sets are reusable
        if "ne_positive" in self.__dict__:
            spec.__dict__["ne_negative"] = self.__dict__["ne_positive"]
        if "ne_negative" in self.__dict__:
            spec.__dict__["ne_positive"] = self.__dict__["ne_negative"]
        return spec

    @property
    def alphabet(self) -> tuple:
        return self.positive.alphabet

    @cached_property
    def ne_positive(self) -> StateSet:
        from .langstates import nonempty_states

        return nonempty_states(self.positive)

    @cached_property
    def ne_negative(self) -> StateSet:
        from .langstates import nonempty_states

        return nonempty_states(self.negative)

    @cached_property
    def e_positive(self) -> StateSet:
        return self.ne_positive.complement(self.positive.locations)

    @cached_property
    def e_negative(self) -> StateSet:
        return self.ne_negative.complement(self.negative.locations)

    def verdict_of_states(self, pos_states: Iterable, neg_states: Iterable) -> Verdict:
        if not _meets(pos_states, self.ne_positive):
            return Verdict.BOT
        if not _meets(neg_states, self.ne_negative):
            return Verdict.TOP
        return Verdict.UNKNOWN


def verdict(spec: MonitorSpec, obs: Observation) -> Verdict:
    pos = run_concrete(spec.positive, obs.word, obs.now)
    neg = run_concrete(spec.negative, obs.word, obs.now)
    return spec.verdict_of_states(pos, neg)


# ---------------------------------------------------------------------------
# streaming


class MonitorSession:
    """Incremental monitor; one owner advances it with events and ticks."""

    def __init__(self, spec: MonitorSpec):
        self.spec = spec
        zero = tuple(0 for _ in spec.positive.clocks)
        self.pos = {(q, zero) for q in spec.positive.initial}
        zero_neg = tuple(0 for _ in spec.negative.clocks)
        self.neg = {(q, zero_neg) for q in spec.negative.initial}
        self.now = Fraction(0)
        self.events: list = []
        self.latched: Optional[Verdict] = None

    @property
    def observation(self) -> Observation:
        return Observation(TimedWord(tuple(self.events)), self.now)

    def _delay_to(self, time) -> None:
        time = as_rational(time)
        if time < self.now:
            raise ValueError(f"time regression: {format_rational(time)} < {format_rational(self.now)}")
        d = time - self.now
        self.pos = _advance(self.spec.positive, self.pos, d)
        self.neg = _advance(self.spec.negative, self.neg, d)
        self.now = time

    def event(self, symbol: str, time) -> Verdict:
        if symbol not in self.spec.alphabet:
            raise ValueError(f"symbol {symbol!r} is not in the alphabet")
        self._delay_to(time)
        self.events.append((symbol, self.now))
        self.pos = _fire(self.spec.positive, self.pos, symbol)
        self.neg = _fire(self.spec.negative, self.neg, symbol)
        return self._current()

    def tick(self, time) -> Verdict:
        self._delay_to(time)
        return self._current()

    def _current(self) -> Verdict:
        if self.latched is not None:
            return self.latched
        v = self.spec.verdict_of_states(self.pos, self.neg)
        if v.conclusive:
            self.latched = v
        return v


def session_step(session: MonitorSession, item) -> Verdict:
    """Advance with ``("event", symbol, time)`` or ``("tick", time)``."""
    if item[0] == "event":
        return session.event(item[1], item[2])
    if item[0] == "tick":
        return session.tick(item[1])
    raise ValueError(f"unknown input {item!r}")


# ---------------------------------------------------------------------------
# trace files


class TraceError(ValueError):
    pass


_TIME = re.compile(r"^(\d+(\.\d+)?|\d+/\d+)$")


def parse_time(text: str):
    text = text.strip()
    if not _TIME.match(text):
        raise TraceError(f"malformed time {text!r} (expected a decimal or p/q)")
    value = Fraction(text)
    return value.numerator if value.denominator == 1 else value


def parse_trace_line(line: str, lineno: int = 0):
    """One directive as ``("event", sym, t)`` / ``("tick", t)``, or None for blanks."""
    body = line.split("#", 1)[0].strip()
    if not body:
        return None
    parts = body.split()
    where = f"line {lineno}: " if lineno else ""
    try:
        if parts[0] == "event" and len(parts) == 3:
            return ("event", parts[1], parse_time(parts[2]))
        if parts[0] == "tick" and len(parts) == 2:
            return ("tick", parse_time(parts[1]))
    except TraceError as exc:
        raise TraceError(where + str(exc)) from None
    raise TraceError(f"{where}unknown directive {body!r}")


def parse_trace(text: str) -> Observation:
    events = []
    now = Fraction(0)
    for lineno, line in enumerate(text.splitlines(), 1):
        item = parse_trace_line(line, lineno)
        if item is None:
            continue
        t = item[-1]
        if t < now:
            raise TraceError(
                f"line {lineno}: decreasing timestamps ({format_rational(t)} after {format_rational(now)})"
            )
        now = Fraction(t)
        if item[0] == "event":
            events.append((item[1], t))
    return Observation(TimedWord(tuple(events)), now)
