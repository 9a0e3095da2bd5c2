"""Timed automata with Büchi or Muller acceptance.

Guards are conjunctions of single-clock comparisons with integer constants.
Automata are immutable; every transformation returns a new automaton.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path
from typing import Iterable, Iterator, Optional, Sequence, Union

from .zones import Zone, atom_constraints

OPS = ("<", "<=", "=", ">=", ">")


class InvalidAutomaton(ValueError):
    """Structural problem in an automaton description."""


class NotDeterministic(ValueError):
    """An operation that needs a deterministic automaton got another one."""


class NotComplete(ValueError):
    """An operation that needs a complete automaton got another one."""


@dataclass(frozen=True)
class Transition:
    source: str
    target: str
    label: str
    guard: tuple = ()  # ((clock, op, const), ...)
    resets: frozenset = frozenset()

    def __post_init__(self):
        object.__setattr__(self, "guard", tuple(tuple(g) for g in self.guard))
        object.__setattr__(self, "resets", frozenset(self.resets))

    def guard_text(self) -> str:
        if not self.guard:
            return "true"
        return " && ".join(f"{x}{op}{c}" for x, op, c in self.guard)

    def __str__(self) -> str:
        resets = f" reset {{{', '.join(sorted(self.resets))}}}" if self.resets else ""
        return f"{self.source} -[{self.label}, {self.guard_text()}{resets}]-> {self.target}"


@dataclass(frozen=True)
class Buchi:
    accepting: frozenset

    def __post_init__(self):
        object.__setattr__(self, "accepting", frozenset(self.accepting))

    def locations(self) -> frozenset:
        return self.accepting


@dataclass(frozen=True)
class Muller:
    """Muller acceptance.

    With ``complemented=True`` the accepted sets are every subset of
    ``universe`` except those listed in ``family``; the complement is only
    enumerated on demand.
    """

    family: tuple
    complemented: bool = False
    universe: frozenset = frozenset()

    def __post_init__(self):
        fam = tuple(dict.fromkeys(frozenset(s) for s in self.family))
        object.__setattr__(self, "family", fam)
        object.__setattr__(self, "universe", frozenset(self.universe))

    def accepts_set(self, locs) -> bool:
        locs = frozenset(locs)
        if self.complemented:
            return locs <= self.universe and locs not in self.family
        return locs in self.family

    def sets(self, within: Optional[Iterable[str]] = None) -> Iterator[frozenset]:
        """Accepted non-empty location sets, optionally restricted to ``within``."""
        if not self.complemented:
            allowed = None if within is None else frozenset(within)
            for s in self.family:
                if s and (allowed is None or s <= allowed):
                    yield s
            return
        pool = sorted(self.universe if within is None else frozenset(within) & self.universe)
        excluded = set(self.family)
        for r in range(1, len(pool) + 1):
            for combo in itertools.combinations(pool, r):
                s = frozenset(combo)
                if s not in excluded:
                    yield s

    def materialize(self) -> "Muller":
        if not self.complemented:
            return self
        return Muller(tuple(self.sets()))

    def locations(self) -> frozenset:
        if self.complemented:
            return self.universe
        return frozenset().union(*self.family) if self.family else frozenset()


Acceptance = Union[Buchi, Muller]


@dataclass(frozen=True)
class Automaton:
    locations: tuple
    initial: tuple
    alphabet: tuple
    clocks: tuple
    transitions: tuple
    acceptance: Acceptance = field(default_factory=lambda: Buchi(frozenset()))

    def __post_init__(self):
        for name in ("locations", "initial", "alphabet", "clocks", "transitions"):
            object.__setattr__(self, name, tuple(getattr(self, name)))
        self.validate()

    # validation -------------------------------------------------------------

    def validate(self) -> None:
        locs = set(self.locations)
        if len(locs) != len(self.locations):
            raise InvalidAutomaton("duplicate location names")
        if len(set(self.clocks)) != len(self.clocks):
            raise InvalidAutomaton("duplicate clock names")
        if len(set(self.alphabet)) != len(self.alphabet):
            raise InvalidAutomaton("duplicate alphabet letters")
        for q in self.initial:
            if q not in locs:
                raise InvalidAutomaton(f"initial location {q!r} is not a location")
        clocks = set(self.clocks)
        letters = set(self.alphabet)
        for tr in self.transitions:
            if tr.source not in locs or tr.target not in locs:
                raise InvalidAutomaton(f"transition {tr} uses an unknown location")
            if tr.label not in letters:
                raise InvalidAutomaton(f"transition {tr} uses label outside the alphabet")
            for x, op, c in tr.guard:
                if x not in clocks:
                    raise InvalidAutomaton(f"transition {tr} guards unknown clock {x!r}")
                if op not in OPS:
                    raise InvalidAutomaton(f"transition {tr} uses unknown comparison {op!r}")
                if not isinstance(c, int) or isinstance(c, bool) or c < 0:
                    raise InvalidAutomaton(f"guard constants must be non-negative integers, got {c!r}")
            if not tr.resets <= clocks:
                raise InvalidAutomaton(f"transition {tr} resets an unknown clock")
        acc = self.acceptance
        if isinstance(acc, Buchi):
            if not acc.accepting <= locs:
                raise InvalidAutomaton("accepting set mentions unknown locations")
        elif isinstance(acc, Muller):
            for s in acc.family:
                if not s <= locs:
                    raise InvalidAutomaton("Muller family mentions unknown locations")
            if acc.complemented and acc.universe != frozenset(locs):
                raise InvalidAutomaton("complemented Muller family must range over all locations")
        else:
            raise InvalidAutomaton(f"unknown acceptance {acc!r}")

    # derived data -------------------------------------------------------------

    @property
    def is_buchi(self) -> bool:
        return isinstance(self.acceptance, Buchi)

    @property
    def is_muller(self) -> bool:
        return isinstance(self.acceptance, Muller)

    @cached_property
    def clock_index(self) -> dict:
        return {x: i + 1 for i, x in enumerate(self.clocks)}

    @property
    def dim(self) -> int:
        return len(self.clocks)

    @cached_property
    def max_constants(self) -> tuple:
        """Per-clock maximal guard constant, index 0 for the reference clock."""
        m = [0] * (len(self.clocks) + 1)
        idx = self.clock_index
        for tr in self.transitions:
            for x, _, c in tr.guard:
                m[idx[x]] = max(m[idx[x]], c)
        return tuple(m)

    @cached_property
    def max_constant(self) -> int:
        return max(self.max_constants)

    @cached_property
    def outgoing(self) -> dict:
        out: dict = {q: [] for q in self.locations}
        for tr in self.transitions:
            out[tr.source].append(tr)
        return {q: tuple(v) for q, v in out.items()}

    @cached_property
    def incoming(self) -> dict:
        out: dict = {q: [] for q in self.locations}
        for tr in self.transitions:
            out[tr.target].append(tr)
        return {q: tuple(v) for q, v in out.items()}

    @cached_property
    def by_label(self) -> dict:
        out: dict = {}
        for tr in self.transitions:
            out.setdefault((tr.source, tr.label), []).append(tr)
        return {k: tuple(v) for k, v in out.items()}

    def guard_atoms(self, tr: Transition) -> list:
        idx = self.clock_index
        return [(idx[x], op, c) for x, op, c in tr.guard]

    def guard_constraints(self, tr: Transition) -> list:
        return atom_constraints(self.guard_atoms(tr))

    def guard_zone(self, tr: Transition) -> Optional[Zone]:
        return Zone.universal(self.dim).constrain_all(self.guard_constraints(tr))

    def reset_indices(self, tr: Transition) -> list:
        idx = self.clock_index
        return sorted(idx[x] for x in tr.resets)

    def enabled(self, location: str, label: str, valuation: Sequence) -> list:
        """Transitions from ``location`` on ``label`` whose guard holds at ``valuation``."""
        out = []
        for tr in self.by_label.get((location, label), ()):
            if guard_holds(self.guard_atoms(tr), valuation):
                out.append(tr)
        return out

    def step(self, location: str, label: str, valuation: Sequence) -> list:
        out = []
        resets = None
        for tr in self.enabled(location, label, valuation):
            resets = set(self.reset_indices(tr))
            v = tuple(0 if (i + 1) in resets else val for i, val in enumerate(valuation))
            out.append((tr.target, v))
        return out

    def accepting_locations(self) -> frozenset:
        return self.acceptance.locations()

    def replace(self, **changes) -> "Automaton":
        data = dict(
            locations=self.locations,
            initial=self.initial,
            alphabet=self.alphabet,
            clocks=self.clocks,
            transitions=self.transitions,
            acceptance=self.acceptance,
        )
        data.update(changes)
        return Automaton(**data)

    # JSON -----------------------------------------------------------------

    def to_dict(self) -> dict:
        acc = self.acceptance
        if isinstance(acc, Buchi):
            acceptance = {"buchi": [q for q in self.locations if q in acc.accepting]}
        else:
            order = {q: i for i, q in enumerate(self.locations)}
            sets = [sorted(s, key=order.__getitem__) for s in acc.materialize().family]
            acceptance = {"muller": sets}
        return {
            "locations": list(self.locations),
            "initial": list(self.initial),
            "alphabet": list(self.alphabet),
            "clocks": list(self.clocks),
            "transitions": [
                {
                    "from": tr.source,
                    "to": tr.target,
                    "label": tr.label,
                    "guard": [{"clock": x, "op": op, "const": c} for x, op, c in tr.guard],
                    "resets": sorted(tr.resets),
                }
                for tr in self.transitions
            ],
            "acceptance": acceptance,
        }

    def to_json(self, indent: Optional[int] = 2) -> str:
        return json.dumps(self.to_dict(), indent=indent)

    @classmethod
    def from_dict(cls, data: dict) -> "Automaton":
        validate_json(data)
        transitions = [
            Transition(
                source=t["from"],
                target=t["to"],
                label=t["label"],
                guard=[(g["clock"], g["op"], g["const"]) for g in t["guard"]],
                resets=t["resets"],
            )
            for t in data["transitions"]
        ]
        acc_data = data["acceptance"]
        if "buchi" in acc_data:
            acceptance: Acceptance = Buchi(frozenset(acc_data["buchi"]))
        else:
            acceptance = Muller(tuple(frozenset(s) for s in acc_data["muller"]))
        return cls(
            locations=data["locations"],
            initial=data["initial"],
            alphabet=data["alphabet"],
            clocks=data["clocks"],
            transitions=transitions,
            acceptance=acceptance,
        )

    @classmethod
    def from_json(cls, text: str) -> "Automaton":
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise InvalidAutomaton(f"malformed JSON: {exc}") from None
        return cls.from_dict(data)

    @classmethod
    def load(cls, path) -> "Automaton":
        return cls.from_json(Path(path).read_text())


AUTOMATON_SCHEMA = {
    "type": "object",
    "additionalProperties": False,
    "required": ["locations", "initial", "alphabet", "clocks", "transitions", "acceptance"],
    "properties": {
        "locations": {"type": "array", "items": {"type": "string"}},
        "initial": {"type": "array", "items": {"type": "string"}},
        "alphabet": {"type": "array", "items": {"type": "string"}},
        "clocks": {"type": "array", "items": {"type": "string"}},
        "transitions": {
            "type": "array",
            "items": {
                "type": "object",
                "additionalProperties": False,
                "required": ["from", "to", "label", "guard", "resets"],
                "properties": {
                    "from": {"type": "string"},
                    "to": {"type": "string"},
                    "label": {"type": "string"},
                    "guard": {
                        "type": "array",
                        "items": {
                            "type": "object",
                            "additionalProperties": False,
                            "required": ["clock", "op", "const"],
                            "properties": {
                                "clock": {"type": "string"},
                                "op": {"enum": list(OPS)},
                                "const": {"type": "integer", "minimum": 0},
                            },
                        },
                    },
                    "resets": {"type": "array", "items": {"type": "string"}},
                },
            },
        },
        "acceptance": {
            "oneOf": [
                {
                    "type": "object",
                    "additionalProperties": False,
                    "required": ["buchi"],
                    "properties": {"buchi": {"type": "array", "items": {"type": "string"}}},
                },
                {
                    "type": "object",
                    "additionalProperties": False,
                    "required": ["muller"],
                    "properties": {
                        "muller": {
                            "type": "array",
                            "items": {"type": "array", "items": {"type": "string"}},
                        }
                    },
                },
            ]
        },
    },
}


def validate_json(data) -> None:
    import jsonschema

    try:
        jsonschema.validate(data, AUTOMATON_SCHEMA)
    except jsonschema.ValidationError as exc:
        where = "/".join(str(p) for p in exc.absolute_path) or "<root>"
        raise InvalidAutomaton(f"schema violation at {where}: {exc.message}") from None


def guard_holds(atoms: Iterable, valuation: Sequence) -> bool:
    for x, op, c in atoms:
        v = valuation[x - 1]
        if op == "<":
            ok = v < c
        elif op == "<=":
            ok = v <= c
        elif op == "=":
            ok = v == c
        elif op == ">=":
            ok = v >= c
        else:
            ok = v > c
        if not ok:
            return False
    return True


# structural checks -----------------------------------------------------------


@dataclass(frozen=True)
class DeterminismWitness:
    reason: str
    first: Optional[Transition] = None
    second: Optional[Transition] = None
    valuation: Optional[tuple] = None


def check_deterministic(a: Automaton) -> tuple:
    """``(True, None)`` or ``(False, DeterminismWitness)``."""
    if len(a.initial) != 1:
        return False, DeterminismWitness(f"{len(a.initial)} initial locations")
    for (_, _), trs in a.by_label.items():
        zones = [a.guard_zone(tr) for tr in trs]
        for i, j in itertools.combinations(range(len(trs)), 2):
            if zones[i] is None or zones[j] is None:
                continue
            overlap = zones[i].intersect(zones[j])
            if overlap is not None:
                return False, DeterminismWitness(
                    "overlapping guards", trs[i], trs[j], overlap.sample()
                )
    return True, None


def is_deterministic(a: Automaton) -> bool:
    return check_deterministic(a)[0]


def _missing_guards(a: Automaton, location: str, label: str) -> list:
    """Zones of valuations where no ``label`` transition leaves ``location``."""
    rest = [Zone.universal(a.dim)]
    for tr in a.by_label.get((location, label), ()):
        splitters = a.guard_constraints(tr)
        gz = a.guard_zone(tr)
        if gz is None:
            continue
        nxt = []
        for r in rest:
            nxt.extend(r.subtract(gz, splitters))
        rest = nxt
        if not rest:
            break
    return rest


def zone_to_guard(a: Automaton, zone: Zone) -> tuple:
    """Single-clock guard denoting ``zone``; the zone must be a box."""
    atoms = []
    for x, i in a.clock_index.items():
        lo, lo_att = zone.lower(i)
        hi, hi_att = zone.upper(i)
        if hi != float("inf") and lo == hi:
            atoms.append((x, "=", int(lo)))
            continue
        if lo != 0 or not lo_att:
            atoms.append((x, ">=" if lo_att else ">", int(lo)))
        if hi != float("inf"):
            atoms.append((x, "<=" if hi_att else "<", int(hi)))
    return tuple(atoms)


def is_complete(a: Automaton) -> bool:
    for q in a.locations:
        for s in a.alphabet:
            if _missing_guards(a, q, s):
                return False
    return True


def complete_with_sink(a: Automaton, sink: str = "sink") -> Automaton:
    """Route every missing (location, label, valuation) to a fresh rejecting sink."""
    extra = []
    for q in a.locations:
        for s in a.alphabet:
            for z in _missing_guards(a, q, s):
                extra.append((q, s, zone_to_guard(a, z)))
    if not extra:
        return a
    name = sink
    n = 0
    while name in a.locations:
        n += 1
        name = f"{sink}{n}"
    transitions = list(a.transitions)
    transitions += [Transition(q, name, s, g) for q, s, g in extra]
    transitions += [Transition(name, name, s) for s in a.alphabet]
    acc = a.acceptance
    if isinstance(acc, Muller) and acc.complemented:
        # the sink must lie in no accepted set; keep the accepted family fixed
        acc = acc.materialize()
    return a.replace(
        locations=a.locations + (name,),
        transitions=tuple(transitions),
        acceptance=acc,
    )


def buchi_to_muller(a: Automaton) -> Automaton:
    if not isinstance(a.acceptance, Buchi):
        raise InvalidAutomaton("expected Büchi acceptance")
    f = a.acceptance.accepting
    family = []
    locs = list(a.locations)
    for r in range(1, len(locs) + 1):
        for combo in itertools.combinations(locs, r):
            if f.intersection(combo):
                family.append(frozenset(combo))
    return a.replace(acceptance=Muller(tuple(family)))


def complement_dtma(a: Automaton) -> Automaton:
    """Swap the Muller family for its complement within all location sets."""
    if not isinstance(a.acceptance, Muller):
        raise InvalidAutomaton("complement_dtma needs Muller acceptance")
    ok, witness = check_deterministic(a)
    if not ok:
        raise NotDeterministic(f"automaton is not deterministic: {witness.reason}")
    if not is_complete(a):
        raise NotComplete("automaton is not complete; call complete_with_sink first")
    acc = a.acceptance
    universe = frozenset(a.locations)
    if acc.complemented:
        new = Muller(acc.family)
    else:
        new = Muller(acc.family, complemented=True, universe=universe)
    return a.replace(acceptance=new)


def tba_component_name(location: str, index: int, tier: int) -> str:
    return f"{location}@F{index}.{tier}"


def tma_to_tba(a: Automaton, family: Optional[Sequence] = None) -> Automaton:
    """Büchi automaton accepting the same language as a Muller automaton.

    One component per accepted set ``F = {f_1..f_k}``: tier 0 copies the
    automaton; a transition into ``F`` may commit to tier 1; in tier
    ``i >= 1`` only transitions inside ``F`` survive and the tier advances
    when leaving ``f_i`` (``k`` wraps to 1).  ``(f_k, k)`` is accepting.
    """
    if not isinstance(a.acceptance, Muller):
        raise InvalidAutomaton("tma_to_tba needs Muller acceptance")
    sets = list(a.acceptance.sets()) if family is None else [frozenset(s) for s in family]
    locations: list = []
    initial: list = []
    transitions: list = []
    accepting: set = set()
    order = {q: i for i, q in enumerate(a.locations)}
    for idx, fset in enumerate(sets):
        comp = component_for_set(a, fset, idx, order)
        locations += comp[0]
        initial += comp[1]
        transitions += comp[2]
        accepting |= comp[3]
    return Automaton(
        locations=locations,
        initial=initial,
        alphabet=a.alphabet,
        clocks=a.clocks,
        transitions=transitions,
        acceptance=Buchi(frozenset(accepting)),
    )


def component_for_set(a: Automaton, fset: frozenset, idx: int, order: Optional[dict] = None):
    """Locations, initial locations, transitions and accepting set of one component."""
    order = order or {q: i for i, q in enumerate(a.locations)}
    seq = sorted(fset, key=order.__getitem__)
    k = len(seq)
    name = lambda q, i: tba_component_name(q, idx, i)  # noqa: E731
    locations = [name(q, 0) for q in a.locations]
    locations += [name(q, i) for i in range(1, k + 1) for q in seq]
    initial = [name(q, 0) for q in a.initial]
    transitions = []
    for tr in a.transitions:
        transitions.append(Transition(name(tr.source, 0), name(tr.target, 0), tr.label, tr.guard, tr.resets))
        if tr.target in fset:
            transitions.append(Transition(name(tr.source, 0), name(tr.target, 1), tr.label, tr.guard, tr.resets))
        if tr.source in fset and tr.target in fset:
            for i in range(1, k + 1):
                j = i if tr.source != seq[i - 1] else (i % k) + 1
                transitions.append(
                    Transition(name(tr.source, i), name(tr.target, j), tr.label, tr.guard, tr.resets)
                )
    accepting = {name(seq[-1], k)} if k else set()
    return locations, initial, transitions, accepting


def muller_component(a: Automaton, fset: frozenset, idx: int = 0) -> Automaton:
    locations, initial, transitions, accepting = component_for_set(a, fset, idx)
    return Automaton(locations, initial, a.alphabet, a.clocks, transitions, Buchi(frozenset(accepting)))


def to_dot(a: Automaton) -> str:
    acc = a.accepting_locations() if a.is_buchi else frozenset()
    lines = ["digraph automaton {", "  rankdir=LR;"]
    for q in a.locations:
        shape = "doublecircle" if q in acc else "circle"
        lines.append(f'  "{q}" [shape={shape}];')
    for i, q in enumerate(a.initial):
        lines.append(f'  "__init{i}" [shape=point]; "__init{i}" -> "{q}";')
    for tr in a.transitions:
        label = f"{tr.label}, {tr.guard_text()}"
        if tr.resets:
            label += f", {{{', '.join(sorted(tr.resets))}}}:=0"
        lines.append(f'  "{tr.source}" -> "{tr.target}" [label="{label}"];')
    lines.append("}")
    return "\n".join(lines)
