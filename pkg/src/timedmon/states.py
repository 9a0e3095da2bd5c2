"""Sets of automaton states: one federation per location."""

from __future__ import annotations

from typing import Iterable, Mapping, Optional, Sequence

from .zones import Federation, Zone


class StateSet:
    """A set of ``(location, valuation)`` pairs over a fixed clock count.

    Locations that are absent map to the empty federation.
    """

    __slots__ = ("clocks", "_parts")

    def __init__(self, clocks: int, parts: Optional[Mapping[str, Federation]] = None):
        self.clocks = clocks
        self._parts = {}
        if parts:
            for loc, fed in parts.items():
                if not isinstance(fed, Federation):
                    fed = Federation(clocks, fed)
                if fed:
                    self._parts[loc] = fed

    @classmethod
    def empty(cls, clocks: int) -> "StateSet":
        return cls(clocks)

    @classmethod
    def universal(cls, clocks: int, locations: Iterable[str]) -> "StateSet":
        return cls(clocks, {q: Federation.universal(clocks) for q in locations})

    @classmethod
    def single(cls, location: str, zone: Zone) -> "StateSet":
        return cls(zone.clocks, {location: Federation(zone.clocks, [zone])})

    @classmethod
    def point(cls, location: str, valuation: Sequence) -> "StateSet":
        return cls.single(location, Zone.point(valuation))

    # access ---------------------------------------------------------------

    def __getitem__(self, loc: str) -> Federation:
        return self._parts.get(loc) or Federation.empty(self.clocks)

    def locations(self) -> list:
        return list(self._parts)

    def items(self):
        return self._parts.items()

    def pairs(self):
        for loc, fed in self._parts.items():
            for z in fed:
                yield loc, z

    def zone_count(self) -> int:
        return sum(len(f) for f in self._parts.values())

    def is_empty(self) -> bool:
        return not self._parts

    def __bool__(self) -> bool:
        return bool(self._parts)

    def __repr__(self) -> str:
        inner = ", ".join(f"{q}: {f!r}" for q, f in sorted(self._parts.items()))
        return f"StateSet({{{inner}}})"

    def contains(self, location: str, valuation: Sequence) -> bool:
        fed = self._parts.get(location)
        return fed is not None and fed.contains(valuation)

    def contains_zone(self, location: str, zone: Zone) -> bool:
        fed = self._parts.get(location)
        return fed is not None and fed.covers_zone(zone)

    # algebra --------------------------------------------------------------

    def _combine(self, other: "StateSet", op, keep_missing_left: bool, keep_missing_right: bool) -> "StateSet":
        out = {}
        for loc in set(self._parts) | set(other._parts):
            a = self._parts.get(loc)
            b = other._parts.get(loc)
            if a is not None and b is not None:
                out[loc] = op(a, b)
            elif a is not None and keep_missing_left:
                out[loc] = a
            elif b is not None and keep_missing_right:
                out[loc] = b
        return StateSet(self.clocks, out)

    def union(self, other: "StateSet") -> "StateSet":
        return self._combine(other, Federation.union, True, True)

    def intersect(self, other: "StateSet") -> "StateSet":
        return self._combine(other, Federation.intersect, False, False)

    def subtract(self, other: "StateSet") -> "StateSet":
        return self._combine(other, Federation.subtract, True, False)

    def complement(self, locations: Iterable[str]) -> "StateSet":
        return StateSet.universal(self.clocks, locations).subtract(self)

    def intersects(self, other: "StateSet") -> bool:
        for loc, fed in self._parts.items():
            o = other._parts.get(loc)
            if o is None:
                continue
            for a in fed:
                for b in o:
                    if a.intersect(b) is not None:
                        return True
        return False

    def includes(self, other: "StateSet") -> bool:
        for loc, fed in other._parts.items():
            mine = self._parts.get(loc)
            if mine is None or not mine.includes(fed):
                return False
        return True

    def same_set(self, other: "StateSet") -> bool:
        return self.includes(other) and other.includes(self)

    def map_zones(self, fn) -> "StateSet":
        return StateSet(self.clocks, {q: f.map(fn) for q, f in self._parts.items()})

    def up(self) -> "StateSet":
        return self.map_zones(Zone.up)

    def down(self) -> "StateSet":
        return self.map_zones(Zone.down)

    def rename(self, fn) -> "StateSet":
        out: dict = {}
        for loc, fed in self._parts.items():
            new = fn(loc)
            out[new] = out[new].union(fed) if new in out else fed
        return StateSet(self.clocks, out)

    # output ---------------------------------------------------------------

    def to_json(self, clock_names: Sequence[str], locations: Optional[Sequence[str]] = None) -> dict:
        """``{"location": [constraint strings per zone]}`` with a fixed key order."""
        order = list(locations) if locations is not None else sorted(self._parts)
        out = {}
        for loc in order:
            fed = self._parts.get(loc)
            if fed is None:
                continue
            out[loc] = sorted(z.to_text(clock_names) for z in fed)
        return out
