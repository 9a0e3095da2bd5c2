"""Exact-rational difference-bound matrices, zones and federations.

A bound is a pair ``(value, flag)`` where ``flag`` is ``1`` for a non-strict
inequality (``<=``) and ``0`` for a strict one (``<``).  Tuple order then
matches bound order: ``(c, 0) < (c, 1)``.  Values are ``int`` or
:class:`fractions.Fraction`; the infinite bound is ``(math.inf, 1)``.

Index 0 of every matrix is the reference clock (constant zero); entry
``(i, j)`` bounds ``x_i - x_j``.
"""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Iterable, Iterator, Optional, Sequence

INF = math.inf
INF_BOUND = (INF, 1)
LE_ZERO = (0, 1)
LT_ZERO = (0, 0)

Bound = tuple
Matrix = tuple  # tuple of tuples of Bound


def le(c) -> Bound:
    return (c, 1)


def lt(c) -> Bound:
    return (c, 0)


def bound_add(a: Bound, b: Bound) -> Bound:
    if a[0] == INF or b[0] == INF:
        return INF_BOUND
    return (a[0] + b[0], a[1] & b[1])


def bound_negate(b: Bound) -> Bound:
    """Bound of the complementary constraint on the reversed difference."""
    return (-b[0], 1 - b[1])


def as_rational(value):
    """Normalise ints, Fractions and decimal strings to int/Fraction."""
    if isinstance(value, bool):
        raise TypeError("booleans are not clock values")
    if isinstance(value, int):
        return value
    if isinstance(value, Fraction):
        return value.numerator if value.denominator == 1 else value
    if isinstance(value, float):
        if not math.isfinite(value):
            raise ValueError(f"not a finite clock value: {value}")
        value = Fraction(value).limit_denominator(10**9)
        return value.numerator if value.denominator == 1 else value
    if isinstance(value, str):
        return as_rational(Fraction(value.strip()))
    raise TypeError(f"unsupported clock value type: {type(value).__name__}")


def canonicalize(matrix) -> Optional[Matrix]:
    """Floyd-Warshall closure; ``None`` if the constraints are contradictory."""
    m = [list(row) for row in matrix]
    n = len(m)
    for k in range(n):
        mk = m[k]
        for i in range(n):
            mi = m[i]
            mik = mi[k]
            if mik[0] == INF:
                continue
            for j in range(n):
                mkj = mk[j]
                if mkj[0] == INF:
                    continue
                s = (mik[0] + mkj[0], mik[1] & mkj[1])
                if s < mi[j]:
                    mi[j] = s
            if mi[i] < LE_ZERO:
                return None
    for i in range(n):
        if m[i][i] < LE_ZERO:
            return None
        m[i][i] = LE_ZERO
    return tuple(tuple(row) for row in m)


def _close_after(m: list, i: int, j: int) -> bool:
    """Restore canonical form after entry (i, j) was tightened. In place."""
    n = len(m)
    bij = m[i][j]
    if bound_add(m[j][i], bij) < LE_ZERO:
        return False
    col_i = [m[k][i] for k in range(n)]
    row_j = m[j]
    for k in range(n):
        cki = col_i[k]
        if cki[0] == INF:
            continue
        via = bound_add(cki, bij)
        mk = m[k]
        for l in range(n):
            cand = bound_add(via, row_j[l])
            if cand < mk[l]:
                mk[l] = cand
    for k in range(n):
        if m[k][k] < LE_ZERO:
            return False
    return True


class Zone:
    """A non-empty convex set of clock valuations in canonical DBM form.

    Operations that can produce the empty set return ``None`` instead of a
    zone. Zones are immutable and hashable; equality is equality of the
    denoted point sets.
    """

    __slots__ = ("dbm", "dim", "_hash")

    def __init__(self, dbm: Matrix):
        self.dbm = dbm
        self.dim = len(dbm)
        self._hash = None

    # construction -------------------------------------------------------

    @classmethod
    def from_matrix(cls, matrix) -> Optional["Zone"]:
        closed = canonicalize(matrix)
        return None if closed is None else cls(closed)

    @classmethod
    def universal(cls, clocks: int) -> "Zone":
        n = clocks + 1
        rows = []
        for i in range(n):
            row = []
            for j in range(n):
                if i == j or i == 0:
                    row.append(LE_ZERO)
                else:
                    row.append(INF_BOUND)
            rows.append(tuple(row))
        return cls(tuple(rows))

    @classmethod
    def zero(cls, clocks: int) -> "Zone":
        n = clocks + 1
        return cls(tuple(tuple(LE_ZERO for _ in range(n)) for _ in range(n)))

    @classmethod
    def point(cls, values: Sequence) -> "Zone":
        vals = [0] + [as_rational(v) for v in values]
        if any(v < 0 for v in vals):
            raise ValueError("clock values must be non-negative")
        n = len(vals)
        return cls(tuple(tuple((vals[i] - vals[j], 1) for j in range(n)) for i in range(n)))

    @classmethod
    def from_constraints(cls, clocks: int, constraints: Iterable) -> Optional["Zone"]:
        """Build from ``(i, j, bound)`` triples meaning ``x_i - x_j`` bounded."""
        z = cls.universal(clocks)
        m = [list(r) for r in z.dbm]
        for i, j, b in constraints:
            if b < m[i][j]:
                m[i][j] = b
        return cls.from_matrix(m)

    # basic queries ------------------------------------------------------

    @property
    def clocks(self) -> int:
        return self.dim - 1

    def __eq__(self, other) -> bool:
        return isinstance(other, Zone) and self.dbm == other.dbm

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(self.dbm)
        return self._hash

    def __repr__(self) -> str:
        return f"Zone({self.to_text()})"

    def contains(self, point: Sequence) -> bool:
        vals = (0,) + tuple(point)
        d = self.dbm
        n = self.dim
        for i in range(n):
            vi = vals[i]
            row = d[i]
            for j in range(n):
                if i == j:
                    continue
                b = row[j]
                if b[0] == INF:
                    continue
                diff = vi - vals[j]
                if diff > b[0] or (diff == b[0] and not b[1]):
                    return False
        return True

    def includes(self, other: "Zone") -> bool:
        """True iff ``other`` is a subset of this zone."""
        a, b = self.dbm, other.dbm
        n = self.dim
        for i in range(n):
            ai, bi = a[i], b[i]
            for j in range(n):
                if bi[j] > ai[j]:
                    return False
        return True

    def lower(self, i: int) -> tuple:
        """``(value, attained)`` lower bound of clock ``i``."""
        b = self.dbm[0][i]
        return (-b[0], bool(b[1]))

    def upper(self, i: int) -> tuple:
        """``(value, attained)`` upper bound of clock ``i``; value may be inf."""
        b = self.dbm[i][0]
        return (b[0], bool(b[1]) and b[0] != INF)

    # transformations ----------------------------------------------------

    def constrain(self, i: int, j: int, bound: Bound) -> Optional["Zone"]:
        if not bound < self.dbm[i][j]:
            return self
        m = [list(r) for r in self.dbm]
        m[i][j] = bound
        if not _close_after(m, i, j):
            return None
        return Zone(tuple(tuple(r) for r in m))

    def constrain_all(self, constraints: Iterable) -> Optional["Zone"]:
        z: Optional[Zone] = self
        for i, j, b in constraints:
            z = z.constrain(i, j, b)
            if z is None:
                return None
        return z

    def intersect(self, other: "Zone") -> Optional["Zone"]:
        a, b = self.dbm, other.dbm
        n = self.dim
        changed = False
        m = []
        for i in range(n):
            row = []
            for j in range(n):
                x, y = a[i][j], b[i][j]
                if y < x:
                    row.append(y)
                    changed = True
                else:
                    row.append(x)
            m.append(row)
        if not changed:
            return self
        return Zone.from_matrix(m)

    def up(self) -> "Zone":
        d = self.dbm
        if all(d[i][0][0] == INF for i in range(1, self.dim)):
            return self
        m = [list(r) for r in d]
        for i in range(1, self.dim):
            m[i][0] = INF_BOUND
        return Zone(tuple(tuple(r) for r in m))

    def down(self) -> "Zone":
        m = [list(r) for r in self.dbm]
        n = self.dim
        for i in range(1, n):
            best = LE_ZERO
            for j in range(1, n):
                if m[j][i] < best:
                    best = m[j][i]
            m[0][i] = best
        closed = canonicalize(m)
        assert closed is not None
        return Zone(closed)

    def reset(self, clocks: Iterable[int]) -> "Zone":
        clocks = list(clocks)
        if not clocks:
            return self
        m = [list(r) for r in self.dbm]
        n = self.dim
        for x in clocks:
            for j in range(n):
                m[x][j] = m[0][j]
                m[j][x] = m[j][0]
            m[x][x] = LE_ZERO
        return Zone(tuple(tuple(r) for r in m))

    def free(self, clocks: Iterable[int]) -> "Zone":
        clocks = list(clocks)
        if not clocks:
            return self
        m = [list(r) for r in self.dbm]
        n = self.dim
        for x in clocks:
            for j in range(n):
                if j != x:
                    m[x][j] = INF_BOUND
                    m[j][x] = m[j][0]
            m[x][x] = LE_ZERO
        return Zone(tuple(tuple(r) for r in m))

    def extrapolate(self, max_consts: Sequence) -> "Zone":
        """Max-constant widening; ``max_consts[0]`` is ignored (treated as 0).

        A clock whose maximum constant is ``math.inf`` is never widened.
        """
        d = self.dbm
        n = self.dim
        m = None
        for i in range(n):
            mi = 0 if i == 0 else max_consts[i]
            for j in range(n):
                if i == j:
                    continue
                b = d[i][j]
                if b[0] == INF:
                    continue
                mj = 0 if j == 0 else max_consts[j]
                if i != 0 and b > (mi, 1):
                    nb = INF_BOUND
                elif b < (-mj, 0):
                    nb = (-mj, 0)
                else:
                    continue
                if m is None:
                    m = [list(r) for r in d]
                m[i][j] = nb
        if m is None:
            return self
        closed = canonicalize(m)
        assert closed is not None
        return Zone(closed)

    def release_upper(self, i: int) -> "Zone":
        """Remove every upper bound on ``x_i - x_j`` (upward closure in clock i)."""
        m = [list(r) for r in self.dbm]
        for j in range(self.dim):
            if j != i:
                m[i][j] = INF_BOUND
        return Zone(tuple(tuple(r) for r in m))

    def subtract(self, other: "Zone", splitters: Optional[Iterable] = None) -> list:
        """Zones whose union is ``self \\ other`` (pairwise disjoint).

        ``splitters`` optionally restricts the constraints of ``other`` used
        for splitting; it must describe ``other`` exactly.
        """
        inter = self.intersect(other)
        if inter is None:
            return [self]
        if inter == self:
            return []
        if splitters is None:
            od = other.dbm
            sd = self.dbm
            splitters = [
                (i, j, od[i][j])
                for i in range(self.dim)
                for j in range(self.dim)
                if i != j and od[i][j][0] != INF and od[i][j] < sd[i][j]
            ]
        out = []
        cur: Optional[Zone] = self
        for i, j, b in splitters:
            if not b < cur.dbm[i][j]:
                continue
            piece = cur.constrain(j, i, bound_negate(b))
            if piece is not None:
                out.append(piece)
            cur = cur.constrain(i, j, b)
            if cur is None:
                break
        return out

    # points and text -----------------------------------------------------

    def sample(self) -> tuple:
        """Some point of the zone, preferring small and integral coordinates."""
        z: Zone = self
        values = []
        for i in range(1, self.dim):
            lo = z.dbm[0][i]
            hi = z.dbm[i][0]
            lo_v = -lo[0]
            if lo[1]:
                v = lo_v
            elif hi[0] == INF:
                v = math.floor(lo_v) + 1
            else:
                v = as_rational(Fraction(lo_v) + (Fraction(hi[0]) - Fraction(lo_v)) / 2)
                cand = math.floor(lo_v) + 1
                if cand < hi[0] or (cand == hi[0] and hi[1]):
                    v = cand
            v = as_rational(Fraction(v))
            nz = z.constrain(i, 0, (v, 1))
            nz = nz.constrain(0, i, (-v, 1)) if nz is not None else None
            assert nz is not None, "canonical zone must extend a partial point"
            z = nz
            values.append(v)
        return tuple(values)

    def constraint_list(self, names: Sequence[str]) -> list:
        """Non-trivial constraints as strings; diagonals only if not implied."""
        d = self.dbm
        n = self.dim
        out = []
        for i in range(1, n):
            lo, hi = d[0][i], d[i][0]
            name = names[i - 1]
            if hi[0] != INF and lo[1] and hi[1] and -lo[0] == hi[0]:
                out.append(f"{name}={_fmt(hi[0])}")
                continue
            if lo != LE_ZERO:
                out.append(f"{name}{'>=' if lo[1] else '>'}{_fmt(-lo[0])}")
            if hi[0] != INF:
                out.append(f"{name}{'<=' if hi[1] else '<'}{_fmt(hi[0])}")
        for i in range(1, n):
            for j in range(i + 1, n):
                diff = f"{names[i - 1]}-{names[j - 1]}"
                hi, lo = d[i][j], d[j][i]
                hi_tight = hi[0] != INF and hi < bound_add(d[i][0], d[0][j])
                lo_tight = lo[0] != INF and lo < bound_add(d[j][0], d[0][i])
                if hi_tight and lo_tight and hi[1] and lo[1] and hi[0] == -lo[0]:
                    out.append(f"{diff}={_fmt(hi[0])}")
                    continue
                if lo_tight:
                    out.append(f"{diff}{'>=' if lo[1] else '>'}{_fmt(-lo[0])}")
                if hi_tight:
                    out.append(f"{diff}{'<=' if hi[1] else '<'}{_fmt(hi[0])}")
        return out

    def to_text(self, names: Optional[Sequence[str]] = None) -> str:
        if names is None:
            names = [f"x{i}" for i in range(1, self.dim)]
        parts = self.constraint_list(names)
        return " && ".join(parts) if parts else "true"


def _fmt(v) -> str:
    return str(as_rational(v))


def intersect_guard(zone: Zone, atoms: Iterable) -> Optional[Zone]:
    """Intersect with a conjunction of ``(clock_index, op, constant)`` atoms."""
    return zone.constrain_all(atom_constraints(atoms))


def atom_constraints(atoms: Iterable) -> list:
    out = []
    for x, op, c in atoms:
        if op == "<":
            out.append((x, 0, (c, 0)))
        elif op == "<=":
            out.append((x, 0, (c, 1)))
        elif op == "=":
            out.append((x, 0, (c, 1)))
            out.append((0, x, (-c, 1)))
        elif op == ">=":
            out.append((0, x, (-c, 1)))
        elif op == ">":
            out.append((0, x, (-c, 0)))
        else:
            raise ValueError(f"unknown comparison operator {op!r}")
    return out


def up(z: Zone) -> Zone:
    return z.up()


def down(z: Zone) -> Zone:
    return z.down()


def reset(z: Zone, clocks: Iterable[int]) -> Zone:
    return z.reset(clocks)


def free(z: Zone, clocks: Iterable[int]) -> Zone:
    return z.free(clocks)


def extrapolate(z: Zone, max_consts: Sequence) -> Zone:
    return z.extrapolate(max_consts)


class Federation:
    """A finite union of zones over a fixed number of clocks."""

    __slots__ = ("zones", "clocks")

    def __init__(self, clocks: int, zones: Iterable[Zone] = ()):
        self.clocks = clocks
        zs = []
        for z in zones:
            if z is None:
                continue
            if z.dim != clocks + 1:
                raise ValueError("zone dimension does not match federation")
            zs.append(z)
        self.zones = tuple(zs)

    @classmethod
    def empty(cls, clocks: int) -> "Federation":
        return cls(clocks)

    @classmethod
    def universal(cls, clocks: int) -> "Federation":
        return cls(clocks, [Zone.universal(clocks)])

    def __iter__(self) -> Iterator[Zone]:
        return iter(self.zones)

    def __len__(self) -> int:
        return len(self.zones)

    def __bool__(self) -> bool:
        return bool(self.zones)

    def __repr__(self) -> str:
        return "Federation(" + " || ".join(z.to_text() for z in self.zones) + ")"

    def is_empty(self) -> bool:
        return not self.zones

    def contains(self, point: Sequence) -> bool:
        return any(z.contains(point) for z in self.zones)

    def covers_zone(self, zone: Zone) -> bool:
        if any(z.includes(zone) for z in self.zones):
            return True
        rest = [zone]
        for z in self.zones:
            nxt = []
            for r in rest:
                nxt.extend(r.subtract(z))
            rest = nxt
            if not rest:
                return True
        return False

    def includes(self, other: "Federation") -> bool:
        return all(self.covers_zone(z) for z in other.zones)

    def same_set(self, other: "Federation") -> bool:
        return self.includes(other) and other.includes(self)

    def union(self, other) -> "Federation":
        zones = other.zones if isinstance(other, Federation) else tuple(other)
        return Federation(self.clocks, self.zones + tuple(zones)).reduce()

    def add(self, zone: Zone) -> "Federation":
        """Union with one zone, dropping zones the new one absorbs."""
        if any(z.includes(zone) for z in self.zones):
            return self
        kept = [z for z in self.zones if not zone.includes(z)]
        kept.append(zone)
        return Federation(self.clocks, kept)

    def intersect(self, other) -> "Federation":
        if isinstance(other, Zone):
            other_zones = (other,)
        else:
            other_zones = other.zones
        out = []
        for a in self.zones:
            for b in other_zones:
                c = a.intersect(b)
                if c is not None:
                    out.append(c)
        return Federation(self.clocks, out).reduce()

    def subtract(self, other) -> "Federation":
        if isinstance(other, Zone):
            other_zones = (other,)
        else:
            other_zones = other.zones
        cur = list(self.zones)
        for b in other_zones:
            nxt = []
            for a in cur:
                nxt.extend(a.subtract(b))
            cur = nxt
            if not cur:
                break
        return Federation(self.clocks, cur).reduce()

    def complement(self) -> "Federation":
        return Federation.universal(self.clocks).subtract(self)

    def reduce(self) -> "Federation":
        """Pairwise absorption: drop zones included in a sibling."""
        zs = list(dict.fromkeys(self.zones))
        if len(zs) < 2:
            return Federation(self.clocks, zs)
        zs.sort(key=lambda z: -_zone_size_hint(z))
        kept: list = []
        for z in zs:
            if any(k.includes(z) for k in kept):
                continue
            kept = [k for k in kept if not z.includes(k)]
            kept.append(z)
        return Federation(self.clocks, kept)

    def map(self, fn) -> "Federation":
        return Federation(self.clocks, (fn(z) for z in self.zones)).reduce()

    def up(self) -> "Federation":
        return self.map(Zone.up)

    def down(self) -> "Federation":
        return self.map(Zone.down)

    def reset(self, clocks) -> "Federation":
        clocks = list(clocks)
        return self.map(lambda z: z.reset(clocks))

    def free(self, clocks) -> "Federation":
        clocks = list(clocks)
        return self.map(lambda z: z.free(clocks))


def _zone_size_hint(z: Zone) -> int:
    return sum(1 for row in z.dbm for b in row if b[0] == INF)


def subtract(a: Federation, b: Federation) -> Federation:
    return a.subtract(b)


def includes(a: Federation, b: Federation) -> bool:
    return a.includes(b)
