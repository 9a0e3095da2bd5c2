"""How many more events, or how much more time, a conclusive verdict needs."""

from __future__ import annotations

import heapq
import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence, Union

from .automaton import Automaton
from .langstates import nonempty_states, pre_step, successor
from .limits import Limits, current as current_limits
from .monitor import (
    MonitorSpec,
    Observation,
    TimedWord,
    Verdict,
    run_concrete,
    verdict,
)
from .monitorability import as_deterministic_spec, reach_state
from .states import StateSet
from .zones import INF, Federation, Zone, as_rational

INFINITY = math.inf


# ---------------------------------------------------------------------------
# step horizon


@dataclass(frozen=True)
class StepHorizon:
    n_top: Union[int, float]
    n_bot: Union[int, float]
    witness_top: Optional[TimedWord] = None
    witness_bot: Optional[TimedWord] = None

    def to_json(self) -> dict:
        def enc(n):
            return "inf" if n == INFINITY else int(n)

        return {"n_top": enc(self.n_top), "n_bot": enc(self.n_bot)}


def _layers(a: Automaton, target: StateSet, limits: Limits) -> list:
    """``layers[k]``: states whose next ``k`` events can end inside ``target``."""
    layers = [target]
    while True:
        nxt = layers[-1].union(pre_step(a, layers[-1]))
        limits.check_zones(nxt.zone_count(), "step horizon")
        if layers[-1].includes(nxt):
            return layers
        layers.append(nxt)


def _first_layer(layers: list, q: str, v: tuple):
    for k, layer in enumerate(layers):
        if layer.contains(q, v):
            return k
    return INFINITY


def _witness(a: Automaton, layers: list, q: str, v: tuple, now, n: int) -> TimedWord:
    """Events of a length-``n`` extension driving ``(q, v)`` at ``now`` into ``layers[0]``."""
    events = []
    t = as_rational(now)
    for k in range(n, 0, -1):
        goal = layers[k - 1]
        found = None
        for tr in a.outgoing[q]:
            for z in goal[tr.target]:
                # valuations just before ``tr`` that land in ``z``
                resets = a.reset_indices(tr)
                pre = z
                for x in resets:
                    pre = pre.constrain(x, 0, (0, 1)) if pre is not None else None
                if pre is None:
                    continue
                pre = pre.free(resets).constrain_all(a.guard_constraints(tr))
                if pre is None:
                    continue
                reachable = pre.intersect(Zone.point(v).up()) if a.dim else pre
                if reachable is None:
                    continue
                w = reachable.sample()
                d = (w[0] - v[0]) if a.dim else 0
                found = (tr, d, w)
                break
            if found:
                break
        assert found is not None, "layer membership guarantees a successor"
        tr, d, w = found
        t = t + d
        events.append((tr.label, t))
        resets = set(a.reset_indices(tr))
        v = tuple(0 if (i + 1) in resets else x for i, x in enumerate(w))
        q = tr.target
    return TimedWord(tuple(events))


def step_horizon(spec: Union[Automaton, MonitorSpec], obs: Observation = Observation(),
                 limits: Optional[Limits] = None) -> StepHorizon:
    """Fewest further events after which ⊤ (resp. ⊥) can be the verdict."""
    spec = as_deterministic_spec(spec)
    limits = limits or current_limits()
    a = spec.positive
    q, v = reach_state(spec, obs)
    result = {}
    for side, target in (("bot", spec.e_positive), ("top", spec.e_negative)):
        layers = _layers(a, target, limits)
        n = _first_layer(layers, q, v)
        wit = None if n == INFINITY else _witness(a, layers, q, v, obs.now, n)
        result[side] = (n, wit)
    return StepHorizon(result["top"][0], result["bot"][0], result["top"][1], result["bot"][1])


# ---------------------------------------------------------------------------
# bounded ⊥ for nondeterministic automata


@dataclass(frozen=True)
class PathConstraint:
    """A syntactic path read with event times ``τ_1..τ_n`` after the observation.

    ``zone`` is a difference-constraint set over the ``n`` event times (index
    0 is absolute time zero).  ``anchors[i]`` is the time of the last reset
    of clock ``i`` as ``(variable index, offset)``.
    """

    path: tuple
    zone: Zone
    anchors: tuple
    location: str

    def end_valuation(self, taus: Sequence) -> tuple:
        n = len(self.path)
        t_end = taus[n - 1] if n else 0
        vals = (0,) + tuple(taus)
        return tuple(t_end - (vals[p] + c) for p, c in self.anchors)


def _pull(constraints, anchors: Sequence, now_var: int) -> Optional[list]:
    """Translate clock constraints into event-time constraints.

    Clock ``i`` equals ``τ_now - (τ_{p_i} + c_i)``; index 0 uses anchor
    ``(now_var, 0)``.  ``None`` means the constraints are contradictory.
    """
    full = [(now_var, 0)] + list(anchors)
    out = []
    for i, j, b in constraints:
        if b[0] == INF:
            continue
        (pi, ci), (pj, cj) = full[i], full[j]
        value = b[0] - (cj - ci)
        if pi == pj:
            if value < 0 or (value == 0 and not b[1]):
                return None
            continue
        out.append((pj, pi, (value, b[1])))
    return out


def _dbm_constraints(z: Zone) -> list:
    return [
        (i, j, z.dbm[i][j])
        for i in range(z.dim)
        for j in range(z.dim)
        if i != j and z.dbm[i][j][0] != INF
    ]


def path_constraints(a: Automaton, starts, tau_m, t, letters: Sequence[str]) -> list:
    """Every path reading ``letters`` from concrete states at time ``tau_m``."""
    n = len(letters)
    base = Zone.universal(n)
    if n:
        base = base.constrain(0, 1, (-as_rational(t), 1))
        for k in range(1, n):
            base = base.constrain(k, k + 1, (0, 1)) if base is not None else None
    if base is None:
        return []
    out = []
    for q, v in starts:
        anchors = tuple((0, as_rational(tau_m) - x) for x in v)
        stack = [(q, anchors, base, ())]
        while stack:
            loc, anch, zone, path = stack.pop()
            k = len(path)
            if k == n:
                out.append(PathConstraint(path, zone, anch, loc))
                continue
            for tr in a.by_label.get((loc, letters[k]), ()):
                pulled = _pull(a.guard_constraints(tr), anch, k + 1)
                if pulled is None:
                    continue
                z = zone.constrain_all(pulled)
                if z is None:
                    continue
                resets = set(a.reset_indices(tr))
                new_anch = tuple((k + 1, 0) if (i + 1) in resets else an for i, an in enumerate(anch))
                stack.append((tr.target, new_anch, z, path + (tr,)))
    return out


def bounded_bot_witness(a: Automaton, obs: Observation, n: int, ne: Optional[StateSet] = None,
                        limits: Optional[Limits] = None) -> Optional[TimedWord]:
    """An extension of exactly ``n`` events forcing ⊥, or None."""
    limits = limits or current_limits()
    ne = nonempty_states(a) if ne is None else ne
    if n == 0:
        now_states = run_concrete(a, obs.word, obs.now)
        return TimedWord() if not any(ne.contains(q, v) for q, v in now_states) else None
    limits.check_sequences(len(a.alphabet) ** n)
    starts = run_concrete(a, obs.word)
    tau_m = obs.word.duration
    for letters in itertools.product(a.alphabet, repeat=n):
        paths = path_constraints(a, starts, tau_m, obs.now, letters)
        base = Zone.universal(n).constrain(0, 1, (-obs.now, 1))
        for k in range(1, n):
            base = base.constrain(k, k + 1, (0, 1))
        bad = []
        for pc in paths:
            for z in ne[pc.location]:
                pulled = _pull(_dbm_constraints(z), pc.anchors, n)
                if pulled is None:
                    continue
                piece = pc.zone.constrain_all(pulled)
                if piece is not None:
                    bad.append(piece)
        limits.check_zones(len(bad), "bounded ⊥ search")
        good = Federation(n, [base]).subtract(Federation(n, bad))
        if good:
            taus = good.zones[0].sample()
            return TimedWord(tuple(zip(letters, taus)))
    return None


def bounded_bot_ntba(a: Union[Automaton, MonitorSpec], obs: Observation, n: int,
                     ne: Optional[StateSet] = None, limits: Optional[Limits] = None) -> bool:
    """Whether some extension with at most ``n`` events forces ⊥."""
    if isinstance(a, MonitorSpec):
        ne = a.ne_positive if ne is None else ne
        a = a.positive
    return bounded_bot_witness(a, obs, n, ne, limits) is not None


# ---------------------------------------------------------------------------
# time horizon


def rational_json(x) -> str:
    """``p/q`` text (plain integer when whole), or ``inf``."""
    return "inf" if x == INFINITY else str(Fraction(x))


@dataclass(frozen=True)
class Delay:
    """An infimum of elapsed time; ``attained`` tells whether it is a minimum."""

    value: Union[int, Fraction, float]
    attained: bool

    @property
    def finite(self) -> bool:
        return self.value != INFINITY

    def key(self):
        return (self.value, 0 if self.attained else 1)


NEVER = Delay(INFINITY, False)


@dataclass(frozen=True)
class RefinedVerdict:
    verdict: Verdict
    v_plus: Delay = NEVER
    v_minus: Delay = NEVER

    def to_json(self) -> dict:
        if self.verdict.conclusive:
            return {"verdict": self.verdict.value}

        return {
            "v_plus": rational_json(self.v_plus.value),
            "v_minus": rational_json(self.v_minus.value),
            "attained_plus": self.v_plus.attained,
            "attained_minus": self.v_minus.attained,
        }


def _lift(z: Zone) -> Zone:
    """Add a free, unconstrained last clock."""
    n = z.dim
    rows = []
    for i in range(n):
        rows.append(z.dbm[i] + ((INF, 1),))
    last = tuple((INF, 1) for _ in range(n)) + ((0, 1),)
    rows = [list(r) for r in rows] + [list(last)]
    rows[0][n] = (0, 1)
    return Zone.from_matrix(rows)


def _z_lower(z: Zone) -> Delay:
    value, attained = z.lower(z.dim - 1)
    return Delay(as_rational(value), attained)


def _region_bound(a: Automaton) -> int:
    consts = a.max_constants[1:]
    per_clock = 1
    for c in consts:
        per_clock *= 2 * c + 2
    n = len(consts)
    return len(a.locations) * per_clock * math.factorial(n) * (2**n)


def _min_time(a: Automaton, q: str, v: tuple, target: StateSet, limits: Limits,
              transitions: bool = True) -> Delay:
    """Infimum elapsed time from ``(q, v)`` until the state lies in ``target``."""
    nclk = a.dim
    lifted = {loc: [_lift(z) for z in fed] for loc, fed in target.items()}
    caps = tuple(a.max_constants) + (INF,)
    # only the least cost per valuation matters, so zones stay upward closed in z
    start = Zone.point(tuple(v) + (0,)).release_upper(nclk + 1)
    horizon = (_region_bound(a) + 1) * (a.max_constant + 1)
    best = NEVER
    counter = itertools.count()
    heap = [((0, 0), next(counter), q, start)]
    visited: dict = {}
    expanded = 0
    while heap:
        key, _, loc, z = heapq.heappop(heap)
        if best.finite and key >= best.key():
            break
        if key[0] > horizon:
            break
        covered = visited.setdefault(loc, [])
        if any(c.includes(z) for c in covered):
            continue
        covered[:] = [c for c in covered if not z.includes(c)]
        covered.append(z)
        expanded += 1
        limits.check_zones(expanded, "time horizon search")
        delayed = z.up()
        for tz in lifted.get(loc, ()):
            hit = delayed.intersect(tz)
            if hit is not None:
                cand = _z_lower(hit)
                if cand.key() < best.key():
                    best = cand
        if not transitions:
            continue
        for tr in a.outgoing[loc]:
            nz = successor(a, z, tr, extrapolate=False)
            if nz is None:
                continue
            nz = nz.release_upper(nclk + 1).extrapolate(caps)
            heapq.heappush(heap, (_z_lower(nz).key(), next(counter), tr.target, nz))
    return best


def time_horizon(spec: Union[Automaton, MonitorSpec], obs: Observation = Observation(),
                 limits: Optional[Limits] = None) -> RefinedVerdict:
    """Least elapsed time before ⊤ (``v_plus``) or ⊥ (``v_minus``) can be reached."""
    spec = as_deterministic_spec(spec)
    limits = limits or current_limits()
    v = verdict(spec, obs)
    if v.conclusive:
        return RefinedVerdict(v)
    q, val = reach_state(spec, obs)
    a = spec.positive
    plus = _min_time(a, q, val, spec.e_negative, limits)
    minus = _min_time(a, q, val, spec.e_positive, limits)
    return RefinedVerdict(Verdict.UNKNOWN, plus, minus)


def wait_delay(spec: Union[Automaton, MonitorSpec], obs: Observation = Observation(),
               limits: Optional[Limits] = None) -> Delay:
    """Least delay without further events after which the verdict is conclusive."""
    spec = as_deterministic_spec(spec)
    limits = limits or current_limits()
    if verdict(spec, obs).conclusive:
        return Delay(0, True)
    q, val = reach_state(spec, obs)
    target = spec.e_positive.union(spec.e_negative)
    return _min_time(spec.positive, q, val, target, limits, transitions=False)
