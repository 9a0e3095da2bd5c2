"""Command-line front end.

Exit status: 0 when the analysis ran (whatever the verdict), 1 on bad input,
2 when a resource guard stopped the search.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

from . import fixtures
from .automaton import (
    Automaton,
    InvalidAutomaton,
    NotComplete,
    NotDeterministic,
    buchi_to_muller,
    check_deterministic,
    complement_dtma,
    complete_with_sink,
    to_dot,
)
from .horizons import rational_json, step_horizon, time_horizon, wait_delay
from .langstates import nonempty_states, region_nonempty_oracle
from .limits import Limits, ResourceLimitExceeded
from .mitl import FragmentUnsupported, MitlSyntaxError, UnknownAtom, compile_fragment, parse_mitl
from .monitor import (
    MonitorSession,
    MonitorSpec,
    Observation,
    TraceError,
    format_rational,
    parse_time,
    parse_trace,
    parse_trace_line,
    session_step,
)
from .monitorability import OPEN_FOR_PAIRS, explain, strong_monitorable, weak_monitorable

EXIT_OK = 0
EXIT_INPUT = 1
EXIT_GUARD = 2


class InputError(ValueError):
    pass


@dataclass
class RunConfig:
    command: str
    spec_file: Optional[str] = None
    formula: Optional[str] = None
    alphabet: Optional[list] = None
    fixture: Optional[str] = None
    complement_file: Optional[str] = None
    trace_file: Optional[str] = None
    stream: bool = False
    at: Optional[str] = None
    output: str = "human"
    limits: Limits = field(default_factory=Limits.from_env)
    options: dict = field(default_factory=dict)


# ---------------------------------------------------------------------------
# argument parsing


def _add_spec_args(p: argparse.ArgumentParser, complement: bool = True) -> None:
    g = p.add_argument_group("specification (exactly one)")
    g.add_argument("--spec", dest="spec_file", metavar="FILE", help="automaton JSON file")
    g.add_argument("--formula", help="formula in the supported fragment")
    g.add_argument("--fixture", choices=fixtures.names(), help="shipped reference automaton")
    p.add_argument("--alphabet", help="comma-separated letters (required with --formula)")
    if complement:
        p.add_argument("--complement", dest="complement_file", metavar="FILE",
                       help="automaton for the complement property (TBA pair input)")


def _add_obs_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--obs", dest="trace_file", metavar="TRACE", help="trace file with the observation")
    p.add_argument("--at", help="observation time (defaults to the trace's last time)")


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--json", dest="output", action="store_const", const="json", default="human",
                   help="machine-readable output")
    p.add_argument("--max-zones", type=int, help="zone guard (default from TIMEDMON_MAX_ZONES or 100000)")
    p.add_argument("--max-sequences", type=int,
                   help="letter-sequence guard (default from TIMEDMON_MAX_SEQUENCES or 4096)")


class _ArgumentParser(argparse.ArgumentParser):
    """Usage errors are input errors (status 1); status 2 is the resource guard."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INPUT, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    parser = _ArgumentParser(prog="timedmon", description="Monitoring and monitorability of timed properties.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("compile-mitl", help="compile a formula to a deterministic Muller automaton")
    p.add_argument("formula_text", metavar="FORMULA")
    p.add_argument("--alphabet", required=True)
    p.add_argument("--negate", action="store_true", help="emit the complement automaton instead")
    p.add_argument("--dot", action="store_true", help="emit Graphviz DOT instead of JSON")
    _add_common(p)

    p = sub.add_parser("complement", help="complete and complement a deterministic automaton")
    _add_spec_args(p, complement=False)
    p.add_argument("--dot", action="store_true")
    _add_common(p)

    p = sub.add_parser("nonempty", help="states with a non-empty accepted language")
    _add_spec_args(p, complement=False)
    p.add_argument("--oracle", action="store_true", help="use the region-graph oracle")
    _add_common(p)

    p = sub.add_parser("monitor", help="three-valued verdicts for a trace")
    _add_spec_args(p)
    p.add_argument("--trace", dest="trace_file", metavar="TRACE")
    p.add_argument("--stream", action="store_true", help="read trace lines from standard input")
    _add_common(p)

    p = sub.add_parser("monitorability", help="weak or strong monitorability of a deterministic spec")
    p.add_argument("--mode", choices=("weak", "strong"), required=True)
    _add_spec_args(p)
    _add_obs_args(p)
    p.add_argument("--explain", action="store_true", help="print the membership facts as JSON")
    _add_common(p)

    p = sub.add_parser("horizon", help="step, time or wait horizons")
    p.add_argument("kind", choices=("steps", "time", "wait"))
    _add_spec_args(p, complement=False)
    _add_obs_args(p)
    _add_common(p)
    return parser


def config_from_args(args: argparse.Namespace) -> RunConfig:
    limits = Limits.from_env()
    if getattr(args, "max_zones", None):
        limits = Limits(args.max_zones, limits.max_sequences)
    if getattr(args, "max_sequences", None):
        limits = Limits(limits.max_zones, args.max_sequences)
    alphabet = getattr(args, "alphabet", None)
    cfg = RunConfig(
        command=args.command,
        spec_file=getattr(args, "spec_file", None),
        formula=getattr(args, "formula", None) or getattr(args, "formula_text", None),
        alphabet=[s.strip() for s in alphabet.split(",") if s.strip()] if alphabet else None,
        fixture=getattr(args, "fixture", None),
        complement_file=getattr(args, "complement_file", None),
        trace_file=getattr(args, "trace_file", None),
        stream=getattr(args, "stream", False),
        at=getattr(args, "at", None),
        output=args.output,
        limits=limits,
    )
    for name in ("mode", "explain", "kind", "oracle", "dot", "negate"):
        if hasattr(args, name):
            cfg.options[name] = getattr(args, name)
    return cfg


# ---------------------------------------------------------------------------
# inputs


def load_automaton(cfg: RunConfig) -> Automaton:
    sources = [s for s in (cfg.spec_file, cfg.formula, cfg.fixture) if s]
    if len(sources) != 1:
        raise InputError("give exactly one of --spec, --formula, --fixture")
    if cfg.spec_file:
        try:
            return Automaton.load(cfg.spec_file)
        except OSError as exc:
            raise InputError(f"cannot read {cfg.spec_file}: {exc.strerror}") from None
    if cfg.fixture:
        return fixtures.load(cfg.fixture)
    if not cfg.alphabet:
        raise InputError("--formula needs --alphabet")
    return compile_fragment(parse_mitl(cfg.formula, cfg.alphabet), cfg.alphabet)


def load_spec(cfg: RunConfig) -> MonitorSpec:
    a = load_automaton(cfg)
    if cfg.complement_file:
        try:
            neg = Automaton.load(cfg.complement_file)
        except OSError as exc:
            raise InputError(f"cannot read {cfg.complement_file}: {exc.strerror}") from None
        return MonitorSpec.from_pair(a, neg)
    ok, _ = check_deterministic(a)
    if not ok:
        raise InputError(
            "nondeterministic automaton: verdicts need an automaton for the complement "
            "too (pass --complement FILE)"
        )
    return MonitorSpec.from_dtma(a)


def load_observation(cfg: RunConfig) -> Observation:
    if cfg.trace_file:
        try:
            text = Path(cfg.trace_file).read_text()
        except OSError as exc:
            raise InputError(f"cannot read {cfg.trace_file}: {exc.strerror}") from None
        obs = parse_trace(text)
    else:
        obs = Observation()
    if cfg.at is not None:
        at = parse_time(cfg.at)
        if at < obs.word.duration:
            raise InputError("--at precedes the last event of the trace")
        obs = Observation(obs.word, at)
    return obs


# ---------------------------------------------------------------------------
# commands


def _rational_human(x) -> str:
    if x == float("inf"):
        return "inf"
    return format_rational(x)


def cmd_compile(cfg: RunConfig, out) -> None:
    a = compile_fragment(parse_mitl(cfg.formula, cfg.alphabet), cfg.alphabet)
    if cfg.options.get("negate"):
        a = complement_dtma(a)
        a = a.replace(acceptance=a.acceptance.materialize())
    out.write((to_dot(a) if cfg.options.get("dot") else a.to_json()) + "\n")


def cmd_complement(cfg: RunConfig, out) -> None:
    a = load_automaton(cfg)
    ok, witness = check_deterministic(a)
    if not ok:
        raise NotDeterministic(f"only deterministic automata can be complemented here ({witness.reason})")
    a = complete_with_sink(a)
    if a.is_buchi:
        a = buchi_to_muller(a)
    c = complement_dtma(a)
    c = c.replace(acceptance=c.acceptance.materialize())
    out.write((to_dot(c) if cfg.options.get("dot") else c.to_json()) + "\n")


def cmd_nonempty(cfg: RunConfig, out) -> None:
    a = load_automaton(cfg)
    ne = region_nonempty_oracle(a) if cfg.options.get("oracle") else nonempty_states(a, cfg.limits)
    data = ne.to_json(a.clocks, a.locations)
    if cfg.output == "json":
        out.write(json.dumps(data) + "\n")
    else:
        for loc in a.locations:
            zones = data.get(loc)
            out.write(f"{loc}: {' || '.join(zones) if zones else 'none'}\n")


def _describe(item) -> str:
    if item[0] == "event":
        return f"event {item[1]} {format_rational(item[2])}"
    return f"tick {format_rational(item[1])}"


def cmd_monitor(cfg: RunConfig, out) -> None:
    spec = load_spec(cfg)
    session = MonitorSession(spec)
    if cfg.stream:
        lines = iter(sys.stdin.readline, "")
    elif cfg.trace_file:
        try:
            lines = Path(cfg.trace_file).read_text().splitlines()
        except OSError as exc:
            raise InputError(f"cannot read {cfg.trace_file}: {exc.strerror}") from None
    else:
        raise InputError("give --trace FILE or --stream")
    for lineno, line in enumerate(lines, 1):
        item = parse_trace_line(line, lineno)
        if item is None:
            continue
        try:
            v = session_step(session, item)
        except ValueError as exc:
            raise TraceError(f"line {lineno}: {exc}") from None
        if cfg.output == "json":
            out.write(json.dumps({"input": _describe(item), "verdict": v.value}) + "\n")
        else:
            out.write(v.value + "\n")
        out.flush()


def cmd_monitorability(cfg: RunConfig, out) -> None:
    if cfg.complement_file:
        raise InputError(OPEN_FOR_PAIRS)
    a = load_automaton(cfg)
    obs = load_observation(cfg)
    mode = cfg.options["mode"]
    if cfg.options.get("explain"):
        out.write(json.dumps(explain(a, obs, mode), indent=2) + "\n")
        return
    result = weak_monitorable(a, obs) if mode == "weak" else strong_monitorable(a, obs)
    out.write(("true" if result else "false") + "\n")


def cmd_horizon(cfg: RunConfig, out) -> None:
    a = load_automaton(cfg)
    obs = load_observation(cfg)
    kind = cfg.options["kind"]
    if kind == "steps":
        h = step_horizon(a, obs, cfg.limits)
        if cfg.output == "json":
            out.write(json.dumps(h.to_json()) + "\n")
        else:
            for side, n, w in (("top", h.n_top, h.witness_top), ("bot", h.n_bot, h.witness_bot)):
                extra = f"  e.g. {w}" if w is not None and n else ""
                out.write(f"n_{side} = {'inf' if n == float('inf') else n}{extra}\n")
        return
    if kind == "time":
        r = time_horizon(a, obs, cfg.limits)
        if cfg.output == "json":
            out.write(json.dumps(r.to_json()) + "\n")
        elif r.verdict.conclusive:
            out.write(r.verdict.value + "\n")
        else:
            for name, d in (("v_plus", r.v_plus), ("v_minus", r.v_minus)):
                how = "" if not d.finite else (" (attained)" if d.attained else " (approached)")
                out.write(f"{name} = {_rational_human(d.value)}{how}\n")
        return
    d = wait_delay(a, obs, cfg.limits)
    if cfg.output == "json":
        out.write(json.dumps({"delay": rational_json(d.value), "attained": d.attained}) + "\n")
    else:
        how = "" if not d.finite else (" (attained)" if d.attained else " (approached)")
        out.write(f"delay = {_rational_human(d.value)}{how}\n")


COMMANDS = {
    "compile-mitl": cmd_compile,
    "complement": cmd_complement,
    "nonempty": cmd_nonempty,
    "monitor": cmd_monitor,
    "monitorability": cmd_monitorability,
    "horizon": cmd_horizon,
}


def run(cfg: RunConfig, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    try:
        COMMANDS[cfg.command](cfg, out)
    except ResourceLimitExceeded as exc:
        err.write(f"error: resource guard: {exc}\n")
        return EXIT_GUARD
    except (InputError, TraceError, InvalidAutomaton, NotDeterministic, NotComplete,
            FragmentUnsupported, MitlSyntaxError, UnknownAtom, KeyError, ValueError) as exc:
        msg = exc.args[0] if isinstance(exc, KeyError) and exc.args else exc
        err.write(f"error: {msg}\n")
        return EXIT_INPUT
    return EXIT_OK


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    return run(config_from_args(args))


if __name__ == "__main__":
    sys.exit(main())
