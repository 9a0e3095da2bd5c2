"""Hand-written automata for a handful of reference properties.

Each name has a property automaton ``<name>.json`` and an automaton for its
complement ``<name>_neg.json``.
"""

from __future__ import annotations

from importlib import resources

from ..automaton import Automaton

FORMULAS = {
    "a10_nob20": "F[0,10] a & G[0,20] !b",
    "fa": "F>=0 a",
    "gfa": "G>=0 F>=0 a",
    "a_implies_gfa": "a -> G>=0 F>=0 a",
    "f2040b": "F[20,40] b",
}


def names() -> list:
    return list(FORMULAS)


def load(name: str, negated: bool = False) -> Automaton:
    if name not in FORMULAS:
        raise KeyError(f"unknown fixture {name!r}; choose from {', '.join(FORMULAS)}")
    filename = f"{name}_neg.json" if negated else f"{name}.json"
    text = resources.files(__package__).joinpath(filename).read_text()
    return Automaton.from_json(text)


def load_pair(name: str) -> tuple:
    return load(name), load(name, negated=True)
