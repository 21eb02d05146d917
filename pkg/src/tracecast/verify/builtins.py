"""Named example rules."""

from __future__ import annotations

from ..ca import TableRule
from ..shiftlang import Alphabet

PARTICLE_TABLE = (
    ("rl?", "w"),
    ("?rl", "w"),
    ("r?l", "w"),
    ("?w?", "w"),
    ("?rw", "l"),
    ("wl?", "r"),
    ("r??", "r"),
    ("??l", "l"),
    ("???", "b"),
)

NON_T3_TABLE = (
    ("?000111", "1"),
    ("000111?", "0"),
    ("?001011", "0"),
    ("001011?", "1"),
)


def particle() -> TableRule:
    """Particles r and l bounce between walls w over background b."""
    return TableRule.from_patterns(Alphabet.of("brlw"), 1, 3, [(tuple(p), o) for p, o in PARTICLE_TABLE])


def non_t3() -> TableRule:
    return TableRule.from_patterns(Alphabet.of("01"), 3, 7, [(tuple(p), o) for p, o in NON_T3_TABLE])


def negation() -> TableRule:
    return TableRule.from_function(Alphabet.of("01"), 0, 2, lambda w: "1" if w[0] == "0" else "0")


def shift() -> TableRule:
    return TableRule.from_function(Alphabet.of("01"), 0, 2, lambda w: w[1])


def identity() -> TableRule:
    return TableRule.from_function(Alphabet.of("01"), 0, 1, lambda w: w[0])


BUILTINS = {
    "particle": particle,
    "non_t3": non_t3,
    "negation": negation,
    "shift": shift,
    "identity": identity,
}


def builtin(name: str) -> TableRule:
    try:
        return BUILTINS[name]()
    except KeyError:
        raise KeyError(f"unknown builtin {name!r}; choose from {', '.join(BUILTINS)}") from None
