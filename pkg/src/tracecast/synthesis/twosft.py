"""A onesided diameter-2 CA whose trace is a given 2-SFT."""

from __future__ import annotations

from ..ca import TableRule
from ..shiftlang import Alphabet, Sft


class SynthesisError(ValueError):
    pass


def successor_choice(g2: Sft) -> dict:
    """For each letter a, the least b (alphabet order) with ab allowed."""
    if g2.order != 2:
        raise SynthesisError(f"expected a 2-SFT, got order {g2.order}")
    choice = {}
    for a in g2.alphabet:
        for b in g2.alphabet:
            if (a, b) in g2.allowed:
                choice[a] = b
                break
        else:
            raise SynthesisError(f"letter {a!r} has no allowed successor")
    return choice


def trace_2sft(g2: Sft) -> TableRule:
    """f(x0, x1) = x1 when x0 x1 is allowed, otherwise the chosen successor of x0."""
    choice = successor_choice(g2)
    return TableRule.from_function(
        g2.alphabet, 0, 2, lambda w: w[1] if tuple(w) in g2.allowed else choice[w[0]]
    )


def block_recode(s: Sft) -> Sft:
    """The same SFT with every letter a renamed to the 1-block (a,)."""
    alphabet = Alphabet(tuple((a,) for a in s.alphabet))
    return Sft(alphabet, s.order, frozenset(tuple((a,) for a in w) for w in s.allowed))
