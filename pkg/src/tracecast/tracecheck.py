"""Decision procedures for the traceability conditions T0, T2 and T3.

Also the block-set extractor used by the T2 construction and the balance
test for local rules.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from itertools import product
from typing import Iterator, Mapping

import numpy as np

from .shiftlang import Alphabet, BlockAlphabet, SoficGraph, UPWord, Word, member_up
from .shiftlang.graph import blocks_closed, is_infinite, is_transitive, non_cycle_components
from .shiftlang.sft import as_graph
from .shiftlang.words import symbol_str


class AlphabetMismatchError(ValueError):
    """A declared letter never occurs in the subshift."""


@dataclass(frozen=True)
class PhiMap:
    """A total map A -> A, stored as the tuple of images in alphabet order."""

    alphabet: Alphabet
    images: tuple

    def __post_init__(self):
        images = tuple(self.images)
        if len(images) != len(self.alphabet):
            raise ValueError("a map needs exactly one image per letter")
        self.alphabet.check_word(images)
        object.__setattr__(self, "images", images)

    @classmethod
    def from_dict(cls, alphabet: Alphabet, mapping: Mapping) -> "PhiMap":
        return cls(alphabet, tuple(mapping[a] for a in alphabet))

    @classmethod
    def identity(cls, alphabet: Alphabet) -> "PhiMap":
        return cls(alphabet, alphabet.symbols)

    @classmethod
    def constant(cls, alphabet: Alphabet, value) -> "PhiMap":
        return cls(alphabet, (value,) * len(alphabet))

    def __call__(self, a):
        return self.images[self.alphabet.index(a)]

    def as_dict(self) -> dict:
        return dict(zip(self.alphabet.symbols, self.images))

    def image(self) -> set:
        return set(self.images)

    def then(self, other: "PhiMap") -> "PhiMap":
        """``other o self``."""
        return PhiMap(self.alphabet, tuple(other(b) for b in self.images))

    def __str__(self) -> str:
        return ", ".join(f"{symbol_str(a)}->{symbol_str(b)}" for a, b in zip(self.alphabet, self.images))


def orbit_word(phi: PhiMap, a) -> UPWord:
    """The sequence a, phi(a), phi(phi(a)), ... as an ultimately periodic word."""
    seq = [a]
    position = {a: 0}
    while True:
        nxt = phi(seq[-1])
        if nxt in position:
            start = position[nxt]
            return UPWord(tuple(seq[:start]), tuple(seq[start:]))
        position[nxt] = len(seq)
        seq.append(nxt)


def is_t0_map(s, phi: PhiMap) -> bool:
    g = as_graph(s)
    return all(member_up(g, orbit_word(phi, a)) for a in phi.alphabet)


def _require_all_letters(g: SoficGraph) -> None:
    missing = [a for a in g.alphabet if a not in g.letters()]
    if missing:
        raise AlphabetMismatchError(
            f"letters {' '.join(symbol_str(a) for a in missing)} are declared but never occur"
        )


def t0_maps(s) -> Iterator[PhiMap]:
    """All maps phi whose orbits lie in the subshift, in lexicographic order of
    the image tuples.  Images are restricted up front to letters b with ab in the
    language, which preserves the order."""
    g = as_graph(s)
    _require_all_letters(g)
    two = g.dfa
    choices = [[b for b in g.alphabet if two.accepts((a, b))] for a in g.alphabet]
    for images in product(*choices):
        phi = PhiMap(g.alphabet, images)
        if is_t0_map(g, phi):
            yield phi


def check_t0(s) -> PhiMap | None:
    return next(t0_maps(s), None)


class T3Status(enum.Enum):
    FOUND = "found"
    NOT_FOUND_UP_TO_BOUND = "not found up to bound"
    NOT_T0 = "not T0"


@dataclass(frozen=True)
class T3Witness:
    phi: PhiMap
    word: Word

    def __post_init__(self):
        if not self.word:
            raise ValueError("a witness word is nonempty")
        if set(self.word) <= self.phi.image():
            raise ValueError("a witness word needs a letter outside the image of phi")


@dataclass(frozen=True)
class T3Result:
    status: T3Status
    bound: int
    witness: T3Witness | None = None

    def __bool__(self) -> bool:
        return self.status is T3Status.FOUND


def default_t3_bound(s) -> int:
    return 2 * max(1, as_graph(s).dfa.n_states)


def check_t3(s, max_w_len: int | None = None) -> T3Result:
    """Bounded search for (phi, w) with phi a T0 map, w^omega in the subshift and
    some letter of w outside phi(A).  Maps are tried in lexicographic order and,
    for each, words by length then lexicographically."""
    g = as_graph(s)
    bound = default_t3_bound(g) if max_w_len is None else max_w_len
    if bound < 1:
        raise ValueError("the word length bound must be at least 1")
    found_map = False
    for phi in t0_maps(g):
        found_map = True
        outside = set(g.alphabet) - phi.image()
        if not outside:
            continue
        for n in range(1, bound + 1):
            for w in product(g.alphabet.symbols, repeat=n):
                if outside.isdisjoint(w):
                    continue
                if member_up(g, UPWord.periodic(w)):
                    return T3Result(T3Status.FOUND, bound, T3Witness(phi, w))
    status = T3Status.NOT_FOUND_UP_TO_BOUND if found_map else T3Status.NOT_T0
    return T3Result(status, bound)


@dataclass(frozen=True)
class T2Result:
    holds: bool
    component: tuple = ()  # states of the minimal automaton

    def __bool__(self) -> bool:
        return self.holds


def check_t2(s) -> T2Result:
    """T2 holds iff the minimal automaton has a strongly connected component that
    is not a single cycle.  Such a component presents an infinite transitive
    sofic subshift; conversely an infinite transitive subshift inside the
    language forces two different returns to one automaton state."""
    comps = non_cycle_components(as_graph(s))
    if not comps:
        return T2Result(False)
    return T2Result(True, tuple(comps[0]))


@dataclass(frozen=True)
class ChoixResult:
    state: int
    letters: tuple
    u: Word
    v: Word
    repeat: int
    blocks: BlockAlphabet


def _return_word(dfa, source: int, target: int, members: set) -> Word:
    """Shortest, then lexicographically least, word leading from source to
    target inside the component."""
    paths = {source: ()}
    frontier = [source]
    while target not in paths:
        nxt = []
        for s in frontier:
            for a, t in dfa.successors(s):
                if t in members and t not in paths:
                    paths[t] = paths[s] + (a,)
                    nxt.append(t)
        if not nxt:
            raise RuntimeError("state unreachable inside its component")
        frontier = nxt
    return paths[target]


def choix(s, n: int) -> ChoixResult:
    """Block set B of equal-length words with |B| >= n and B^omega inside the
    subshift, built from two different returns to one automaton state."""
    g = as_graph(s)
    if n < 2:
        raise ValueError("n must be at least 2")
    if not (is_transitive(g) and is_infinite(g)):
        raise ValueError("the subshift must be transitive and infinite")
    comps = non_cycle_components(g)
    if not comps:
        raise ValueError("no component with two different returns")
    dfa = g.dfa
    members = set(comps[0])
    for q in sorted(members):
        inside = [(a, t) for a, t in dfa.successors(q) if t in members]
        if len(inside) >= 2:
            break
    (a, qa), (b, qb) = inside[0], inside[1]
    au = (a,) + _return_word(dfa, qa, q, members)
    bv = (b,) + _return_word(dfa, qb, q, members)
    u = au * len(bv)
    v = bv * len(au)
    repeat = 1
    while 2**repeat < n:
        repeat += 1
    words = [sum(combo, ()) for combo in product((u, v), repeat=repeat)]
    ba = BlockAlphabet(g.alphabet, len(words[0]), tuple(words))
    if not blocks_closed(g, ba.blocks):
        raise RuntimeError("extracted blocks leave the subshift")
    return ChoixResult(q, (a, b), u, v, repeat, ba)


def balance_check(rule) -> bool:
    """Every symbol has exactly |A|^(d-1) preimages under the local rule."""
    table = rule.table_array()
    size = len(rule.alphabet)
    counts = np.bincount(table, minlength=size)
    return bool(np.all(counts == size ** (rule.diameter - 1)))
