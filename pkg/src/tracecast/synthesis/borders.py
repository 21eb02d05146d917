"""Border words, macrocells and the macro-evolution used to simulate a CA on
k-blocks by a CA on single letters.

A macrocell is a block of B (length k) followed by a border word of Upsilon
(length l); macrocells have length h = k + l.  Theta holds the 2h-words that
start with a macrocell and contain no other macrocell starting at offsets
1..h-1.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Sequence

from ..shiftlang import Alphabet, BlockAlphabet, Word, rotate, rotations
from ..tracecheck import PhiMap
from .twosft import SynthesisError


def is_freezing(words: Iterable[Sequence], k: int) -> bool:
    """No word overlaps another (or itself) shifted by 1..k positions."""
    words = {tuple(w) for w in words}
    lengths = {len(w) for w in words}
    if len(lengths) > 1:
        raise ValueError("freezingness needs words of one length")
    if not words:
        return True
    size = lengths.pop()
    if k >= size:
        # a shift by the full length or more never clashes
        return False
    prefixes = {}
    for w in words:
        for i in range(1, k + 1):
            prefixes.setdefault(i, set()).add(w[: size - i])
    return not any(w[i:] in prefixes[i] for w in words for i in range(1, k + 1))


@dataclass(frozen=True)
class BorderSystem:
    alphabet: Alphabet
    k: int
    blocks: BlockAlphabet
    w: Word
    phi: PhiMap
    upsilon: tuple  # border words in construction order

    @property
    def l(self) -> int:  # noqa: E743
        return self.k + 6 * len(self.w)

    @property
    def h(self) -> int:
        return self.k + self.l

    @property
    def freeze_depth(self) -> int:
        return self.k + 3 * len(self.w)

    @property
    def orbit(self) -> list[Word]:
        return rotations(self.w)

    @cached_property
    def _upsilon_set(self) -> frozenset:
        return frozenset(self.upsilon)

    @cached_property
    def _block_set(self) -> frozenset:
        return frozenset(self.blocks.blocks)

    @cached_property
    def step_table(self) -> dict:
        n = len(self.w)
        table = {}
        for b in self.upsilon:
            a, v = b[0], b[n : 2 * n]
            fa, gv = self.phi(a), rotate(v)
            table[b] = (fa,) * n + gv + gv[::-1] + (fa,) * self.freeze_depth
        return table

    def border(self, a, v: Word) -> Word:
        n = len(self.w)
        return (a,) * n + tuple(v) + tuple(v)[::-1] + (a,) * self.freeze_depth

    def is_border(self, word: Sequence) -> bool:
        return tuple(word) in self._upsilon_set

    def is_macrocell(self, word: Sequence) -> bool:
        word = tuple(word)
        return len(word) == self.h and word[: self.k] in self._block_set and word[self.k :] in self._upsilon_set


def make_borders(k: int, w: Sequence, phi: PhiMap, blocks: BlockAlphabet | Iterable | None = None) -> BorderSystem:
    alphabet = phi.alphabet
    w = alphabet.check_word(tuple(w))
    if k < 1:
        raise SynthesisError("block length must be at least 1")
    if not w:
        raise SynthesisError("the witness word must be nonempty")
    image = phi.image()
    if set(w) <= image:
        raise SynthesisError("the witness word uses only letters of phi(A)")
    if blocks is None:
        blocks = BlockAlphabet(alphabet, k, tuple(alphabet.blocks(k)))
    elif not isinstance(blocks, BlockAlphabet):
        blocks = BlockAlphabet(alphabet, k, tuple(blocks))
    if blocks.k != k:
        raise SynthesisError(f"blocks have length {blocks.k}, expected {k}")
    n = len(w)
    upsilon = []
    for a in alphabet:
        if a not in image:
            continue
        for v in rotations(w):
            upsilon.append((a,) * n + v + v[::-1] + (a,) * (k + 3 * n))
    bs = BorderSystem(alphabet, k, blocks, w, phi, tuple(upsilon))
    for b in bs.upsilon:
        if set(b[n : 2 * n]) <= image or set(b[2 * n : 3 * n]) <= image:
            raise AssertionError(f"border {b!r} has a zone inside phi(A)")
    if not is_freezing(bs.upsilon, bs.freeze_depth):
        raise AssertionError("border words are not freezing")
    return bs


def border_step(bs: BorderSystem, b: Sequence) -> Word:
    b = tuple(b)
    if b not in bs.step_table:
        raise SynthesisError(f"{b!r} is not a border word")
    return bs.step_table[b]


def theta_member(bs: BorderSystem, u: Sequence) -> bool:
    u = tuple(u)
    h = bs.h
    if len(u) != 2 * h:
        raise ValueError(f"expected a word of length {2 * h}, got {len(u)}")
    if not bs.is_macrocell(u[:h]):
        return False
    return not any(bs.is_macrocell(u[i : i + h]) for i in range(1, h))


def macro_delta(bs: BorderSystem, g, u: Sequence) -> Word:
    """One macro step for u in Theta A^h: simulate g with the right neighbor
    when it starts a Theta occurrence, otherwise with the cell itself."""
    u = tuple(u)
    h, k = bs.h, bs.k
    if len(u) != 3 * h:
        raise ValueError(f"expected a word of length {3 * h}, got {len(u)}")
    if not theta_member(bs, u[: 2 * h]):
        raise SynthesisError("the first 2h letters are not in Theta")
    block = u[:k]
    neighbor = u[h : h + k] if theta_member(bs, u[h:]) else block
    return tuple(g((block, neighbor))) + border_step(bs, u[k:h])
