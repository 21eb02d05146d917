"""Shifts of finite type, block alphabets and sliding block maps."""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from itertools import product
from typing import Callable, Iterable, Mapping

from .graph import SoficGraph, factors, union
from .words import Alphabet, Word, as_block, flatten


class EmptySubshiftError(ValueError):
    pass


@dataclass(frozen=True)
class Sft:
    """One-sided SFT of order ``order``: z is in the shift iff every factor of
    length ``order`` is in ``allowed``."""

    alphabet: Alphabet
    order: int
    allowed: frozenset

    def __post_init__(self):
        if self.order < 1:
            raise ValueError("order must be at least 1")
        allowed = frozenset(tuple(w) for w in self.allowed)
        for w in allowed:
            if len(w) != self.order:
                raise ValueError(f"allowed word {w!r} does not have length {self.order}")
            self.alphabet.check_word(w)
        object.__setattr__(self, "allowed", allowed)

    @classmethod
    def from_forbidden(cls, alphabet: Alphabet, forbidden: Iterable[Word], order: int | None = None) -> "Sft":
        """Build from forbidden words; shorter forbidden words forbid every
        ``order``-word containing them."""
        forbidden = [tuple(w) for w in forbidden]
        if order is None:
            order = max((len(w) for w in forbidden), default=1)
        allowed = set()
        for w in product(alphabet.symbols, repeat=order):
            if not any(_contains(w, f) for f in forbidden):
                allowed.add(w)
        return cls(alphabet, order, frozenset(allowed))

    @classmethod
    def full(cls, alphabet: Alphabet, order: int = 1) -> "Sft":
        return cls(alphabet, order, frozenset(product(alphabet.symbols, repeat=order)))

    @property
    def forbidden(self) -> set[Word]:
        return set(product(self.alphabet.symbols, repeat=self.order)) - self.allowed

    @cached_property
    def graph(self) -> SoficGraph:
        """Vertices are allowed blocks, an edge u -> v exists when v continues u,
        and it is labelled by the first letter of u.  A path of blocks spells the
        word made of its first letters, which is exactly the one-sided language."""
        by_prefix: dict = {}
        for v in self.allowed:
            by_prefix.setdefault(v[:-1], []).append(v)
        edges = [(u, u[0], v) for u in self.allowed for v in by_prefix.get(u[1:], ())]
        return SoficGraph.build(self.alphabet, edges)

    def essential(self) -> "Sft":
        """Drop allowed blocks that cannot be continued forever to the right."""
        g = self.graph
        if g.is_empty:
            return Sft(self.alphabet, self.order, frozenset())
        return Sft(self.alphabet, self.order, frozenset(factors(g, self.order)))

    def factors(self, n: int) -> set[Word]:
        return factors(self.graph, n)

    def contains_word(self, word: Word) -> bool:
        """Window check only (no extendability)."""
        k = self.order
        return all(tuple(word[i : i + k]) in self.allowed for i in range(len(word) - k + 1))

    @property
    def is_empty(self) -> bool:
        return self.graph.is_empty


def _contains(word: Word, pattern: Word) -> bool:
    n = len(pattern)
    return any(word[i : i + n] == pattern for i in range(len(word) - n + 1))


def as_graph(s) -> SoficGraph:
    return s.graph if isinstance(s, Sft) else s


@dataclass(frozen=True)
class BlockAlphabet:
    base: Alphabet
    k: int
    blocks: tuple

    def __post_init__(self):
        blocks = tuple(flatten(as_block(b)) for b in self.blocks)
        if len(set(blocks)) != len(blocks):
            raise ValueError("blocks must be pairwise distinct")
        for b in blocks:
            if len(b) != self.k:
                raise ValueError(f"block {b!r} does not have length {self.k}")
            self.base.check_word(b)
        object.__setattr__(self, "blocks", blocks)

    @property
    def alphabet(self) -> Alphabet:
        return Alphabet(self.blocks)

    def __len__(self) -> int:
        return len(self.blocks)


@dataclass(frozen=True)
class BlockMap:
    """Sliding block map: output j is ``table[x_j .. x_{j+radius}]``.

    The table may be partial; it only has to cover the windows that occur in
    the subshift the map is applied to.
    """

    source: Alphabet
    target: Alphabet
    radius: int
    table: Mapping

    @classmethod
    def from_function(cls, source: Alphabet, target: Alphabet, radius: int, func: Callable,
                      domain: Iterable[Word] | None = None) -> "BlockMap":
        if domain is None:
            domain = product(source.symbols, repeat=radius + 1)
        return cls(source, target, radius, {tuple(w): func(tuple(w)) for w in domain})

    @classmethod
    def letter_map(cls, source: Alphabet, target: Alphabet, mapping: Mapping) -> "BlockMap":
        return cls(source, target, 0, {(a,): mapping[a] for a in source})

    def __call__(self, window: Word):
        try:
            return self.table[tuple(window)]
        except KeyError:
            raise KeyError(f"block map undefined on window {window!r}") from None

    def apply(self, word: Word) -> Word:
        r = self.radius
        return tuple(self(word[j : j + r + 1]) for j in range(len(word) - r))

    def is_total(self) -> bool:
        return all(w in self.table for w in product(self.source.symbols, repeat=self.radius + 1))

    def compose_after(self, first: "BlockMap", domain: Iterable[Word]) -> "BlockMap":
        """``self o first`` on the given source windows of length
        ``first.radius + self.radius + 1``."""
        r = first.radius + self.radius
        table = {}
        for w in domain:
            w = tuple(w)
            if len(w) != r + 1:
                raise ValueError(f"window {w!r} does not have length {r + 1}")
            table[w] = self(first.apply(w))
        return BlockMap(first.source, self.target, r, table)


def image_graph(source: SoficGraph | Sft, phi: BlockMap) -> SoficGraph:
    """Presentation of phi(X).

    Vertices are walks of length ``radius`` in the presentation of X; stepping
    to the next walk emits phi of the radius+1 labels involved.
    """
    g = as_graph(source)
    r = phi.radius
    if r == 0:
        return g.relabel(lambda a: phi((a,)), phi.target)
    walks = [(v,) for v in g.vertices]
    for _ in range(r):
        walks = [w + (a, t) for w in walks for a, ts in g.successors[w[-1]].items() for t in ts]
    edges = []
    for w in walks:
        labels = w[1::2]
        for a, ts in g.successors[w[-1]].items():
            for t in ts:
                edges.append((w, phi(labels + (a,)), w[2:] + (a, t)))
    return SoficGraph.build(phi.target, edges)


def higher_block(s: Sft) -> tuple[Sft, BlockAlphabet]:
    """Recode an order-k SFT as a 2-SFT on its allowed k-blocks."""
    s = s.essential()
    if not s.allowed:
        raise EmptySubshiftError("higher_block of an empty subshift")
    blocks = sorted(s.allowed, key=s.alphabet.sort_key)
    flat = [flatten(b) for b in blocks]
    ba = BlockAlphabet(_base_alphabet(s.alphabet), len(flat[0]), tuple(flat))
    by_prefix: dict = {}
    for b, f in zip(blocks, flat):
        by_prefix.setdefault(b[:-1], []).append(f)
    pairs = set()
    for b, f in zip(blocks, flat):
        for g in by_prefix.get(b[1:], ()):
            pairs.add((f, g))
    return Sft(ba.alphabet, 2, frozenset(pairs)), ba


def _base_alphabet(alphabet: Alphabet) -> Alphabet:
    letters = []
    for sym in alphabet:
        for a in as_block(sym):
            if a not in letters:
                letters.append(a)
    return Alphabet(tuple(letters))


def project(g: SoficGraph | Sft, q: int, base: Alphabet | None = None) -> SoficGraph:
    """pi_q: keep letter q of every block symbol."""
    g = as_graph(g)
    if base is None:
        base = _base_alphabet(g.alphabet)
    width = {len(as_block(a)) for a in g.alphabet}
    if not all(0 <= q < w for w in width):
        raise ValueError(f"column {q} out of range for block length {sorted(width)}")
    return g.relabel(lambda a: as_block(a)[q], base)


def project_all(g: SoficGraph | Sft, base: Alphabet | None = None) -> SoficGraph:
    g = as_graph(g)
    if base is None:
        base = _base_alphabet(g.alphabet)
    width = min(len(as_block(a)) for a in g.alphabet)
    return union([project(g, q, base) for q in range(width)], base)


def interleave_conjugate(gamma: Sft, phi: BlockMap) -> Sft:
    """The SFT of sequences (a_j w_j) with (w_j) in gamma and (a_j) = phi(w).

    Symbols are flat tuples ``(a,) + w``, so column 0 of the result is the
    image phi(gamma).
    """
    gamma = gamma.essential()
    r = phi.radius
    order = max(gamma.order, r + 1)
    allowed = set()
    for w in gamma.factors(order + r):
        try:
            a = phi.apply(w)
        except KeyError as exc:
            raise ValueError(f"block map radius {r} exceeds the context available: {exc}") from None
        allowed.add(tuple((a[j],) + as_block(w[j]) for j in range(order)))
    if not allowed:
        raise EmptySubshiftError("interleaving an empty subshift")
    letters = sorted({s for w in allowed for s in w}, key=lambda s: tuple(map(str, s)))
    return Sft(Alphabet(tuple(letters)), order, frozenset(allowed))
