"""From a sofic subshift with a large block set inside it to a 2-SFT witness
Gamma over block symbols with pi_0(Gamma) = pi(Gamma) = Sigma.

The steps: a clock of period 2n, an order-n SFT Psi that encodes every
sequence over B together with its time phase, the pull-back of a cover Gamma
through Psi's decoder, interleaving the factor map into the symbols, and a
higher-block recoding down to order 2.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product

from ..shiftlang import (
    Alphabet,
    BlockAlphabet,
    BlockMap,
    SoficGraph,
    Sft,
    equal,
    higher_block,
    image_graph,
    interleave_conjugate,
    project,
    project_all,
    rotate,
)
from ..shiftlang.graph import blocks_closed
from ..shiftlang.sft import as_graph
from .twosft import SynthesisError


@dataclass(frozen=True)
class ClockCode:
    n: int
    u: tuple
    v: tuple
    position: int  # where the chosen blocks first differ, before rotation
    ticks: tuple  # H(0), ..., H(2n-1), each of length 3n

    def tick_index(self, word) -> int:
        return self.ticks.index(tuple(word))

    def column(self, q: int, p: int, length: int) -> tuple:
        """Column p of the tick sequence H(q), H(q+1), ... (indices mod 2n)."""
        return tuple(self.ticks[(q + j) % (2 * self.n)][p] for j in range(length))


def clock(blocks: BlockAlphabet) -> ClockCode:
    """H(h) = gamma^h(u) gamma^h(uv) for the first two blocks, both rotated so
    that they differ at position 0."""
    if len(blocks) < 2:
        raise SynthesisError("a clock needs at least two blocks")
    n = blocks.k
    u0, v0 = blocks.blocks[0], blocks.blocks[1]
    p = next(i for i in range(n) if u0[i] != v0[i])
    u, v = rotate(u0, p), rotate(v0, p)
    uv = u + v
    ticks = tuple(rotate(u, h) + rotate(uv, h) for h in range(2 * n))
    if len(set(ticks)) != 2 * n:
        raise AssertionError("clock ticks are not pairwise distinct")
    return ClockCode(n, u, v, p, ticks)


def phase_windows(blocks: BlockAlphabet, s: int) -> set:
    """Length-n prefixes of sigma^s(B^omega): a suffix of one block followed by
    a prefix of the next."""
    return {b[s:] + c[:s] for b in blocks.blocks for c in blocks.blocks}


@dataclass(frozen=True)
class MultiEncoding:
    blocks: BlockAlphabet
    clock: ClockCode
    psi: Sft  # order n over symbols of 4n base letters
    decoder: BlockMap  # radius n-1 onto the block alphabet

    def encode(self, sequence, q: int = 0, length: int | None = None) -> tuple:
        """A time-q encoding whose decoding is the periodic block sequence
        ``sequence`` repeated; ``length`` symbols (default its length times n)."""
        n = self.blocks.k
        seq = [tuple(b) for b in sequence]
        length = len(seq) * n if length is None else length
        need = length + n
        cols = []
        for c in range(n):
            # column c carries y_j at positions j = first, first + n, ...
            first = (c - q) % n
            col = self.blocks.blocks[0][n - first:] if first else ()
            j = first
            while len(col) < need:
                col += seq[j % len(seq)]
                j += n
            cols.append(col)
        return tuple(
            tuple(col[j] for col in cols) + self.clock.ticks[(q + j) % (2 * n)] for j in range(length)
        )


def multi(blocks: BlockAlphabet) -> MultiEncoding:
    """The order-n SFT Psi over A^(4n) and its decoder onto B-sequences."""
    if len(blocks) < 2:
        raise SynthesisError("need at least two blocks")
    n = blocks.k
    ck = clock(blocks)
    windows = {s: sorted(phase_windows(blocks, s)) for s in range(n)}
    allowed = set()
    for q in range(2 * n):
        per_column = [windows[(q - p) % n] for p in range(n)]
        for cols in product(*per_column):
            allowed.add(tuple(
                tuple(c[j] for c in cols) + ck.ticks[(q + j) % (2 * n)] for j in range(n)
            ))
    letters = sorted({s for w in allowed for s in w})
    psi = Sft(Alphabet(tuple(letters)), n, frozenset(allowed))

    def decode(window):
        tick = ck.tick_index(window[0][n:])
        column = tick % n
        return tuple(window[j][column] for j in range(n))

    decoder = BlockMap.from_function(psi.alphabet, blocks.alphabet, n - 1, decode, domain=allowed)
    return MultiEncoding(blocks, ck, psi, decoder)


def pullback(enc: MultiEncoding, gamma: Sft) -> Sft:
    """Gamma' = Psi intersected with decoder^-1(Gamma), as one SFT."""
    n = enc.blocks.k
    order = max(n, n - 1 + gamma.order)
    allowed = set()
    for w in enc.psi.factors(order):
        if gamma.contains_word(enc.decoder.apply(w)):
            allowed.add(w)
    return Sft(enc.psi.alphabet, order, frozenset(allowed))


@dataclass(frozen=True)
class T1Witness:
    gamma: Sft  # order 2 over block symbols
    blocks: BlockAlphabet
    first_equal: bool  # pi_0(gamma) = Sigma
    all_equal: bool  # pi(gamma) = Sigma

    @property
    def valid(self) -> bool:
        return self.first_equal and self.all_equal


def t1_report(gamma, sigma: SoficGraph, base: Alphabet | None = None) -> tuple[bool, bool]:
    base = sigma.alphabet if base is None else base
    g = as_graph(gamma)
    return equal(project(g, 0, base), sigma), equal(project_all(g, base), sigma)


def t2_to_t1(sigma: SoficGraph, cover: Sft, factor_map: BlockMap) -> T1Witness:
    """Build a 2-SFT witness of T1 from a cover Gamma over a block alphabet B
    with B^omega inside Sigma and a factor map Gamma -> Sigma."""
    block_symbols = cover.alphabet.symbols
    lengths = {len(b) for b in block_symbols}
    if len(lengths) != 1:
        raise SynthesisError("cover symbols must be blocks of one length")
    blocks = BlockAlphabet(sigma.alphabet, lengths.pop(), tuple(block_symbols))
    if not blocks_closed(sigma, blocks.blocks):
        raise SynthesisError("cover invalid: B^omega is not inside the subshift")
    if not equal(image_graph(cover, factor_map), sigma):
        raise SynthesisError("cover invalid: the factor map does not map onto the subshift")
    enc = multi(blocks)
    lifted = pullback(enc, cover)
    n = blocks.k
    composed = factor_map.compose_after(enc.decoder, lifted.factors(n + factor_map.radius))
    conj = interleave_conjugate(lifted, composed)
    gamma2, ba = higher_block(conj)
    first, every = t1_report(gamma2, sigma)
    if not (first and every):
        raise SynthesisError(f"verification failed: pi_0 = Sigma is {first}, pi = Sigma is {every}")
    return T1Witness(gamma2, ba, first, every)


def edge_shift_cover(sigma: SoficGraph, blocks: BlockAlphabet) -> tuple[Sft, BlockMap]:
    """Recode the edge shift of Sigma's minimal automaton over the given blocks.

    Each automaton edge gets its own block (in edge order); two blocks may
    follow each other when their edges do.  The factor map reads the edge
    label.  Needs at least as many blocks as edges.
    """
    dfa = sigma.dfa
    edges = sorted(((s, sigma.alphabet.index(a), t) for (s, a), t in dfa.delta.items()))
    if len(blocks) < len(edges):
        raise SynthesisError(f"{len(edges)} edges need as many blocks, got {len(blocks)}")
    code = {e: blocks.blocks[i] for i, e in enumerate(edges)}
    used = Alphabet(tuple(code[e] for e in edges))
    allowed = {(code[e], code[f]) for e in edges for f in edges if e[2] == f[0]}
    gamma = Sft(used, 2, frozenset(allowed))
    labels = {code[e]: sigma.alphabet.symbols[e[1]] for e in edges}
    return gamma.essential(), BlockMap.letter_map(used, sigma.alphabet, labels)
