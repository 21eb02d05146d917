"""The single-letter CA simulating a onesided diameter-2 rule on k-blocks.

Cell c looks for a Theta occurrence starting at c - i for some i in [0, h).
If there is one (it is unique because Theta is (h-1)-freezing), the cell
outputs letter i of the macro step of the 3h-word starting there; otherwise it
applies phi to its own state.  The macro step looks at the neighbor's Theta
status, which needs the 2h letters after the neighbor's start, so the window
spans [c - (h-1), c + 3h - 1]: anchor h-1 and diameter 4h-1.

Tables of size |A|^(4h-1) are out of reach, so the rule is evaluated
directly: ``__call__`` is the literal definition, ``image_indices`` a
vectorized equivalent on index arrays.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from ..ca import LocalRule, RuleError, TableRule, window_codes
from ..shiftlang import SoficGraph, Sft, UPWord, Word, equal, member_up, project, project_all
from ..shiftlang.words import symbol_str, word_str
from ..tracecheck import T3Witness, is_t0_map
from .borders import BorderSystem, border_step, macro_delta, make_borders, theta_member
from .twosft import SynthesisError, trace_2sft


def _lookup(sorted_codes: np.ndarray, positions: np.ndarray, codes: np.ndarray):
    """Membership of ``codes`` in ``sorted_codes`` and the attached positions."""
    idx = np.searchsorted(sorted_codes, codes)
    idx = np.minimum(idx, len(sorted_codes) - 1)
    found = sorted_codes[idx] == codes
    return found, positions[idx]


def _codes_of(words, alphabet, base: int) -> np.ndarray:
    out = []
    for word in words:
        c = 0
        for s in word:
            c = c * base + alphabet.index(s)
        out.append(c)
    return np.asarray(out, dtype=np.int64)


class MacrocellRule(LocalRule):
    def __init__(self, borders: BorderSystem, inner: TableRule):
        self.borders = borders
        self.inner = inner
        self.alphabet = borders.alphabet
        h, k, l = borders.h, borders.k, borders.l
        self.anchor = h - 1
        self.diameter = 4 * h - 1
        base = len(self.alphabet)
        if l * np.log2(max(base, 2)) > 62:
            raise RuleError("border words too long for integer window codes")
        missing = [b for b in borders.blocks.blocks if b not in inner.alphabet]
        if missing:
            raise RuleError(f"inner rule does not know blocks {missing!r}")
        if inner.anchor != 0 or inner.diameter != 2:
            raise RuleError("inner rule must have anchor 0 and diameter 2")

        blocks = borders.blocks.blocks
        codes = _codes_of(blocks, self.alphabet, base)
        order = np.argsort(codes)
        self._block_codes = codes[order]
        self._block_pos = order.astype(np.int64)
        # inner outputs as letter indices, for every pair of blocks of B
        out = np.empty((len(blocks), len(blocks), k), dtype=np.int16)
        for i, b in enumerate(blocks):
            for j, c in enumerate(blocks):
                out[i, j] = self.alphabet.encode(inner((b, c)))
        self._inner_out = out

        ups = borders.upsilon
        codes = _codes_of(ups, self.alphabet, base)
        order = np.argsort(codes)
        self._border_codes = codes[order]
        self._border_pos = order.astype(np.int64)
        self._border_image = np.array(
            [self.alphabet.encode(border_step(borders, b)) for b in ups], dtype=np.int16
        ).reshape(len(ups), l)
        self._phi = np.array(self.alphabet.encode(borders.phi.images), dtype=np.int16)

    # -- the literal definition ---------------------------------------------

    def theta_offset(self, window: Sequence) -> int | None:
        """The i in [0, h) with a Theta occurrence at offset anchor - i."""
        h, m = self.borders.h, self.anchor
        hits = [i for i in range(h) if theta_member(self.borders, window[m - i : m - i + 2 * h])]
        if len(hits) > 1:
            raise AssertionError(f"two Theta occurrences in one window: offsets {hits}")
        return hits[0] if hits else None

    def __call__(self, window: Sequence):
        window = tuple(window)
        if len(window) != self.diameter:
            raise RuleError(f"window has length {len(window)}, diameter is {self.diameter}")
        i = self.theta_offset(window)
        m, h = self.anchor, self.borders.h
        if i is None:
            return self.borders.phi(window[m])
        return macro_delta(self.borders, self.inner, window[m - i : m - i + 3 * h])[i]

    # -- vectorized ---------------------------------------------------------

    def macrocell_mask(self, arr: np.ndarray):
        """Per start position p (up to len - h): is arr[p, p+h) a macrocell,
        with the block and border positions in B and Upsilon."""
        base = len(self.alphabet)
        k, l, h = self.borders.k, self.borders.l, self.borders.h
        span = arr.shape[-1] - h + 1
        kc = window_codes(arr[..., : span + k - 1], k, base)
        bc = window_codes(arr[..., k:], l, base)
        in_b, b_pos = _lookup(self._block_codes, self._block_pos, kc)
        in_u, u_pos = _lookup(self._border_codes, self._border_pos, bc)
        return in_b & in_u, b_pos, u_pos

    def theta_mask(self, arr: np.ndarray):
        """Per start position p (up to len - 2h): Theta membership of arr[p, p+2h)."""
        h = self.borders.h
        macro, b_pos, u_pos = self.macrocell_mask(arr)
        n_theta = macro.shape[-1] - h + 1
        counts = np.concatenate(
            [np.zeros(macro.shape[:-1] + (1,), dtype=np.int32), np.cumsum(macro, axis=-1, dtype=np.int32)], axis=-1
        )
        others = counts[..., h : h + n_theta] - counts[..., 1 : 1 + n_theta]
        return macro[..., :n_theta] & (others == 0), b_pos, u_pos

    def image_indices(self, arr: np.ndarray) -> np.ndarray:
        arr = np.asarray(arr)
        squeeze = arr.ndim == 1
        if squeeze:
            arr = arr[None, :]
        h, k, m, d = self.borders.h, self.borders.k, self.anchor, self.diameter
        n_out = arr.shape[1] - d + 1
        if n_out < 1:
            raise RuleError("rows shorter than the diameter")
        theta, b_pos, u_pos = self.theta_mask(arr)
        positions = np.arange(theta.shape[1])
        last = np.maximum.accumulate(np.where(theta, positions, -1), axis=1)
        cells = np.arange(n_out) + m
        start = last[:, cells]  # latest Theta start at or before each cell
        offset = cells[None, :] - start
        active = (start >= 0) & (offset < h)

        out = self._phi[arr[:, cells]]
        if active.any():
            rows, cols = np.nonzero(active)
            p = start[rows, cols]
            i = offset[rows, cols]
            bi = b_pos[rows, p]
            has_neighbor = theta[rows, p + h]
            nj = np.where(has_neighbor, b_pos[rows, p + h], bi)
            in_block = i < k
            vals = np.empty(len(rows), dtype=np.int16)
            vals[in_block] = self._inner_out[bi[in_block], nj[in_block], i[in_block]]
            nb = ~in_block
            vals[nb] = self._border_image[u_pos[rows[nb], p[nb]], i[nb] - k]
            out[rows, cols] = vals
        return out[0] if squeeze else out

    def __repr__(self) -> str:
        bs = self.borders
        return f"MacrocellRule(k={bs.k}, w={word_str(bs.w)}, h={bs.h}, anchor={self.anchor}, diameter={self.diameter})"


def full_rule(bs: BorderSystem, g: TableRule) -> MacrocellRule:
    return MacrocellRule(bs, g)


@dataclass(frozen=True)
class SynthesisResult:
    rule: MacrocellRule
    borders: BorderSystem
    inner: TableRule  # the onesided diameter-2 rule on blocks
    gamma: Sft  # the 2-SFT on blocks that the inner rule traces

    @classmethod
    def from_rule(cls, rule: MacrocellRule) -> "SynthesisResult":
        """Recover the result from the rule alone; the traced 2-SFT is read off
        the inner rule, whose outputs are exactly the allowed successors."""
        inner = rule.inner
        allowed = {(a, inner((a, b))) for a in inner.alphabet for b in inner.alphabet}
        return cls(rule, rule.borders, inner, Sft(inner.alphabet, 2, frozenset(allowed)))

    def encode(self, blocks_seq: Sequence, borders: Sequence | None = None) -> Word:
        """Periodic word x with x[ih, ih+k) = y_i and a border after each block."""
        bs = self.borders
        ups = list(borders) if borders is not None else [bs.upsilon[0]]
        word: list = []
        for i, b in enumerate(blocks_seq):
            b = tuple(b)
            if b not in bs.blocks.blocks:
                raise SynthesisError(f"{b!r} is not a block of B")
            border = tuple(ups[i % len(ups)])
            if not bs.is_border(border):
                raise SynthesisError(f"{border!r} is not a border word")
            word.extend(b)
            word.extend(border)
        return tuple(word)

    def metadata(self) -> dict:
        bs = self.borders
        return {
            "construction": "macrocell",
            "k": bs.k,
            "w": word_str(bs.w),
            "phi": {symbol_str(a): symbol_str(b) for a, b in zip(bs.alphabet, bs.phi.images)},
            "h": bs.h,
            "l": bs.l,
            "borders": len(bs.upsilon),
            "anchor": self.rule.anchor,
            "diameter": self.rule.diameter,
            "blocks": [symbol_str(b) for b in bs.blocks.blocks],
            "inner": {
                f"{symbol_str(a)} {symbol_str(b)}": symbol_str(self.inner((a, b)))
                for a in self.inner.alphabet
                for b in self.inner.alphabet
            },
        }

    def metadata_json(self) -> str:
        return json.dumps(self.metadata(), indent=2, sort_keys=True)


class WitnessError(SynthesisError):
    def __init__(self, check: str, detail: str = ""):
        super().__init__(f"witness check failed: {check}" + (f" ({detail})" if detail else ""))
        self.check = check


def verify_witnesses(sigma: SoficGraph, gamma: Sft, t3: T3Witness) -> None:
    base = sigma.alphabet
    if gamma.order != 2:
        raise WitnessError("t1 order", f"expected a 2-SFT, got order {gamma.order}")
    if not equal(project(gamma, 0, base), sigma):
        raise WitnessError("t1 first projection", "pi_0(Gamma) differs from the subshift")
    if not equal(project_all(gamma, base), sigma):
        raise WitnessError("t1 all projections", "pi(Gamma) differs from the subshift")
    if not is_t0_map(sigma, t3.phi):
        raise WitnessError("t3 phi", "some phi-orbit leaves the subshift")
    if not member_up(sigma, UPWord.periodic(t3.word)):
        raise WitnessError("t3 word", "w^omega is not in the subshift")


def synthesize(sigma: SoficGraph, gamma: Sft, t3: T3Witness) -> SynthesisResult:
    verify_witnesses(sigma, gamma, t3)
    g = trace_2sft(gamma)
    lengths = {len(b) for b in gamma.alphabet}
    if len(lengths) != 1:
        raise WitnessError("t1 blocks", "block symbols of different lengths")
    k = lengths.pop()
    bs = make_borders(k, t3.word, t3.phi, blocks=tuple(gamma.alphabet))
    return SynthesisResult(full_rule(bs, g), bs, g, gamma)
