"""Executable checks of the properties the macrocell construction relies on."""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field
from typing import Iterable, Sequence

import numpy as np

from ..ca import LocalRule, PeriodicConfig, TableRule, orbit_indices, trace_periodic
from ..shiftlang import SoficGraph, UPWord, member_up, word_str
from ..synthesis import BorderSystem, MacrocellRule, SynthesisResult, border_step
from .builtins import particle
from .traces import DEFAULT_SEED


@dataclass(frozen=True)
class CylinderSpec:
    """The configurations x with x[offset, offset + len) in ``words``."""

    words: frozenset
    offset: int = 0

    def __post_init__(self):
        words = frozenset(tuple(w) for w in self.words)
        if not words:
            raise ValueError("a cylinder needs at least one word")
        if len({len(w) for w in words}) != 1:
            raise ValueError("cylinder words must have one length")
        object.__setattr__(self, "words", words)

    @property
    def width(self) -> int:
        return len(next(iter(self.words)))

    def contains(self, cfg: PeriodicConfig) -> bool:
        return cfg.cells(self.offset, self.offset + self.width) in self.words


# -- border columns ---------------------------------------------------------


def border_orbit(bs: BorderSystem, b: Sequence) -> UPWord:
    """The eventually periodic sequence b, step(b), step(step(b)), ... as a
    word over border words."""
    seq = [tuple(b)]
    seen = {seq[0]: 0}
    while True:
        nxt = border_step(bs, seq[-1])
        if nxt in seen:
            start = seen[nxt]
            return seq[:start], seq[start:]
        seen[nxt] = len(seq)
        seq.append(nxt)


def border_columns(bs: BorderSystem) -> dict:
    """(border, column) -> UPWord of that column under border evolution."""
    out = {}
    for b in bs.upsilon:
        pre, per = border_orbit(bs, b)
        for i in range(bs.l):
            out[b, i] = UPWord(tuple(x[i] for x in pre), tuple(x[i] for x in per))
    return out


def border_columns_check(bs: BorderSystem, sigma: SoficGraph) -> bool:
    return all(member_up(sigma, z) for z in border_columns(bs).values())


# -- simulation faithfulness ------------------------------------------------


def simulation_check(result: SynthesisResult, y: Sequence, t: int, q: int | None = None) -> bool:
    """Column q (all q < k when omitted) of the encoded configuration follows
    letter q of the inner rule's trace on y."""
    bs = result.borders
    columns = range(bs.k) if q is None else [q]
    rule, inner = result.rule, result.inner
    xs = np.asarray([rule.alphabet.encode(result.encode(y))], dtype=np.int16)
    ys = np.asarray([inner.alphabet.encode([tuple(b) for b in y])], dtype=np.int16)
    orbit = orbit_indices(rule, xs, t)
    inner_orbit = orbit_indices(inner, ys, t)
    for col in columns:
        lhs = rule.alphabet.decode(orbit[:, 0, col])
        rhs = tuple(inner.alphabet.symbols[j][col] for j in inner_orbit[:, 0, 0])
        if lhs != rhs:
            return False
    return True


# -- stability --------------------------------------------------------------


@dataclass
class StabilityReport:
    samples: int
    seed: int
    tested_positions: int
    preimage_violations: int = 0  # image starts a macrocell iff Theta held
    theta_violations: int = 0  # Theta positions stay Theta
    complement_violations: int = 0  # non-Theta positions stay non-Theta
    witnesses: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not (self.preimage_violations or self.theta_violations or self.complement_violations)

    def to_json(self) -> str:
        return json.dumps(asdict(self), indent=2)


def stability_windows(result: SynthesisResult, samples: int, seed: int, width: int) -> np.ndarray:
    """A seeded mix of random words, valid encodings, corrupted encodings,
    uniform words and loose concatenations of blocks and borders."""
    bs = result.borders
    alphabet = bs.alphabet
    rng = np.random.default_rng(seed)
    size = len(alphabet)
    blocks = [alphabet.encode(b) for b in bs.blocks.blocks]
    borders = [alphabet.encode(b) for b in bs.upsilon]
    out = np.empty((samples, width), dtype=np.int16)
    for s in range(samples):
        kind = s % 5
        if kind == 0:
            row = rng.integers(0, size, width)
        elif kind in (1, 2):
            parts = []
            while sum(map(len, parts)) < width + bs.h:
                parts.append(blocks[rng.integers(len(blocks))])
                parts.append(borders[rng.integers(len(borders))])
            row = np.concatenate(parts)
            start = rng.integers(0, bs.h)
            row = row[start : start + width].copy()
            if kind == 2:
                for _ in range(rng.integers(1, 4)):
                    row[rng.integers(width)] = rng.integers(size)
        elif kind == 3:
            row = np.full(width, rng.integers(size))
            if rng.random() < 0.5:
                row[rng.integers(width)] = rng.integers(size)
        else:
            parts = []
            while sum(map(len, parts)) < width:
                pick = rng.integers(3)
                if pick == 0:
                    parts.append(blocks[rng.integers(len(blocks))])
                elif pick == 1:
                    b = borders[rng.integers(len(borders))]
                    cut = rng.integers(0, len(b))
                    parts.append(b[cut:] if rng.random() < 0.3 else b)
                else:
                    parts.append(rng.integers(0, size, rng.integers(1, 4)))
            row = np.concatenate(parts)[:width]
        out[s] = row
    return out


def stability_check(result: SynthesisResult, samples: int = 10_000, seed: int = DEFAULT_SEED,
                    positions: int | None = None, max_witnesses: int = 5) -> StabilityReport:
    """On each sampled window x and each tested position p (in image
    coordinates): F(x) has a macrocell at p iff x has Theta at p, and Theta
    membership at p is preserved in both directions."""
    rule: MacrocellRule = result.rule
    h, m, d = result.borders.h, rule.anchor, rule.diameter
    positions = h if positions is None else positions
    width = d - 1 + 2 * h + positions
    x = stability_windows(result, samples, seed, width)
    y = rule.image_indices(x)  # y[:, o] is cell o + m of x
    theta_x, _, _ = rule.theta_mask(x)
    theta_y, _, _ = rule.theta_mask(y)
    macro_y, _, _ = rule.macrocell_mask(y)
    tx = theta_x[:, m : m + positions]
    ty = theta_y[:, :positions]
    my = macro_y[:, :positions]
    report = StabilityReport(samples, seed, samples * positions)
    bad_pre = my != tx
    bad_theta = tx & ~ty
    bad_comp = ~tx & ty
    report.preimage_violations = int(bad_pre.sum())
    report.theta_violations = int(bad_theta.sum())
    report.complement_violations = int(bad_comp.sum())
    for name, mask in (("preimage", bad_pre), ("theta", bad_theta), ("complement", bad_comp)):
        for r, p in zip(*np.nonzero(mask)):
            if len(report.witnesses) >= max_witnesses:
                break
            report.witnesses.append({
                "check": name,
                "position": int(p),
                "window": word_str(rule.alphabet.decode(x[r])),
            })
    return report


# -- structured configurations ---------------------------------------------


def synthesis_realizers(result: SynthesisResult, n: int) -> list[PeriodicConfig]:
    """Configurations whose traces should realize every length-n factor: the
    encoding of each length-n word of the inner 2-SFT (as a periodic block
    sequence), uniform configurations and each border repeated."""
    bs = result.borders
    out = []
    for u in sorted(result.gamma.factors(n), key=lambda w: [result.gamma.alphabet.index(s) for s in w]):
        for border in bs.upsilon:
            out.append(PeriodicConfig(result.encode(u, [border])))
    for a in bs.alphabet:
        out.append(PeriodicConfig((a,)))
    for b in bs.blocks.blocks:
        for border in bs.upsilon:
            out.append(PeriodicConfig(tuple(b) + border))
    return out


# -- bouncing particles -----------------------------------------------------


def clmctrx_configuration(p: int, q: int) -> PeriodicConfig:
    """Walls around a left particle: x[-p-1, q+2) = w b^p l b^q w, repeated."""
    word = ("w",) + ("b",) * p + ("l",) + ("b",) * q
    return PeriodicConfig(word, phase=p + 1)


def clmctrx_expected(p: int, q: int, t: int) -> tuple:
    period = ("l",) + ("b",) * (2 * p) + ("r",) + ("b",) * (2 * q)
    return tuple(period[j % len(period)] for j in range(t))


def clmctrx_check(p: int, q: int, t: int, rule: LocalRule | None = None) -> bool:
    """The first t trace letters of the bouncing configuration follow (l b^2p r b^2q)^w."""
    if p < 0 or q < 0 or t < 1:
        raise ValueError("need p, q >= 0 and t >= 1")
    rule = particle() if rule is None else rule
    return trace_periodic(rule, clmctrx_configuration(p, q), t - 1) == clmctrx_expected(p, q, t)


def induced_sft(rule: TableRule, n: int, budget: int | None = None):
    """The order-n SFT whose allowed words are the length-n trace factors."""
    from ..ca import exact_trace_factors
    from ..shiftlang import Sft

    return Sft(rule.alphabet, n, frozenset(exact_trace_factors(rule, n, budget)))


def uniform_orbits_inside(rule: LocalRule, words: Iterable[Sequence], t: int) -> bool:
    """Every trace of a uniform configuration has its length-n factors in ``words``."""
    words = {tuple(w) for w in words}
    n = len(next(iter(words)))
    for a in rule.alphabet:
        tr = trace_periodic(rule, PeriodicConfig((a,)), t)
        if any(tr[i : i + n] not in words for i in range(len(tr) - n + 1)):
            return False
    return True
