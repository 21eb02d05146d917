"""One-dimensional cellular automata: local rules, exact simulation on periodic
configurations and finite dependence cones, trace extraction, rendering.

Cell i of F(x) is f(x[i-m], ..., x[i-m+d-1]) for anchor m and diameter d.
Simulation works on integer index arrays (symbol positions in the alphabet),
batched along the first axis.
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from typing import Callable, Iterable, Sequence

import numpy as np

from .shiftlang import Alphabet, Word, primitive_root, rotate, word_str

DEFAULT_BUDGET = 1 << 22
DEFAULT_TABLE_LIMIT = 1 << 24


def enumeration_budget() -> int:
    return int(os.environ.get("TRACECAST_BUDGET", DEFAULT_BUDGET))


def table_limit() -> int:
    return int(os.environ.get("TRACECAST_MAX_TABLE", DEFAULT_TABLE_LIMIT))


class RuleError(ValueError):
    pass


class BudgetExceeded(RuntimeError):
    def __init__(self, required: int, budget: int):
        super().__init__(f"enumeration needs {required} windows, budget is {budget}")
        self.required = required
        self.budget = budget


def window_codes(arr: np.ndarray, width: int, base: int) -> np.ndarray:
    """Base-``base`` codes of every length-``width`` window along the last axis."""
    n_out = arr.shape[-1] - width + 1
    codes = np.zeros(arr.shape[:-1] + (n_out,), dtype=np.int64)
    for j in range(width):
        codes *= base
        codes += arr[..., j : j + n_out]
    return codes


def all_windows(base: int, width: int, start: int = 0, stop: int | None = None) -> np.ndarray:
    """Rows ``start..stop`` of the lexicographic enumeration of all words."""
    total = base**width
    stop = total if stop is None else min(stop, total)
    codes = np.arange(start, stop, dtype=np.int64)
    digits = np.empty((len(codes), width), dtype=np.int16)
    for j in range(width - 1, -1, -1):
        digits[:, j] = codes % base
        codes //= base
    return digits


class LocalRule:
    """Base class for local rules.  Subclasses provide ``__call__`` on a window
    of symbols and ``image_indices`` on batches of index arrays."""

    alphabet: Alphabet
    anchor: int
    diameter: int

    def __call__(self, window: Sequence):
        raise NotImplementedError

    def image_indices(self, arr: np.ndarray) -> np.ndarray:
        """Apply the rule to every window of each row; rows shrink by d-1."""
        raise NotImplementedError

    @property
    def radius_left(self) -> int:
        return self.anchor

    @property
    def radius_right(self) -> int:
        return self.diameter - 1 - self.anchor

    def table_array(self) -> np.ndarray:
        """The dense table, indexed by base-|A| window codes."""
        size = len(self.alphabet) ** self.diameter
        if size > table_limit():
            raise RuleError(f"rule table with {size} entries exceeds the limit {table_limit()}")
        out = np.empty(size, dtype=np.int16)
        chunk = 1 << 16
        for start in range(0, size, chunk):
            rows = all_windows(len(self.alphabet), self.diameter, start, start + chunk)
            out[start : start + len(rows)] = self.image_indices(rows)[:, 0]
        return out


class TableRule(LocalRule):
    def __init__(self, alphabet: Alphabet, anchor: int, diameter: int, table):
        if diameter < 1:
            raise RuleError("diameter must be at least 1")
        table = np.asarray(table, dtype=np.int16)
        if table.shape != (len(alphabet) ** diameter,):
            raise RuleError(f"table must have {len(alphabet) ** diameter} entries, got {table.shape}")
        if table.size and (table.min() < 0 or table.max() >= len(alphabet)):
            raise RuleError("table entries must be alphabet indices")
        self.alphabet = alphabet
        self.anchor = anchor
        self.diameter = diameter
        self.table = table
        self.table.setflags(write=False)

    @classmethod
    def from_function(cls, alphabet: Alphabet, anchor: int, diameter: int, func: Callable) -> "TableRule":
        size = len(alphabet) ** diameter
        if size > table_limit():
            raise RuleError(f"rule table with {size} entries exceeds the limit {table_limit()}")
        rows = all_windows(len(alphabet), diameter)
        table = [alphabet.index(func(alphabet.decode(r))) for r in rows]
        return cls(alphabet, anchor, diameter, table)

    @classmethod
    def from_patterns(cls, alphabet: Alphabet, anchor: int, diameter: int,
                      patterns: Iterable[tuple[Sequence, object]], default: Callable | None = None) -> "TableRule":
        """First matching pattern wins; ``None`` (or ``'?'``) in a pattern matches
        any symbol.  Unmatched windows get ``default(window)``, or the anchor
        cell's own symbol when no default is given."""
        size = len(alphabet) ** diameter
        if size > table_limit():
            raise RuleError(f"rule table with {size} entries exceeds the limit {table_limit()}")
        digits = all_windows(len(alphabet), diameter)
        if default is None:
            if not 0 <= anchor < diameter:
                raise RuleError("the identity default needs 0 <= anchor < diameter")
            table = digits[:, anchor].astype(np.int16)
        else:
            table = np.array([alphabet.index(default(alphabet.decode(r))) for r in digits], dtype=np.int16)
        assigned = np.zeros(size, dtype=bool)
        for pattern, out in patterns:
            pattern = tuple(pattern)
            if len(pattern) != diameter:
                raise RuleError(f"pattern {pattern!r} does not have length {diameter}")
            mask = ~assigned
            for j, sym in enumerate(pattern):
                if sym is None or sym == "?":
                    continue
                mask &= digits[:, j] == alphabet.index(sym)
            table[mask] = alphabet.index(out)
            assigned |= mask
        return cls(alphabet, anchor, diameter, table)

    def __call__(self, window: Sequence):
        window = tuple(window)
        if len(window) != self.diameter:
            raise RuleError(f"window has length {len(window)}, diameter is {self.diameter}")
        code = 0
        for s in window:
            code = code * len(self.alphabet) + self.alphabet.index(s)
        return self.alphabet.symbols[self.table[code]]

    def image_indices(self, arr: np.ndarray) -> np.ndarray:
        return self.table[window_codes(arr, self.diameter, len(self.alphabet))]

    def table_array(self) -> np.ndarray:
        return self.table

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, TableRule)
            and self.alphabet == other.alphabet
            and self.anchor == other.anchor
            and self.diameter == other.diameter
            and np.array_equal(self.table, other.table)
        )

    def __hash__(self) -> int:
        return hash((self.alphabet, self.anchor, self.diameter, self.table.tobytes()))

    def __repr__(self) -> str:
        return f"TableRule(alphabet={self.alphabet}, anchor={self.anchor}, diameter={self.diameter})"


@dataclass(frozen=True)
class PeriodicConfig:
    """x_i = word[(i + phase) mod |word|], stored with phase 0 and a primitive word."""

    word: tuple
    phase: int = 0

    def __post_init__(self):
        word = tuple(self.word)
        if not word:
            raise ValueError("a periodic configuration needs a nonempty word")
        word = primitive_root(rotate(word, self.phase))
        object.__setattr__(self, "word", word)
        object.__setattr__(self, "phase", 0)

    def __len__(self) -> int:
        return len(self.word)

    def __getitem__(self, i: int):
        return self.word[i % len(self.word)]

    def cells(self, lo: int, hi: int) -> Word:
        """x[lo..hi), any integers."""
        return tuple(self[i] for i in range(lo, hi))

    def __str__(self) -> str:
        return f"^w({word_str(self.word)})^w"


def _indices(alphabet: Alphabet, word: Sequence) -> np.ndarray:
    return np.asarray(alphabet.encode(word), dtype=np.int16)


def step_indices(rule: LocalRule, x: np.ndarray) -> np.ndarray:
    """One step on a batch of periodic configurations (rows, period along axis 1)."""
    period = x.shape[-1]
    cols = (np.arange(period + rule.diameter - 1) - rule.anchor) % period
    return rule.image_indices(x[..., cols])


def step_periodic(rule: LocalRule, cfg: PeriodicConfig) -> PeriodicConfig:
    x = _indices(rule.alphabet, cfg.word)[None, :]
    return PeriodicConfig(rule.alphabet.decode(step_indices(rule, x)[0]))


def orbit_indices(rule: LocalRule, x: np.ndarray, steps: int) -> np.ndarray:
    """Shape (steps+1, *x.shape): the periodic orbit of each row."""
    out = np.empty((steps + 1,) + x.shape, dtype=np.int16)
    out[0] = x
    for t in range(steps):
        x = step_indices(rule, x)
        out[t + 1] = x
    return out


def apply_to_word(rule: LocalRule, word: Sequence) -> Word:
    if len(word) < rule.diameter:
        raise RuleError(f"word of length {len(word)} is shorter than the diameter {rule.diameter}")
    x = _indices(rule.alphabet, word)[None, :]
    return rule.alphabet.decode(rule.image_indices(x)[0])


def trace_periodic(rule: LocalRule, cfg: PeriodicConfig, t: int, column: int = 0) -> Word:
    if t < 0:
        raise ValueError("t must be nonnegative")
    x = _indices(rule.alphabet, cfg.word)[None, :]
    orbit = orbit_indices(rule, x, t)
    return rule.alphabet.decode(orbit[:, 0, column % len(cfg)])


def cone_bounds(rule: LocalRule, t: int) -> tuple[int, int]:
    """Positions [lo, hi] of the initial cells that determine t steps at cell 0."""
    m, d = rule.anchor, rule.diameter
    return min(0, -t * m), max(0, t * (d - 1 - m))


def cone_traces(rule: LocalRule, windows: np.ndarray, t: int, offset: int) -> np.ndarray:
    """Trace prefixes (as index rows of length t+1) of the cell at ``offset``."""
    out = np.empty((windows.shape[0], t + 1), dtype=np.int16)
    x = windows
    pos = offset
    out[:, 0] = x[:, pos]
    for j in range(1, t + 1):
        x = rule.image_indices(x)
        pos -= rule.anchor
        if not 0 <= pos < x.shape[1]:
            raise RuleError("window too short for the requested number of steps")
        out[:, j] = x[:, pos]
    return out


def trace_prefix_window(rule: LocalRule, window: Sequence, t: int, offset: int | None = None) -> Word:
    """Exact trace prefix of length t+1 of the cell at ``offset`` in ``window``
    (default: the position forced by the anchor, ``t*m`` for nonnegative m)."""
    lo, hi = cone_bounds(rule, t)
    if offset is None:
        offset = -lo
    if offset + lo < 0 or offset + hi >= len(window):
        raise RuleError(f"window of length {len(window)} does not cover the cone [{lo}, {hi}] around offset {offset}")
    x = _indices(rule.alphabet, window)[None, :]
    return rule.alphabet.decode(cone_traces(rule, x, t, offset)[0])


def exact_trace_factors(rule: LocalRule, n: int, budget: int | None = None) -> set[Word]:
    """All length-n factors of the trace subshift: factors of traces are trace
    prefixes of later configurations, so enumerating every dependence cone of
    n-1 steps is exact."""
    if n < 1:
        raise ValueError("n must be at least 1")
    budget = enumeration_budget() if budget is None else budget
    t = n - 1
    lo, hi = cone_bounds(rule, t)
    width = hi - lo + 1
    base = len(rule.alphabet)
    total = base**width
    if total > budget:
        raise BudgetExceeded(total, budget)
    seen = set()
    chunk = max(1, min(total, (1 << 20) // max(1, width)))
    for start in range(0, total, chunk):
        windows = all_windows(base, width, start, start + chunk)
        traces = cone_traces(rule, windows, t, -lo)
        for row in np.unique(traces, axis=0):
            seen.add(tuple(row))
    return {rule.alphabet.decode(r) for r in seen}


@dataclass(frozen=True)
class SpaceTimeDiagram:
    alphabet: Alphabet
    rows: tuple  # of Words
    lo: int  # position of the first column

    def __post_init__(self):
        if len({len(r) for r in self.rows}) > 1:
            raise ValueError("rows must have equal length")

    @property
    def steps(self) -> int:
        return len(self.rows) - 1


def space_time(rule: LocalRule, cfg: PeriodicConfig, t: int, window: tuple[int, int] | int) -> SpaceTimeDiagram:
    """Rows F^j(x)[lo..hi) for j = 0..t; an int window means [0, window)."""
    lo, hi = (0, window) if isinstance(window, int) else window
    x = _indices(rule.alphabet, cfg.word)[None, :]
    orbit = orbit_indices(rule, x, t)[:, 0, :]
    cols = np.arange(lo, hi) % len(cfg)
    rows = tuple(rule.alphabet.decode(r) for r in orbit[:, cols])
    return SpaceTimeDiagram(rule.alphabet, rows, lo)


def render(diagram: SpaceTimeDiagram, fmt: str = "text") -> bytes:
    if fmt == "text":
        return ("\n".join(word_str(r) for r in diagram.rows) + "\n").encode()
    if fmt == "pgm":
        width = len(diagram.rows[0]) if diagram.rows else 0
        top = max(1, len(diagram.alphabet) - 1)
        lines = ["P2", f"{width} {len(diagram.rows)}", "255"]
        for row in diagram.rows:
            lines.append(" ".join(str(255 * diagram.alphabet.index(s) // top) for s in row))
        return ("\n".join(lines) + "\n").encode()
    raise ValueError(f"unknown diagram format {fmt!r} (expected text or pgm)")


def group_blocks(rule: LocalRule, k: int) -> TableRule:
    """The same CA read on k-blocks: grouped cell I holds cells [Ik, Ik+k).

    The grouped rule reads the left block, the block itself and the right block
    (anchor 1, diameter 3); neighbors the rule never depends on are dropped,
    which lowers the anchor and diameter accordingly.
    """
    m, d = rule.anchor, rule.diameter
    if k < max(1, m, d - m - 1):
        raise RuleError(f"k={k} is too small for anchor {m} and diameter {d}")
    base = len(rule.alphabet)
    blocks = rule.alphabet.blocks(k)
    nb = len(blocks)
    if nb**3 > table_limit():
        raise RuleError("grouped table too large")
    # all triples of blocks, as base-letter rows of length 3k
    cells = all_windows(base, 3 * k)
    # cell Ik + r reads positions Ik + r - m .. Ik + r - m + d - 1, i.e. row offsets k + r - m ..
    out = np.zeros(len(cells), dtype=np.int64)
    img = rule.image_indices(cells[:, k - m : 2 * k - m + d - 1])
    for r in range(k):
        out = out * base + img[:, r]
    table = out.reshape(nb, nb, nb)
    keep_left = not np.all(table == table[:1, :, :])
    keep_right = not np.all(table == table[:, :, :1])
    if not keep_left:
        table = table[0]
    if not keep_right:
        table = table[..., 0]
    anchor = 1 if keep_left else 0
    diameter = 1 + keep_left + keep_right
    return TableRule(blocks, anchor, diameter, table.reshape(-1))

