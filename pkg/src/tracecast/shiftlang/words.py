"""Alphabets, finite words and ultimately periodic infinite words.

Symbols are any hashable values. Base alphabets use short strings; block
alphabets use flat tuples of base symbols, so that a block over a block
alphabet is again a flat tuple and column projections index straight into it.
Words are plain tuples of symbols.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Hashable, Iterable, Sequence

Symbol = Hashable
Word = tuple


class AlphabetError(ValueError):
    pass


@dataclass(frozen=True)
class Alphabet:
    symbols: tuple

    def __post_init__(self):
        symbols = tuple(self.symbols)
        if not symbols:
            raise AlphabetError("alphabet must contain at least one symbol")
        if len(set(symbols)) != len(symbols):
            raise AlphabetError(f"duplicate symbols in alphabet {symbols!r}")
        object.__setattr__(self, "symbols", symbols)

    @classmethod
    def of(cls, spec: str | Iterable) -> "Alphabet":
        """``Alphabet.of("01")`` or ``Alphabet.of(["b", "r", "l", "w"])``."""
        if isinstance(spec, str):
            spec = spec.split() if " " in spec.strip() else list(spec)
        return cls(tuple(spec))

    def __len__(self) -> int:
        return len(self.symbols)

    def __iter__(self):
        return iter(self.symbols)

    def __contains__(self, symbol) -> bool:
        return symbol in self.index_map

    @cached_property
    def index_map(self) -> dict:
        return {s: i for i, s in enumerate(self.symbols)}

    def index(self, symbol) -> int:
        try:
            return self.index_map[symbol]
        except KeyError:
            raise AlphabetError(f"symbol {symbol!r} not in alphabet {self.symbols!r}") from None

    def require_letters(self, n: int = 2) -> None:
        if len(self) < n:
            raise AlphabetError(f"alphabet needs at least {n} letters, has {len(self)}")

    def check_word(self, word: Sequence) -> Word:
        for s in word:
            if s not in self.index_map:
                raise AlphabetError(f"symbol {s!r} not in alphabet {self.symbols!r}")
        return tuple(word)

    def encode(self, word: Sequence) -> list[int]:
        return [self.index(s) for s in word]

    def decode(self, indices: Iterable[int]) -> Word:
        return tuple(self.symbols[i] for i in indices)

    def sort_key(self, word: Sequence) -> tuple:
        return tuple(self.index_map[s] for s in word)

    def blocks(self, k: int) -> "Alphabet":
        """All k-blocks over this alphabet, as flat tuples in lexicographic order."""
        from itertools import product

        return Alphabet(tuple(flatten(w) for w in product(self.symbols, repeat=k)))

    def __str__(self) -> str:
        return " ".join(symbol_str(s) for s in self.symbols)


def flatten(word: Iterable) -> tuple:
    """Concatenate symbols into one flat tuple of base letters."""
    out: list = []
    for s in word:
        if isinstance(s, tuple):
            out.extend(s)
        else:
            out.append(s)
    return tuple(out)


def as_block(symbol) -> tuple:
    return symbol if isinstance(symbol, tuple) else (symbol,)


def symbol_str(symbol) -> str:
    if isinstance(symbol, tuple):
        return "".join(symbol_str(s) for s in symbol)
    return str(symbol)


def word_str(word: Sequence) -> str:
    """Serialize a word: concatenated when every symbol prints as one character."""
    parts = [symbol_str(s) for s in word]
    if all(len(p) == 1 for p in parts):
        return "".join(parts)
    return " ".join(parts)


def tokenize_word(text: str, alphabet: Alphabet) -> Word:
    """Split a serialized word back into symbols by longest match against the alphabet."""
    text = text.strip()
    if " " in text:
        pieces = text.split()
        out = []
        for piece in pieces:
            out.extend(tokenize_word(piece, alphabet))
        return tuple(out)
    by_str = {symbol_str(s): s for s in alphabet}
    lengths = sorted({len(k) for k in by_str}, reverse=True)
    out = []
    i = 0
    while i < len(text):
        for n in lengths:
            piece = text[i : i + n]
            if piece in by_str:
                out.append(by_str[piece])
                i += n
                break
        else:
            raise AlphabetError(f"cannot read {text[i:]!r} with alphabet {alphabet}")
    return tuple(out)


def rotate(word: Sequence, n: int = 1) -> Word:
    """gamma^n: move the first n letters to the end."""
    word = tuple(word)
    if not word:
        return word
    n %= len(word)
    return word[n:] + word[:n]


def rotations(word: Sequence) -> list[Word]:
    """Distinct rotations of ``word`` in order gamma^0, gamma^1, ..."""
    seen: list[Word] = []
    for q in range(len(word)):
        r = rotate(word, q)
        if r not in seen:
            seen.append(r)
    return seen


def primitive_root(word: Sequence) -> Word:
    word = tuple(word)
    n = len(word)
    for p in range(1, n + 1):
        if n % p == 0 and word[:p] * (n // p) == word:
            return word[:p]
    return word


def factors_of(word: Sequence, n: int) -> set[Word]:
    word = tuple(word)
    return {word[i : i + n] for i in range(len(word) - n + 1)}


@dataclass(frozen=True)
class UPWord:
    """The ultimately periodic word ``preperiod . period^omega``.

    Stored in canonical form (primitive period, shortest preperiod), so
    dataclass equality is equality of infinite words.
    """

    preperiod: tuple = field(default=())
    period: tuple = field(default=())

    def __post_init__(self):
        pre, per = tuple(self.preperiod), tuple(self.period)
        if not per:
            raise ValueError("period must be nonempty")
        per = primitive_root(per)
        while pre and pre[-1] == per[-1]:
            pre = pre[:-1]
            per = per[-1:] + per[:-1]
        object.__setattr__(self, "preperiod", pre)
        object.__setattr__(self, "period", per)

    @classmethod
    def periodic(cls, word: Sequence) -> "UPWord":
        return cls((), tuple(word))

    def __getitem__(self, i: int):
        if i < len(self.preperiod):
            return self.preperiod[i]
        return self.period[(i - len(self.preperiod)) % len(self.period)]

    def prefix(self, n: int) -> Word:
        return tuple(self[i] for i in range(n))

    def shift(self, n: int = 1) -> "UPWord":
        pre = self.preperiod
        if n <= len(pre):
            return UPWord(pre[n:], self.period)
        return UPWord((), rotate(self.period, n - len(pre)))

    def letters(self) -> set:
        return set(self.preperiod) | set(self.period)

    def __str__(self) -> str:
        per = word_str(self.period)
        per = per if len(self.period) == 1 else f"({per})"
        return f"{word_str(self.preperiod)}{per}^w"
