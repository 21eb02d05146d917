"""Line-oriented text formats for subshifts, rules and witnesses.

Subshift file::

    alphabet: 0 1
    kind: sft            # or expr, graph
    order: 2
    forbidden: 11        # or allowed:

    kind: expr
    expr: (1+e)(01)^w

    kind: graph
    edge: p 0 q          # repeated

An optional ``block-length: K`` line makes every alphabet token a K-block
over its characters.  Words over one-character symbols are written
concatenated, several per ``forbidden:``/``allowed:`` line; over longer
symbols a word is written space-separated and each line holds one word.

Rule file::

    alphabet: b r l w
    anchor: 1
    diameter: 3
    default: identity    # or: phi 0->1 1->0
    map: rl? -> w        # first match wins, ? matches anything

A macrocell rule adds ``construction: macrocell``, ``blocks:``,
``witness: phi 0->0 1->0 w 1`` and ``inner: B1 B2 -> B3`` lines instead of
``default:``/``map:``.
"""

from __future__ import annotations

import os
import tempfile
from dataclasses import dataclass
from itertools import product
from pathlib import Path

from .ca import LocalRule, TableRule
from .shiftlang import Alphabet, SoficGraph, Sft, compile_text, symbol_str, tokenize_word, word_str
from .synthesis import MacrocellRule, SynthesisResult, make_borders
from .tracecheck import PhiMap, T3Witness


class FormatError(ValueError):
    def __init__(self, message: str, line: int | None = None):
        super().__init__(f"line {line}: {message}" if line is not None else message)
        self.line = line


def _entries(text: str):
    """(line number, key, value) for each non-blank, non-comment line."""
    for number, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if ":" not in line:
            raise FormatError(f"expected 'key: value', got {line!r}", number)
        key, value = line.split(":", 1)
        yield number, key.strip().lower(), value.strip()


def _single_chars(alphabet: Alphabet) -> bool:
    return all(len(symbol_str(s)) == 1 for s in alphabet)


def _alphabet(value: str, block_length: int | None, line: int) -> Alphabet:
    tokens = value.split()
    if not tokens:
        raise FormatError("empty alphabet", line)
    if "?" in tokens:
        raise FormatError("'?' is reserved for wildcards", line)
    if block_length is None:
        symbols = tuple(tokens)
    else:
        if any(len(t) != block_length for t in tokens):
            raise FormatError(f"every block must have length {block_length}", line)
        symbols = tuple(tuple(t) for t in tokens)
    try:
        return Alphabet(symbols)
    except ValueError as exc:
        raise FormatError(str(exc), line) from None


def _words(value: str, alphabet: Alphabet, line: int) -> list:
    try:
        if _single_chars(alphabet):
            return [tokenize_word(piece, alphabet) for piece in value.split()]
        return [tokenize_word(value, alphabet)] if value else []
    except ValueError as exc:
        raise FormatError(str(exc), line) from None


def _write_words(key: str, words, alphabet: Alphabet) -> list[str]:
    words = sorted(words, key=alphabet.sort_key)
    if _single_chars(alphabet):
        return [f"{key}: {' '.join(word_str(w) for w in words)}".rstrip()]
    return [f"{key}: {word_str(w)}" for w in words]


# -- subshifts --------------------------------------------------------------


@dataclass(frozen=True)
class SubshiftSpec:
    kind: str  # sft | expr | graph
    alphabet: Alphabet
    graph: SoficGraph
    sft: Sft | None = None
    expr: str | None = None

    @property
    def subshift(self):
        """The Sft when given as one, otherwise the graph."""
        return self.sft if self.sft is not None else self.graph


def parse_subshift(text: str) -> SubshiftSpec:
    entries = list(_entries(text))
    fields: dict = {}
    lines: dict = {}
    repeated = {"forbidden": [], "allowed": [], "edge": []}
    for number, key, value in entries:
        if key in repeated:
            repeated[key].append((number, value))
        elif key in ("alphabet", "kind", "order", "expr", "block-length"):
            if key in fields:
                raise FormatError(f"duplicate '{key}'", number)
            fields[key], lines[key] = value, number
        else:
            raise FormatError(f"unknown key '{key}'", number)
    if "alphabet" not in fields:
        raise FormatError("missing 'alphabet'")
    block_length = None
    if "block-length" in fields:
        block_length = _int(fields["block-length"], lines["block-length"], minimum=1)
    alphabet = _alphabet(fields["alphabet"], block_length, lines["alphabet"])
    kind = fields.get("kind")
    if kind is None:
        raise FormatError("missing 'kind'")
    if kind == "sft":
        if "order" not in fields:
            raise FormatError("an sft needs 'order'", lines["kind"])
        order = _int(fields["order"], lines["order"], minimum=1)
        if repeated["forbidden"] and repeated["allowed"]:
            raise FormatError("give either 'forbidden' or 'allowed', not both", repeated["allowed"][0][0])
        words = []
        for number, value in repeated["forbidden"] or repeated["allowed"]:
            for w in _words(value, alphabet, number):
                if len(w) > order or (repeated["allowed"] and len(w) != order):
                    raise FormatError(f"word {word_str(w)} does not fit order {order}", number)
                words.append(w)
        if repeated["allowed"]:
            sft = Sft(alphabet, order, frozenset(words))
        else:
            sft = Sft.from_forbidden(alphabet, words, order)
        return SubshiftSpec("sft", alphabet, sft.graph, sft=sft)
    if kind == "expr":
        if "expr" not in fields:
            raise FormatError("an expr subshift needs 'expr'", lines["kind"])
        try:
            graph = compile_text(fields["expr"], alphabet)
        except ValueError as exc:
            raise FormatError(str(exc), lines["expr"]) from None
        return SubshiftSpec("expr", alphabet, graph, expr=fields["expr"])
    if kind == "graph":
        edges = []
        by_str = {symbol_str(s): s for s in alphabet}
        for number, value in repeated["edge"]:
            parts = value.split()
            if len(parts) != 3:
                raise FormatError("an edge is 'SOURCE SYMBOL TARGET'", number)
            if parts[1] not in by_str:
                raise FormatError(f"unknown symbol {parts[1]!r}", number)
            edges.append((parts[0], by_str[parts[1]], parts[2]))
        return SubshiftSpec("graph", alphabet, SoficGraph.build(alphabet, edges))
    raise FormatError(f"unknown kind {kind!r}", lines["kind"])


def _alphabet_lines(alphabet: Alphabet) -> list[str]:
    lengths = {len(s) if isinstance(s, tuple) else None for s in alphabet}
    out = [f"alphabet: {alphabet}"]
    if len(lengths) == 1 and None not in lengths:
        out.append(f"block-length: {lengths.pop()}")
    return out


def write_subshift(obj) -> str:
    """Serialize an Sft, a SoficGraph or a SubshiftSpec."""
    if isinstance(obj, SubshiftSpec):
        if obj.kind == "expr":
            return "\n".join(_alphabet_lines(obj.alphabet) + ["kind: expr", f"expr: {obj.expr}"]) + "\n"
        obj = obj.subshift
    lines = _alphabet_lines(obj.alphabet)
    if isinstance(obj, Sft):
        lines += ["kind: sft", f"order: {obj.order}"]
        forbidden = obj.forbidden
        if len(forbidden) <= len(obj.allowed):
            lines += _write_words("forbidden", forbidden, obj.alphabet) if forbidden else []
        else:
            lines += _write_words("allowed", obj.allowed, obj.alphabet)
    elif isinstance(obj, SoficGraph):
        lines.append("kind: graph")
        for s, a, t in sorted(obj.edges, key=lambda e: (e[0], obj.alphabet.index(e[1]), e[2])):
            lines.append(f"edge: q{s} {symbol_str(a)} q{t}")
    else:
        raise TypeError(f"cannot serialize {type(obj).__name__}")
    return "\n".join(lines) + "\n"


# -- maps and witnesses -----------------------------------------------------


def parse_phi(text: str, alphabet: Alphabet, line: int | None = None) -> PhiMap:
    """``0->1 1->0`` or ``0->1,1->0``; letters not mentioned map to themselves."""
    by_str = {symbol_str(s): s for s in alphabet}
    mapping = {a: a for a in alphabet}
    for item in text.replace(",", " ").split():
        if "->" not in item:
            raise FormatError(f"expected 'a->b', got {item!r}", line)
        a, b = item.split("->", 1)
        if a not in by_str or b not in by_str:
            raise FormatError(f"unknown symbol in {item!r}", line)
        mapping[by_str[a]] = by_str[b]
    return PhiMap.from_dict(alphabet, mapping)


def phi_text(phi: PhiMap) -> str:
    return " ".join(f"{symbol_str(a)}->{symbol_str(b)}" for a, b in zip(phi.alphabet, phi.images))


def parse_t3_witness(text: str, alphabet: Alphabet) -> tuple[PhiMap, tuple]:
    """``phi:0->0,1->0;w:1`` as (phi, w), unchecked; ``T3Witness(*...)`` validates."""
    parts = {}
    for chunk in text.split(";"):
        chunk = chunk.strip()
        if not chunk:
            continue
        if ":" not in chunk:
            raise FormatError(f"expected 'phi:...' or 'w:...', got {chunk!r}")
        key, value = chunk.split(":", 1)
        parts[key.strip()] = value.strip()
    if set(parts) != {"phi", "w"}:
        raise FormatError("a T3 witness needs exactly 'phi' and 'w'")
    phi = parse_phi(parts["phi"], alphabet)
    try:
        return phi, tokenize_word(parts["w"], alphabet)
    except ValueError as exc:
        raise FormatError(str(exc)) from None


def t3_witness_text(t3: T3Witness) -> str:
    return f"phi:{phi_text(t3.phi).replace(' ', ',')};w:{word_str(t3.word)}"


# -- rules ------------------------------------------------------------------


def _int(value: str, line: int, minimum: int = 0) -> int:
    try:
        n = int(value)
    except ValueError:
        raise FormatError(f"expected an integer, got {value!r}", line) from None
    if n < minimum:
        raise FormatError(f"expected an integer >= {minimum}, got {n}", line)
    return n


def _pattern(text: str, alphabet: Alphabet, diameter: int, line: int) -> tuple:
    by_str = {symbol_str(s): s for s in alphabet}
    tokens = list(text) if _single_chars(alphabet) and " " not in text else text.split()
    if len(tokens) != diameter:
        raise FormatError(f"pattern has {len(tokens)} symbols, diameter is {diameter}", line)
    out = []
    for t in tokens:
        if t == "?":
            out.append(None)
        elif t in by_str:
            out.append(by_str[t])
        else:
            raise FormatError(f"unknown symbol {t!r}", line)
    return tuple(out)


def _symbol(text: str, alphabet: Alphabet, line: int):
    by_str = {symbol_str(s): s for s in alphabet}
    if text not in by_str:
        raise FormatError(f"unknown symbol {text!r}", line)
    return by_str[text]


def parse_rule(text: str) -> LocalRule:
    fields: dict = {}
    lines: dict = {}
    maps, inner_lines = [], []
    for number, key, value in _entries(text):
        if key == "map":
            maps.append((number, value))
        elif key == "inner":
            inner_lines.append((number, value))
        elif key in ("alphabet", "anchor", "diameter", "default", "construction", "blocks", "witness"):
            if key in fields:
                raise FormatError(f"duplicate '{key}'", number)
            fields[key], lines[key] = value, number
        else:
            raise FormatError(f"unknown key '{key}'", number)
    for key in ("alphabet", "anchor", "diameter"):
        if key not in fields:
            raise FormatError(f"missing '{key}'")
    alphabet = _alphabet(fields["alphabet"], None, lines["alphabet"])
    anchor = _int(fields["anchor"], lines["anchor"])
    diameter = _int(fields["diameter"], lines["diameter"], minimum=1)
    if fields.get("construction", "table") == "macrocell":
        rule = _parse_macrocell(fields, lines, inner_lines, alphabet)
        if (rule.anchor, rule.diameter) != (anchor, diameter):
            raise FormatError(
                f"macrocell rule has anchor {rule.anchor} and diameter {rule.diameter}", lines["anchor"]
            )
        return rule
    if "construction" in fields and fields["construction"] != "table":
        raise FormatError(f"unknown construction {fields['construction']!r}", lines["construction"])
    default = None
    spec = fields.get("default", "identity")
    if spec.startswith("phi"):
        phi = parse_phi(spec[3:], alphabet, lines.get("default"))
        default = lambda w: phi(w[anchor])  # noqa: E731
    elif spec != "identity":
        raise FormatError(f"default must be 'identity' or 'phi ...', got {spec!r}", lines.get("default"))
    patterns = []
    for number, value in maps:
        if "->" not in value:
            raise FormatError("a map line is 'PATTERN -> SYMBOL'", number)
        left, right = value.rsplit("->", 1)
        patterns.append((_pattern(left.strip(), alphabet, diameter, number), _symbol(right.strip(), alphabet, number)))
    try:
        return TableRule.from_patterns(alphabet, anchor, diameter, patterns, default=default)
    except ValueError as exc:
        raise FormatError(str(exc)) from None


def _parse_macrocell(fields, lines, inner_lines, alphabet: Alphabet) -> MacrocellRule:
    for key in ("blocks", "witness"):
        if key not in fields:
            raise FormatError(f"a macrocell rule needs '{key}'")
    tokens = fields["blocks"].split()
    lengths = {len(t) for t in tokens}
    if len(lengths) != 1 or not _single_chars(alphabet):
        raise FormatError("blocks must be words of one length over one-character symbols", lines["blocks"])
    blocks = tuple(tuple(_symbol(c, alphabet, lines["blocks"]) for c in t) for t in tokens)
    k = lengths.pop()
    witness = fields["witness"].split()
    if "w" not in witness or witness[0] != "phi":
        raise FormatError("witness is 'phi a->b ... w WORD'", lines["witness"])
    cut = witness.index("w")
    phi = parse_phi(" ".join(witness[1:cut]), alphabet, lines["witness"])
    word = _words(" ".join(witness[cut + 1 :]), alphabet, lines["witness"])
    if len(word) != 1:
        raise FormatError("witness needs exactly one word after 'w'", lines["witness"])
    block_alphabet = Alphabet(blocks)
    table = {}
    for number, value in inner_lines:
        if "->" not in value:
            raise FormatError("an inner line is 'B1 B2 -> B3'", number)
        left, right = value.rsplit("->", 1)
        pair = left.split()
        if len(pair) != 2:
            raise FormatError("an inner line is 'B1 B2 -> B3'", number)
        key = tuple(_symbol(p, block_alphabet, number) for p in pair)
        table[key] = _symbol(right.strip(), block_alphabet, number)
    missing = [p for p in product(blocks, repeat=2) if p not in table]
    if missing:
        raise FormatError(f"inner rule misses {len(missing)} block pairs")
    inner = TableRule.from_function(block_alphabet, 0, 2, lambda w: table[tuple(w)])
    try:
        bs = make_borders(k, word[0], phi, blocks=blocks)
    except ValueError as exc:
        raise FormatError(str(exc), lines["witness"]) from None
    return MacrocellRule(bs, inner)


def _default_phi(rule: TableRule) -> PhiMap:
    """The map a -> most frequent output over windows with a at the anchor."""
    size = len(rule.alphabet)
    table = rule.table_array().reshape(size ** rule.anchor, size, -1)
    images = []
    for a in range(size):
        counts = [(int((table[:, a, :] == b).sum()), -b) for b in range(size)]
        images.append(rule.alphabet.symbols[-max(counts)[1]])
    return PhiMap(rule.alphabet, tuple(images))


def _pattern_text(window, alphabet: Alphabet) -> str:
    parts = ["?" if s is None else symbol_str(s) for s in window]
    return "".join(parts) if _single_chars(alphabet) else " ".join(parts)


def write_rule(rule: LocalRule) -> str:
    if isinstance(rule, MacrocellRule):
        return _write_macrocell(rule)
    if not isinstance(rule, TableRule):
        raise TypeError(f"cannot serialize {type(rule).__name__}")
    alphabet, m, d = rule.alphabet, rule.anchor, rule.diameter
    if not all(isinstance(s, str) for s in alphabet):
        raise TypeError("rule files need string symbols")
    windows = list(product(alphabet.symbols, repeat=d))
    phi = _default_phi(rule)
    by_identity = [w for w in windows if rule(w) != w[m]]
    by_phi = [w for w in windows if rule(w) != phi(w[m])]
    lines = [f"alphabet: {alphabet}", f"anchor: {m}", f"diameter: {d}"]
    if len(by_phi) < len(by_identity):
        lines.append(f"default: phi {phi_text(phi)}")
        overrides = by_phi
    else:
        lines.append("default: identity")
        overrides = by_identity
    for w in overrides:
        lines.append(f"map: {_pattern_text(w, alphabet)} -> {symbol_str(rule(w))}")
    return "\n".join(lines) + "\n"


def _write_macrocell(rule: MacrocellRule) -> str:
    bs = rule.borders
    lines = [
        f"alphabet: {rule.alphabet}",
        f"anchor: {rule.anchor}",
        f"diameter: {rule.diameter}",
        "construction: macrocell",
        f"blocks: {' '.join(symbol_str(b) for b in bs.blocks.blocks)}",
        f"witness: phi {phi_text(bs.phi)} w {word_str(bs.w)}",
    ]
    for a, b in product(bs.blocks.blocks, repeat=2):
        lines.append(f"inner: {symbol_str(a)} {symbol_str(b)} -> {symbol_str(rule.inner((a, b)))}")
    return "\n".join(lines) + "\n"


def write_synthesis(result: SynthesisResult, path: str | Path) -> tuple[Path, Path]:
    """Write the rule file and its JSON metadata sidecar (``<path>.json``)."""
    path = Path(path)
    sidecar = path.with_name(path.name + ".json")
    atomic_write(path, write_rule(result.rule))
    atomic_write(sidecar, result.metadata_json() + "\n")
    return path, sidecar


def atomic_write(path: str | Path, data: str | bytes) -> None:
    path = Path(path)
    mode = "wb" if isinstance(data, bytes) else "w"
    fd, tmp = tempfile.mkstemp(dir=path.parent or ".", prefix=f".{path.name}.")
    try:
        with os.fdopen(fd, mode) as fh:
            fh.write(data)
        os.replace(tmp, path)
    except BaseException:
        os.unlink(tmp)
        raise


def read_text(path: str | Path) -> str:
    return Path(path).read_text(encoding="utf-8")
