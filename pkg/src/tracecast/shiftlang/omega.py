"""Omega-expressions such as ``(1+e)(01)^w`` and their compilation to graphs.

Surface syntax: alphabet symbols, ``+`` (union), juxtaposition
(concatenation), postfix ``*`` and ``^w``, ``e`` for the empty word,
parentheses.  Whitespace is ignored.

An expression denotes a set of infinite words; as a subshift it stands for the
smallest subshift containing them, whose language is the set of all factors of
the denoted words.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass

from .graph import SoficGraph
from .words import Alphabet, symbol_str


class ExprSyntaxError(ValueError):
    def __init__(self, message: str, position: int):
        super().__init__(f"{message} at position {position}")
        self.position = position


class ExprError(ValueError):
    pass


@dataclass(frozen=True)
class Symbol:
    symbol: object


@dataclass(frozen=True)
class Epsilon:
    pass


@dataclass(frozen=True)
class Concat:
    left: object
    right: object


@dataclass(frozen=True)
class Union:
    left: object
    right: object


@dataclass(frozen=True)
class Star:
    inner: object


@dataclass(frozen=True)
class Omega:
    inner: object


OmegaExpr = Symbol | Epsilon | Concat | Union | Star | Omega


def _tokenize(text: str, alphabet: Alphabet) -> list[tuple[str, object, int]]:
    if "e" in {symbol_str(s) for s in alphabet}:
        raise ExprError("the alphabet uses 'e', which is reserved for the empty word")
    by_str = {symbol_str(s): s for s in alphabet}
    lengths = sorted({len(k) for k in by_str}, reverse=True)
    tokens = []
    i = 0
    while i < len(text):
        c = text[i]
        if c.isspace():
            i += 1
        elif c in "()+*":
            tokens.append((c, None, i))
            i += 1
        elif text.startswith("^w", i):
            tokens.append(("^w", None, i))
            i += 2
        elif c == "e":
            tokens.append(("e", None, i))
            i += 1
        else:
            for n in lengths:
                if text[i : i + n] in by_str:
                    tokens.append(("sym", by_str[text[i : i + n]], i))
                    i += n
                    break
            else:
                raise ExprSyntaxError(f"unknown symbol {c!r}", i)
    tokens.append(("end", None, len(text)))
    return tokens


class _Parser:
    def __init__(self, tokens):
        self.tokens = tokens
        self.pos = 0

    def peek(self):
        return self.tokens[self.pos]

    def take(self, kind):
        tok = self.tokens[self.pos]
        if tok[0] != kind:
            raise ExprSyntaxError(f"expected {kind!r}, found {tok[0]!r}", tok[2])
        self.pos += 1
        return tok

    def expr(self):
        node = self.term()
        while self.peek()[0] == "+":
            self.pos += 1
            node = Union(node, self.term())
        return node

    def term(self):
        factors = []
        while self.peek()[0] in ("sym", "e", "("):
            if factors and isinstance(factors[-1], Omega):
                raise ExprSyntaxError("'^w' is only allowed on the last factor of a term", self.peek()[2])
            factors.append(self.factor())
        if not factors:
            tok = self.peek()
            raise ExprSyntaxError(f"unexpected {tok[0]!r}", tok[2])
        node = factors[0]
        for f in factors[1:]:
            node = Concat(node, f)
        return node

    def factor(self):
        node = self.atom()
        kind = self.peek()[0]
        if kind == "*":
            self.pos += 1
            node = Star(node)
        elif kind == "^w":
            self.pos += 1
            node = Omega(node)
        if self.peek()[0] in ("*", "^w"):
            raise ExprSyntaxError("stacked postfix operators", self.peek()[2])
        return node

    def atom(self):
        kind, value, where = self.peek()
        if kind == "sym":
            self.pos += 1
            return Symbol(value)
        if kind == "e":
            self.pos += 1
            return Epsilon()
        if kind == "(":
            self.pos += 1
            node = self.expr()
            self.take(")")
            return node
        raise ExprSyntaxError(f"unexpected {kind!r}", where)


def parse_omega_expr(text: str, alphabet: Alphabet) -> OmegaExpr:
    parser = _Parser(_tokenize(text, alphabet))
    node = parser.expr()
    tok = parser.peek()
    if tok[0] != "end":
        raise ExprSyntaxError(f"unexpected {tok[0]!r}", tok[2])
    return node


def _has_omega(node) -> bool:
    if isinstance(node, Omega):
        return True
    if isinstance(node, (Concat, Union)):
        return _has_omega(node.left) or _has_omega(node.right)
    if isinstance(node, Star):
        return _has_omega(node.inner)
    return False


def _concat_parts(node) -> list:
    if isinstance(node, Concat):
        return _concat_parts(node.left) + _concat_parts(node.right)
    return [node]


def omega_terms(node) -> list[tuple[list, object]]:
    """Normal form: a list of (finite prefix factors, periodic part V) meaning
    U . V^w for each term."""
    if isinstance(node, Union):
        return omega_terms(node.left) + omega_terms(node.right)
    if isinstance(node, Omega):
        if _has_omega(node.inner):
            raise ExprError("nested '^w'")
        return [([], node.inner)]
    if isinstance(node, Concat):
        parts = _concat_parts(node)
        *prefix, last = parts
        if any(_has_omega(p) for p in prefix):
            raise ExprError("'^w' must end its term")
        return [(prefix + pre, v) for pre, v in omega_terms(last)]
    if isinstance(node, Star) and _has_omega(node.inner):
        raise ExprError("'^w' under a star")
    raise ExprError("expression term denotes no infinite word")


class _Nfa:
    """Thompson construction; symbol edges and epsilon edges."""

    def __init__(self):
        self.n = 0
        self.sym: list[tuple[int, object, int]] = []
        self.eps: dict[int, list[int]] = {}

    def state(self) -> int:
        self.n += 1
        return self.n - 1

    def link(self, a: int, b: int) -> None:
        self.eps.setdefault(a, []).append(b)

    def fragment(self, node, start: int, end: int) -> None:
        if isinstance(node, Symbol):
            self.sym.append((start, node.symbol, end))
        elif isinstance(node, Epsilon):
            self.link(start, end)
        elif isinstance(node, Concat):
            mid = self.state()
            self.fragment(node.left, start, mid)
            self.fragment(node.right, mid, end)
        elif isinstance(node, Union):
            self.fragment(node.left, start, end)
            self.fragment(node.right, start, end)
        elif isinstance(node, Star):
            hub = self.state()
            self.link(start, hub)
            self.link(hub, end)
            self.fragment(node.inner, hub, hub)
        else:
            raise ExprError(f"unexpected node {node!r} in a finite part")

    def closure(self, s: int) -> set[int]:
        seen = {s}
        stack = [s]
        while stack:
            for t in self.eps.get(stack.pop(), ()):
                if t not in seen:
                    seen.add(t)
                    stack.append(t)
        return seen


def _symbols_in(node, out: list) -> list:
    if isinstance(node, Symbol):
        if node.symbol not in out:
            out.append(node.symbol)
    elif isinstance(node, (Concat, Union)):
        _symbols_in(node.left, out)
        _symbols_in(node.right, out)
    elif isinstance(node, (Star, Omega)):
        _symbols_in(node.inner, out)
    return out


def compile_expr(expr: OmegaExpr, alphabet: Alphabet | None = None) -> SoficGraph:
    """Graph whose path labels are exactly the factors of the denoted words.

    Without an explicit alphabet, the symbols occurring in ``expr`` are used,
    in sorted order.
    """
    if alphabet is None:
        alphabet = Alphabet(tuple(sorted(_symbols_in(expr, []), key=str)))
    nfa = _Nfa()
    start = nfa.state()
    hubs = []
    for prefix, periodic in omega_terms(expr):
        hub = nfa.state()
        node = Epsilon()
        for p in prefix:
            node = Concat(node, p)
        nfa.fragment(node, start, hub)
        nfa.fragment(periodic, hub, hub)
        hubs.append(hub)

    closures = {s: nfa.closure(s) for s in range(nfa.n)}
    by_source: dict[int, list] = {}
    for s, a, t in nfa.sym:
        by_source.setdefault(s, []).append((a, t))
    edges = set()
    for s in range(nfa.n):
        for p in closures[s]:
            for a, t in by_source.get(p, ()):
                edges.add((s, a, t))

    # states reachable from the start
    reach = {start}
    queue = deque([start])
    out: dict[int, list] = {}
    for s, a, t in edges:
        out.setdefault(s, []).append(t)
    while queue:
        for t in out.get(queue.popleft(), ()):
            if t not in reach:
                reach.add(t)
                queue.append(t)
    # states from which a hub (the point after a complete U v1 ... vr) is reachable
    targets = {s for s in range(nfa.n) if closures[s] & set(hubs)}
    inbound: dict[int, list] = {}
    for s, a, t in edges:
        inbound.setdefault(t, []).append(s)
    coreach = set(targets)
    queue = deque(targets)
    while queue:
        for s in inbound.get(queue.popleft(), ()):
            if s not in coreach:
                coreach.add(s)
                queue.append(s)
    keep = reach & coreach
    graph = SoficGraph.build(alphabet, [e for e in edges if e[0] in keep and e[2] in keep])
    if graph.is_empty:
        raise ExprError("expression denotes no infinite word")
    return graph


def compile_text(text: str, alphabet: Alphabet) -> SoficGraph:
    return compile_expr(parse_omega_expr(text, alphabet), alphabet)
