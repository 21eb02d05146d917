"""Labelled graphs presenting sofic subshifts, and the automata algebra on them.

A :class:`SoficGraph` presents the one-sided subshift whose factor language is
the set of labels of finite paths.  Graphs are kept *right-essential*: a vertex
without an outgoing edge can never start an infinite path, so it is pruned
(iteratively).  Vertices without incoming edges are kept, because the language
of a one-sided subshift need not be left-extendable (``1 0^w`` in the orbit
closure of ``1 0^w`` has no letter before its ``1``).

Language questions go through :class:`Dfa`: subset construction from the set
of all vertices followed by partition refinement gives a canonical minimal
automaton of the factor language (all states accepting, missing transitions
reject).
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable

from .words import Alphabet, UPWord, Word


@dataclass(frozen=True)
class SoficGraph:
    alphabet: Alphabet
    vertices: frozenset
    edges: frozenset  # of (source, symbol, target)

    @classmethod
    def build(cls, alphabet: Alphabet, edges: Iterable[tuple], vertices: Iterable = ()) -> "SoficGraph":
        """Build a right-essential graph, renumbering vertices 0..n-1 deterministically."""
        edges = set(edges)
        for _, a, _ in edges:
            if a not in alphabet:
                raise ValueError(f"edge label {a!r} not in alphabet {alphabet}")
        verts = set(vertices) | {e[0] for e in edges} | {e[2] for e in edges}
        out_deg = {v: 0 for v in verts}
        incoming: dict = {v: [] for v in verts}
        for e in edges:
            out_deg[e[0]] += 1
            incoming[e[2]].append(e)
        dead = deque(v for v in verts if out_deg[v] == 0)
        removed = set()
        while dead:
            v = dead.popleft()
            if v in removed:
                continue
            removed.add(v)
            for e in incoming[v]:
                if e[0] not in removed:
                    out_deg[e[0]] -= 1
                    if out_deg[e[0]] == 0:
                        dead.append(e[0])
        keep = verts - removed
        edges = {e for e in edges if e[0] in keep and e[2] in keep}
        order = sorted(keep, key=_vertex_key)
        number = {v: i for i, v in enumerate(order)}
        return cls(
            alphabet,
            frozenset(range(len(order))),
            frozenset((number[s], a, number[t]) for s, a, t in edges),
        )

    @classmethod
    def full_shift(cls, alphabet: Alphabet) -> "SoficGraph":
        return cls.build(alphabet, [(0, a, 0) for a in alphabet])

    @classmethod
    def empty(cls, alphabet: Alphabet) -> "SoficGraph":
        return cls(alphabet, frozenset(), frozenset())

    def __len__(self) -> int:
        return len(self.vertices)

    @property
    def is_empty(self) -> bool:
        return not self.vertices

    @cached_property
    def successors(self) -> dict:
        """vertex -> symbol -> sorted tuple of targets"""
        out: dict = {v: {} for v in self.vertices}
        for s, a, t in self.edges:
            out[s].setdefault(a, []).append(t)
        return {v: {a: tuple(sorted(ts)) for a, ts in d.items()} for v, d in out.items()}

    def step(self, states: frozenset, symbol) -> frozenset:
        succ = self.successors
        return frozenset(t for s in states for t in succ[s].get(symbol, ()))

    def read(self, word: Iterable, states: frozenset | None = None) -> frozenset:
        current = self.vertices if states is None else states
        for a in word:
            if not current:
                break
            current = self.step(current, a)
        return current

    def accepts(self, word: Iterable) -> bool:
        """True iff ``word`` labels a path, i.e. lies in the factor language."""
        return bool(self.read(word))

    def relabel(self, mapping, alphabet: Alphabet) -> "SoficGraph":
        """Apply a letter-to-letter map to every edge label."""
        return SoficGraph.build(alphabet, [(s, mapping(a), t) for s, a, t in self.edges], self.vertices)

    def letters(self) -> set:
        return {a for _, a, _ in self.edges}

    @cached_property
    def dfa(self) -> "Dfa":
        return Dfa.from_graph(self).minimized()

    def __str__(self) -> str:
        return f"SoficGraph({len(self.vertices)} vertices, {len(self.edges)} edges over {self.alphabet})"


def _vertex_key(v):
    return (type(v).__name__, repr(v)) if not isinstance(v, int) else ("", v)


def union(graphs: Iterable[SoficGraph], alphabet: Alphabet | None = None) -> SoficGraph:
    """Disjoint union: presents the union of the subshifts."""
    graphs = list(graphs)
    if alphabet is None:
        alphabet = graphs[0].alphabet
    edges = []
    for i, g in enumerate(graphs):
        edges.extend(((i, s), a, (i, t)) for s, a, t in g.edges)
    return SoficGraph.build(alphabet, edges)


@dataclass
class Dfa:
    """Partial deterministic automaton, every state accepting, start state 0."""

    alphabet: Alphabet
    n_states: int
    delta: dict = field(default_factory=dict)  # (state, symbol) -> state

    @classmethod
    def from_graph(cls, graph: SoficGraph) -> "Dfa":
        if graph.is_empty:
            return cls(graph.alphabet, 0, {})
        start = graph.vertices
        index = {start: 0}
        delta = {}
        queue = deque([start])
        while queue:
            states = queue.popleft()
            for a in graph.alphabet:
                nxt = graph.step(states, a)
                if not nxt:
                    continue
                if nxt not in index:
                    index[nxt] = len(index)
                    queue.append(nxt)
                delta[index[states], a] = index[nxt]
        return cls(graph.alphabet, len(index), delta)

    def minimized(self) -> "Dfa":
        """Moore partition refinement, then canonical BFS numbering."""
        if self.n_states == 0:
            return self
        block = [0] * self.n_states
        n_blocks = 1
        while True:
            sig = {}
            new_block = []
            for s in range(self.n_states):
                key = (block[s],) + tuple(
                    block[self.delta[s, a]] if (s, a) in self.delta else -1 for a in self.alphabet
                )
                new_block.append(sig.setdefault(key, len(sig)))
            if len(sig) == n_blocks:
                break
            block, n_blocks = new_block, len(sig)
        delta = {(block[s], a): block[t] for (s, a), t in self.delta.items()}
        return Dfa(self.alphabet, n_blocks, delta)._canonical(block[0])

    def _canonical(self, start: int) -> "Dfa":
        order = {start: 0}
        queue = deque([start])
        while queue:
            s = queue.popleft()
            for a in self.alphabet:
                t = self.delta.get((s, a))
                if t is not None and t not in order:
                    order[t] = len(order)
                    queue.append(t)
        delta = {(order[s], a): order[t] for (s, a), t in self.delta.items() if s in order}
        return Dfa(self.alphabet, len(order), delta)

    def read(self, word: Iterable, state: int = 0):
        if self.n_states == 0:
            return None
        for a in word:
            state = self.delta.get((state, a))
            if state is None:
                return None
        return state

    def accepts(self, word: Iterable) -> bool:
        return self.read(word) is not None

    def successors(self, state: int) -> list[tuple]:
        return [(a, self.delta[state, a]) for a in self.alphabet if (state, a) in self.delta]

    def to_graph(self) -> SoficGraph:
        return SoficGraph.build(self.alphabet, [(s, a, t) for (s, a), t in self.delta.items()])

    def signature(self) -> tuple:
        return (
            self.alphabet.symbols,
            self.n_states,
            tuple(sorted(((s, self.alphabet.index(a)), t) for (s, a), t in self.delta.items())),
        )


# --------------------------------------------------------------------------
# graph algorithms


def strongly_connected_components(nodes: Iterable, succ) -> list[list]:
    """Iterative Tarjan.  ``succ(v)`` yields successors of ``v``."""
    nodes = list(nodes)
    index: dict = {}
    low: dict = {}
    on_stack: set = set()
    stack: list = []
    comps: list[list] = []
    counter = 0
    for root in nodes:
        if root in index:
            continue
        work = [(root, iter(succ(root)))]
        index[root] = low[root] = counter
        counter += 1
        stack.append(root)
        on_stack.add(root)
        while work:
            v, it = work[-1]
            for w in it:
                if w not in index:
                    index[w] = low[w] = counter
                    counter += 1
                    stack.append(w)
                    on_stack.add(w)
                    work.append((w, iter(succ(w))))
                    break
                if w in on_stack:
                    low[v] = min(low[v], index[w])
            else:
                work.pop()
                if work:
                    u = work[-1][0]
                    low[u] = min(low[u], low[v])
                if low[v] == index[v]:
                    comp = []
                    while True:
                        w = stack.pop()
                        on_stack.discard(w)
                        comp.append(w)
                        if w == v:
                            break
                    comps.append(sorted(comp))
    return comps


def _dfa_components(dfa: Dfa) -> list[tuple[list, int]]:
    """SCCs of the DFA with their internal edge counts (trivial ones skipped)."""
    comps = strongly_connected_components(range(dfa.n_states), lambda s: [t for _, t in dfa.successors(s)])
    out = []
    for comp in comps:
        members = set(comp)
        internal = sum(1 for s in comp for _, t in dfa.successors(s) if t in members)
        if internal:
            out.append((comp, internal))
    return out


def component_graph(dfa: Dfa, comp: Iterable[int]) -> SoficGraph:
    members = set(comp)
    return SoficGraph.build(
        dfa.alphabet, [(s, a, t) for (s, a), t in dfa.delta.items() if s in members and t in members]
    )


# --------------------------------------------------------------------------
# language operations


def factors(graph: SoficGraph, n: int) -> set[Word]:
    """All words of length ``n`` in the factor language."""
    if n < 0:
        raise ValueError("length must be nonnegative")
    dfa = graph.dfa
    if dfa.n_states == 0:
        return set()
    layer = {(): 0}
    for _ in range(n):
        nxt = {}
        for word, s in layer.items():
            for a, t in dfa.successors(s):
                nxt[word + (a,)] = t
        layer = nxt
    return set(layer)


def member_up(graph: SoficGraph, z: UPWord) -> bool:
    """Decide z in Sigma for an ultimately periodic z.

    Reads the preperiod from the set of all vertices, then reads the period
    repeatedly; the vertex sets at period boundaries eventually cycle, and z is
    in the subshift iff the set never empties before that happens.
    """
    current = graph.read(z.preperiod)
    if not current:
        return False
    seen = set()
    while current not in seen:
        seen.add(current)
        current = graph.read(z.period, current)
        if not current:
            return False
    return True


def equal(g1: SoficGraph, g2: SoficGraph) -> bool:
    if set(g1.alphabet) != set(g2.alphabet):
        raise ValueError("subshifts over different alphabets")
    if g1.alphabet != g2.alphabet:
        g2 = SoficGraph.build(g1.alphabet, g2.edges)
    d1, d2 = g1.dfa, g2.dfa
    if d1.n_states != d2.n_states:
        return False
    return d1.delta == d2.delta


def included(g1: SoficGraph, g2: SoficGraph) -> bool:
    """L(g1) subset of L(g2), by exploring the product of the two DFAs."""
    d1, d2 = g1.dfa, g2.dfa
    if d1.n_states == 0:
        return True
    if d2.n_states == 0:
        return False
    seen = {(0, 0)}
    queue = deque(seen)
    while queue:
        s1, s2 = queue.popleft()
        for a, t1 in d1.successors(s1):
            t2 = d2.delta.get((s2, a))
            if t2 is None:
                return False
            if (t1, t2) not in seen:
                seen.add((t1, t2))
                queue.append((t1, t2))
    return True


def is_transitive(graph: SoficGraph) -> bool:
    """True iff some SCC of the minimal DFA carries the whole factor language.

    If an SCC C carries every word, any u, v can be read inside C and joined
    by a path in C.  Conversely a bottom SCC of a transitive subshift's DFA
    must read every word.  Empty subshifts are not transitive.
    """
    dfa = graph.dfa
    if dfa.n_states == 0:
        return False
    for comp, _ in _dfa_components(dfa):
        if equal(component_graph(dfa, comp), graph):
            return True
    return False


def is_infinite(graph: SoficGraph) -> bool:
    """Decided on the minimal DFA: the language has unbounded growth iff some
    SCC is more than a simple cycle or two cycles are linked by a path."""
    dfa = graph.dfa
    comps = _dfa_components(dfa)
    if any(internal > len(comp) for comp, internal in comps):
        return True
    cyclic = {s: i for i, (comp, _) in enumerate(comps) for s in comp}
    for i, (comp, _) in enumerate(comps):
        # leave the cycle, and see whether another cycle is reachable
        seen = set(comp)
        queue = deque(comp)
        while queue:
            s = queue.popleft()
            for _, t in dfa.successors(s):
                if t in seen:
                    continue
                if cyclic.get(t, i) != i:
                    return True
                seen.add(t)
                queue.append(t)
    return False


def non_cycle_components(graph: SoficGraph) -> list[list[int]]:
    """SCCs of the minimal DFA that contain a vertex with two distinct returning branches."""
    return [comp for comp, internal in _dfa_components(graph.dfa) if internal > len(comp)]


def blocks_closed(graph: SoficGraph, blocks: Iterable[tuple]) -> bool:
    """Exactly decide B^omega subset of Sigma for a set of equal-length A-words.

    Every word of B^* must lie in the factor language; explore the DFA states
    reachable by reading whole blocks.
    """
    blocks = list(blocks)
    dfa = graph.dfa
    if not blocks:
        return True
    if dfa.n_states == 0:
        return False
    seen = {0}
    queue = deque([0])
    while queue:
        s = queue.popleft()
        for b in blocks:
            t = dfa.read(b, s)
            if t is None:
                return False
            if t not in seen:
                seen.add(t)
                queue.append(t)
    return True
