"""Words, subshift presentations and the automata algebra on them."""

from .graph import (
    Dfa,
    SoficGraph,
    blocks_closed,
    equal,
    factors,
    included,
    is_infinite,
    is_transitive,
    member_up,
    non_cycle_components,
    strongly_connected_components,
    union,
)
from .omega import (
    Concat,
    Epsilon,
    ExprError,
    ExprSyntaxError,
    Omega,
    OmegaExpr,
    Star,
    Symbol,
    Union,
    compile_expr,
    compile_text,
    parse_omega_expr,
)
from .sft import (
    BlockAlphabet,
    BlockMap,
    EmptySubshiftError,
    Sft,
    as_graph,
    higher_block,
    image_graph,
    interleave_conjugate,
    project,
    project_all,
)
from .words import (
    Alphabet,
    AlphabetError,
    UPWord,
    Word,
    as_block,
    factors_of,
    flatten,
    primitive_root,
    rotate,
    rotations,
    symbol_str,
    tokenize_word,
    word_str,
)

_factors_graph = factors


def factors(s, n: int) -> set:  # noqa: F811
    """Length-n words of the language of a SoficGraph or Sft."""
    return _factors_graph(as_graph(s), n)


__all__ = [name for name in dir() if not name.startswith("_")]
