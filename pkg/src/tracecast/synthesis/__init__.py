"""Constructions of CA with prescribed trace subshifts."""

from .borders import BorderSystem, border_step, is_freezing, macro_delta, make_borders, theta_member
from .macrocell import (
    MacrocellRule,
    SynthesisResult,
    WitnessError,
    full_rule,
    synthesize,
    verify_witnesses,
)
from .pipeline import (
    ClockCode,
    MultiEncoding,
    T1Witness,
    clock,
    edge_shift_cover,
    multi,
    phase_windows,
    pullback,
    t1_report,
    t2_to_t1,
)
from .twosft import SynthesisError, block_recode, successor_choice, trace_2sft

__all__ = [name for name in dir() if not name.startswith("_")]
