"""Trace-language comparison, built-in rules and construction checks."""

from .builtins import BUILTINS, builtin, identity, negation, non_t3, particle, shift
from .lemmas import (
    CylinderSpec,
    StabilityReport,
    border_columns,
    border_columns_check,
    border_orbit,
    clmctrx_check,
    clmctrx_configuration,
    clmctrx_expected,
    induced_sft,
    simulation_check,
    stability_check,
    stability_windows,
    synthesis_realizers,
    uniform_orbits_inside,
)
from .traces import (
    DEFAULT_SAMPLES,
    DEFAULT_SEED,
    TraceReport,
    compare_trace_language,
    realized_factors,
    sample_configs,
    sampled_soundness,
    traced_factor_codes,
)

__all__ = [
    "BUILTINS", "builtin", "identity", "negation", "non_t3", "particle", "shift",
    "CylinderSpec", "StabilityReport", "border_columns", "border_columns_check", "border_orbit",
    "clmctrx_check", "clmctrx_configuration", "clmctrx_expected", "induced_sft", "simulation_check",
    "stability_check", "stability_windows", "synthesis_realizers", "uniform_orbits_inside",
    "DEFAULT_SAMPLES", "DEFAULT_SEED", "TraceReport", "compare_trace_language", "realized_factors",
    "sample_configs", "sampled_soundness", "traced_factor_codes",
]
