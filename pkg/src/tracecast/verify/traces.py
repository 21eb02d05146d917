"""Comparing the trace language of a rule with a target subshift."""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field
from typing import Iterable, Sequence

import numpy as np

from ..ca import BudgetExceeded, LocalRule, PeriodicConfig, exact_trace_factors, orbit_indices, window_codes
from ..shiftlang import SoficGraph, factors, word_str

DEFAULT_SEED = 1
DEFAULT_SAMPLES = 10_000
MAX_PERIOD = 64
DEFAULT_STEPS = 200


@dataclass
class TraceReport:
    mode: str  # "exact" or "sampled"
    n: int
    verdict: str  # equal | unequal | no refutation | refuted | inconclusive
    missing: list = field(default_factory=list)  # in the subshift, never traced
    extra: list = field(default_factory=list)  # traced, not in the subshift
    samples: int = 0
    seed: int | None = None
    realizers: int = 0
    note: str = ""

    @property
    def ok(self) -> bool:
        return self.verdict in ("equal", "no refutation")

    def to_json(self) -> str:
        return json.dumps(asdict(self), indent=2)

    def to_text(self) -> str:
        lines = [f"{key}: {value}" for key, value in asdict(self).items() if key not in ("missing", "extra")]
        lines.append(f"missing: {' '.join(self.missing) or '-'}")
        lines.append(f"extra: {' '.join(self.extra) or '-'}")
        return "\n".join(lines) + "\n"


def _words(words: Iterable) -> list[str]:
    return sorted(word_str(w) for w in words)


def traced_factor_codes(rule: LocalRule, configs: np.ndarray, steps: int, n: int, columns: str = "all") -> np.ndarray:
    """Codes (base |A|) of every length-n factor of the traces of the given
    periodic configurations (rows of one common period)."""
    orbit = orbit_indices(rule, configs, steps)  # (steps+1, rows, period)
    if columns != "all":
        orbit = orbit[:, :, :1]
    traces = np.moveaxis(orbit, 0, -1)  # rows, cells, time
    codes = window_codes(traces, n, len(rule.alphabet))
    return np.unique(codes)


def _codes_to_words(codes: Iterable[int], alphabet, n: int) -> set:
    base = len(alphabet)
    out = set()
    for c in codes:
        c = int(c)
        digits = []
        for _ in range(n):
            digits.append(c % base)
            c //= base
        out.add(alphabet.decode(reversed(digits)))
    return out


def _word_codes(words: Iterable[Sequence], alphabet) -> set[int]:
    base = len(alphabet)
    out = set()
    for w in words:
        c = 0
        for s in w:
            c = c * base + alphabet.index(s)
        out.add(c)
    return out


def sample_configs(alphabet_size: int, samples: int, seed: int, max_period: int = MAX_PERIOD):
    """Seeded random periodic configurations, grouped by period."""
    rng = np.random.default_rng(seed)
    periods = rng.integers(1, max_period + 1, size=samples)
    for p in np.unique(periods):
        count = int(np.sum(periods == p))
        yield int(p), rng.integers(0, alphabet_size, size=(count, int(p))).astype(np.int16)


def sampled_soundness(rule: LocalRule, sigma: SoficGraph, n: int, samples: int, seed: int,
                      steps: int = DEFAULT_STEPS, max_period: int = MAX_PERIOD) -> set:
    """Traced length-n factors (over all sampled traces) outside the subshift."""
    allowed = _word_codes(factors(sigma, n), rule.alphabet)
    bad: set[int] = set()
    for _, configs in sample_configs(len(rule.alphabet), samples, seed, max_period):
        for c in traced_factor_codes(rule, configs, steps, n).tolist():
            if c not in allowed:
                bad.add(c)
    return _codes_to_words(bad, rule.alphabet, n)


def realized_factors(rule: LocalRule, configs: Iterable[PeriodicConfig], n: int, steps: int) -> set:
    by_period: dict[int, list] = {}
    for cfg in configs:
        by_period.setdefault(len(cfg), []).append(rule.alphabet.encode(cfg.word))
    seen: set[int] = set()
    for rows in by_period.values():
        arr = np.asarray(rows, dtype=np.int16)
        seen.update(traced_factor_codes(rule, arr, steps, n).tolist())
    return _codes_to_words(seen, rule.alphabet, n)


def compare_trace_language(rule: LocalRule, sigma: SoficGraph, n: int, budget: int | None = None,
                           samples: int = DEFAULT_SAMPLES, seed: int = DEFAULT_SEED,
                           realizers: Sequence[PeriodicConfig] = (), steps: int = DEFAULT_STEPS,
                           max_period: int = MAX_PERIOD) -> TraceReport:
    """Exact comparison of length-n factor sets when the dependence cones fit
    the budget; otherwise sampled soundness plus realization of every factor
    by the given configurations."""
    if set(rule.alphabet) != set(sigma.alphabet):
        raise ValueError("rule and subshift use different alphabets")
    target = factors(sigma, n)
    try:
        traced = exact_trace_factors(rule, n, budget)
    except BudgetExceeded as exc:
        extra = sampled_soundness(rule, sigma, n, samples, seed, steps, max_period)
        missing = target - realized_factors(rule, realizers, n, steps) if realizers else target
        if extra:
            verdict = "refuted"
        elif missing:
            verdict = "inconclusive"
        else:
            verdict = "no refutation"
        return TraceReport("sampled", n, verdict, _words(missing), _words(extra), samples, seed,
                           len(realizers), f"exact enumeration needs {exc.required} windows")
    missing, extra = target - traced, traced - target
    verdict = "equal" if not missing and not extra else "unequal"
    return TraceReport("exact", n, verdict, _words(missing), _words(extra))
