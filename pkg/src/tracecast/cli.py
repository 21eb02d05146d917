"""Command-line interface: ``tracecast {check,synth,simulate,verify,factors,render}``.

Exit codes: 0 when the checked property holds, 1 when it is refuted or not
found, 2 on bad input.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .ca import BudgetExceeded, PeriodicConfig, exact_trace_factors, render, space_time, trace_periodic
from .fileformats import (
    FormatError,
    atomic_write,
    parse_rule,
    parse_subshift,
    parse_t3_witness,
    read_text,
    t3_witness_text,
    write_rule,
    write_synthesis,
)
from .shiftlang import Sft, factors, higher_block, is_infinite, is_transitive, tokenize_word, word_str
from .synthesis import MacrocellRule, SynthesisError, SynthesisResult, block_recode, synthesize, trace_2sft
from .tracecheck import T3Witness, check_t0, check_t2, check_t3
from .verify import DEFAULT_SAMPLES, DEFAULT_SEED, builtin, compare_trace_language, synthesis_realizers

OK, FAILED, INPUT_ERROR = 0, 1, 2


class UsageError(Exception):
    pass


def _out(text: str) -> None:
    sys.stdout.write(text if text.endswith("\n") else text + "\n")


def _load_subshift(path: str):
    try:
        return parse_subshift(read_text(path))
    except FormatError as exc:
        raise UsageError(f"{path}: {exc}") from None


def _load_rule(args):
    if getattr(args, "builtin", None):
        try:
            return builtin(args.builtin)
        except KeyError as exc:
            raise UsageError(exc.args[0]) from None
    if not args.rule:
        raise UsageError("give a rule file or --builtin NAME")
    try:
        return parse_rule(read_text(args.rule))
    except FormatError as exc:
        raise UsageError(f"{args.rule}: {exc}") from None


def _as_order_two(sft: Sft) -> Sft:
    if sft.order > 2:
        raise UsageError(f"expected an SFT of order at most 2, got order {sft.order}")
    if sft.order == 1:
        letters = [w[0] for w in sft.allowed]
        return Sft(sft.alphabet, 2, frozenset((a, b) for a in letters for b in letters))
    return sft


# -- check ------------------------------------------------------------------


def cmd_check(args) -> int:
    spec = _load_subshift(args.subshift)
    g = spec.graph
    if args.t0:
        phi = check_t0(g)
        _out(f"t0: {'yes' if phi else 'no'}" + (f"\nphi: {phi}" if phi else ""))
        return OK if phi else FAILED
    if args.t3:
        result = check_t3(g, args.bound)
        lines = [f"t3: {result.status.value}", f"bound: {result.bound}"]
        if result.witness:
            lines += [f"phi: {result.witness.phi}", f"w: {word_str(result.witness.word)}",
                      f"witness: {t3_witness_text(result.witness)}"]
        _out("\n".join(lines))
        return OK if result else FAILED
    if args.t2:
        result = check_t2(g)
        lines = [f"t2: {'yes' if result.holds else 'no'}"]
        if result.holds:
            lines.append(f"component: {' '.join(map(str, result.component))}")
        _out("\n".join(lines))
        return OK if result.holds else FAILED
    if args.transitive:
        holds = is_transitive(g)
        _out(f"transitive: {'yes' if holds else 'no'}")
        return OK if holds else FAILED
    holds = is_infinite(g)
    _out(f"infinite: {'yes' if holds else 'no'}")
    return OK if holds else FAILED


# -- synth ------------------------------------------------------------------


def _t1_witness(args, spec) -> Sft:
    if args.t1:
        gamma = _load_subshift(args.t1)
        if gamma.sft is None or gamma.sft.order != 2:
            raise UsageError(f"{args.t1}: the T1 witness must be an SFT of order 2")
        return gamma.sft
    if spec.sft is None:
        raise UsageError("the subshift is not given as an SFT; pass a T1 witness with --t1")
    if spec.sft.order <= 2:
        return block_recode(_as_order_two(spec.sft))
    return higher_block(spec.sft)[0]


def cmd_synth(args) -> int:
    spec = _load_subshift(args.subshift)
    out = Path(args.output)
    if args.mode == "2sft":
        if spec.sft is None:
            raise UsageError("2sft mode needs a subshift given as an SFT")
        try:
            rule = trace_2sft(_as_order_two(spec.sft))
        except SynthesisError as exc:
            _out(f"synthesis failed: {exc}")
            return FAILED
        atomic_write(out, write_rule(rule))
        _out(f"wrote {out} (anchor {rule.anchor}, diameter {rule.diameter})")
        return OK
    gamma = _t1_witness(args, spec)
    if args.t3:
        try:
            phi, word = parse_t3_witness(args.t3, spec.alphabet)
        except FormatError as exc:
            raise UsageError(f"--t3: {exc}") from None
        try:
            t3 = T3Witness(phi, word)
        except ValueError as exc:
            _out(f"synthesis failed: witness check failed: t3 ({exc})")
            return FAILED
    else:
        found = check_t3(spec.graph)
        if not found:
            _out(f"synthesis failed: no T3 witness up to length {found.bound}")
            return FAILED
        t3 = found.witness
    try:
        result = synthesize(spec.graph, gamma, t3)
    except SynthesisError as exc:
        _out(f"synthesis failed: {exc}")
        return FAILED
    rule_path, meta_path = write_synthesis(result, out)
    bs = result.borders
    _out(f"wrote {rule_path} and {meta_path}\n"
         f"k: {bs.k}\nw: {word_str(bs.w)}\nh: {bs.h}\nanchor: {result.rule.anchor}\ndiameter: {result.rule.diameter}")
    return OK


# -- simulate / render ------------------------------------------------------


def _config(text: str, rule) -> PeriodicConfig:
    word, _, phase = text.partition("@")
    try:
        symbols = tokenize_word(word, rule.alphabet)
    except ValueError as exc:
        raise UsageError(f"--config: {exc}") from None
    if not symbols:
        raise UsageError("--config needs a nonempty word")
    try:
        return PeriodicConfig(symbols, int(phase) if phase else 0)
    except ValueError:
        raise UsageError(f"--config: bad phase {phase!r}") from None


def _window(text: str | None, cfg: PeriodicConfig):
    if text is None:
        return len(cfg)
    lo, sep, hi = text.partition(":")
    try:
        return (int(lo), int(hi)) if sep else int(lo)
    except ValueError:
        raise UsageError(f"--window: expected W or LO:HI, got {text!r}") from None


def _diagram(args, fmt: str) -> bytes:
    rule = _load_rule(args)
    cfg = _config(args.config, rule)
    if args.steps < 0:
        raise UsageError("--steps must be nonnegative")
    if getattr(args, "trace", False):
        return (word_str(trace_periodic(rule, cfg, args.steps)) + "\n").encode()
    return render(space_time(rule, cfg, args.steps, _window(args.window, cfg)), fmt)


def _emit(data: bytes, path: str | None) -> None:
    if path:
        atomic_write(Path(path), data)
    else:
        sys.stdout.write(data.decode())


def cmd_simulate(args) -> int:
    _emit(_diagram(args, args.format), args.output)
    return OK


def cmd_render(args) -> int:
    _emit(_diagram(args, args.format), args.output)
    return OK


# -- verify / factors -------------------------------------------------------


def cmd_verify(args) -> int:
    rule = _load_rule(args)
    spec = _load_subshift(args.subshift)
    if set(rule.alphabet) != set(spec.alphabet):
        raise UsageError("rule and subshift alphabets differ")
    realizers = ()
    if isinstance(rule, MacrocellRule):
        realizers = synthesis_realizers(SynthesisResult.from_rule(rule), args.n)
    report = compare_trace_language(rule, spec.graph, args.n, budget=args.budget, samples=args.samples,
                                    seed=args.seed, realizers=realizers, steps=args.steps)
    text = report.to_json() + "\n" if args.format == "json" else report.to_text()
    if args.output:
        atomic_write(Path(args.output), text)
    _out(text if not args.output else f"verdict: {report.verdict}")
    return OK if report.ok else FAILED


def cmd_factors(args) -> int:
    if args.rule or args.builtin:
        rule = _load_rule(args)
        try:
            words = exact_trace_factors(rule, args.n, args.budget)
        except BudgetExceeded as exc:
            _out(f"exact enumeration needs {exc.required} windows, budget is {exc.budget}")
            return FAILED
        alphabet = rule.alphabet
    else:
        if not args.subshift:
            raise UsageError("give a subshift file, a rule file (--rule) or --builtin NAME")
        spec = _load_subshift(args.subshift)
        words, alphabet = factors(spec.subshift, args.n), spec.alphabet
    ordered = sorted(words, key=alphabet.sort_key)
    if args.json:
        _out(json.dumps([word_str(w) for w in ordered]))
    else:
        _out("\n".join(word_str(w) for w in ordered) or "(none)")
    return OK


# -- parser -----------------------------------------------------------------


def _rule_source(p: argparse.ArgumentParser, positional: bool = True) -> None:
    if positional:
        p.add_argument("rule", nargs="?", help="rule file")
    p.add_argument("--builtin", help="use a named built-in rule instead of a file")


def _diagram_args(p: argparse.ArgumentParser, default_format: str) -> None:
    _rule_source(p)
    p.add_argument("--config", required=True, help="periodic configuration WORD[@PHASE]")
    p.add_argument("--steps", type=int, default=10)
    p.add_argument("--window", help="W (cells 0..W-1) or LO:HI; default one period")
    p.add_argument("--format", choices=("text", "pgm"), default=default_format)
    p.add_argument("-o", "--output", help="output file (default: stdout)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="tracecast", description="Trace subshifts of cellular automata.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("check", help="decide a property of a subshift")
    p.add_argument("subshift")
    group = p.add_mutually_exclusive_group(required=True)
    for flag in ("t0", "t2", "t3", "transitive", "infinite"):
        group.add_argument(f"--{flag}", action="store_true")
    p.add_argument("--bound", type=int, help="longest w tried by --t3")
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("synth", help="synthesize a rule tracing the subshift")
    p.add_argument("subshift")
    p.add_argument("--mode", choices=("2sft", "full"), default="full")
    p.add_argument("--t1", help="subshift file of an order-2 SFT over blocks")
    p.add_argument("--t3", help="witness such as 'phi:0->0,1->0;w:1' (default: search)")
    p.add_argument("-o", "--output", required=True)
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("simulate", help="space-time diagram or trace of a periodic configuration")
    _diagram_args(p, "text")
    p.add_argument("--trace", action="store_true", help="print the column-0 trace instead")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("render", help="write a space-time diagram")
    _diagram_args(p, "pgm")
    p.set_defaults(func=cmd_render)

    p = sub.add_parser("verify", help="compare a rule's trace factors with a subshift")
    _rule_source(p)
    p.add_argument("subshift")
    p.add_argument("-n", type=int, required=True)
    p.add_argument("--budget", type=int, help="max enumerated windows (default TRACECAST_BUDGET)")
    p.add_argument("--samples", type=int, default=DEFAULT_SAMPLES)
    p.add_argument("--seed", type=int, default=DEFAULT_SEED)
    p.add_argument("--steps", type=int, default=200)
    p.add_argument("--format", choices=("text", "json"), default="text")
    p.add_argument("-o", "--output", help="report file")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("factors", help="list length-n factors of a subshift or trace")
    p.add_argument("subshift", nargs="?")
    p.add_argument("-n", type=int, required=True)
    p.add_argument("--rule", help="rule file; lists exact trace factors")
    p.add_argument("--builtin")
    p.add_argument("--budget", type=int)
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_factors)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        sys.stderr.write(f"tracecast: {exc}\n")
        return INPUT_ERROR
    except (OSError, ValueError) as exc:
        sys.stderr.write(f"tracecast: {exc}\n")
        return INPUT_ERROR
