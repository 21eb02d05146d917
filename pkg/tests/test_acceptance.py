"""The eleven acceptance criteria, each with its time limit.

Every test prints one ``PASS``/``FAIL`` line (with its runtime) even when
output capture is on.  Run directly with ``python tests/test_acceptance.py``.
"""

import time
from contextlib import contextmanager
from itertools import product

import numpy as np
import pytest
from conftest import BINARY, EXAMPLES, FIXTURES, golden_mean, sigma_prime_gamma

from tracecast.ca import exact_trace_factors
from tracecast.fileformats import parse_rule
from tracecast.shiftlang import (
    BlockAlphabet,
    Sft,
    UPWord,
    compile_text,
    equal,
    factors,
    higher_block,
    is_infinite,
    member_up,
    project,
    project_all,
    rotations,
)
from tracecast.synthesis import (
    block_recode,
    clock,
    is_freezing,
    make_borders,
    synthesize,
    theta_member,
    trace_2sft,
)
from tracecast.tracecheck import PhiMap, T3Status, check_t0, check_t3, is_t0_map
from tracecast.verify import (
    BUILTINS,
    border_columns,
    builtin,
    clmctrx_check,
    compare_trace_language,
    induced_sft,
    realized_factors,
    simulation_check,
    stability_check,
    synthesis_realizers,
)
from tracecast.verify.builtins import PARTICLE_TABLE


@pytest.fixture
def criterion(capsys):
    @contextmanager
    def run(number, title, limit):
        start = time.perf_counter()
        status = "FAIL"
        try:
            yield
            status = "PASS"
        finally:
            elapsed = time.perf_counter() - start
            if status == "PASS" and elapsed > limit:
                status = "FAIL"
            with capsys.disabled():
                print(f"\n{status} criterion {number:>2}: {title} ({elapsed:.2f} s, limit {limit:g} s)")
        assert elapsed <= limit, f"took {elapsed:.2f} s, limit {limit} s"

    return run


def w(text):
    return tuple(text)


def test_criterion_01_two_sft_tracing(criterion):
    with criterion(1, "2-SFT tracing rule is exact at n=8", 2.0):
        for forbidden in (["11"], ["00", "11"]):
            sigma = Sft.from_forbidden(BINARY, forbidden)
            report = compare_trace_language(trace_2sft(sigma), sigma.graph, 8)
            assert (report.mode, report.verdict) == ("exact", "equal"), forbidden


def test_criterion_02_t0_t3_examples(criterion):
    with criterion(2, "T0/T3 verdicts of the worked examples", 1.0):
        alternating = compile_text(EXAMPLES["alternating"], BINARY)
        zeros_ones = compile_text(EXAMPLES["zeros_then_ones"], BINARY)
        rotations_001 = compile_text(EXAMPLES["rotations_001"], BINARY)
        one = PhiMap.constant(BINARY, "1")

        phi = check_t0(alternating)
        assert phi is not None and phi.as_dict() == {"0": "1", "1": "0"}
        assert not is_infinite(alternating)
        assert check_t3(alternating, max_w_len=4).status is T3Status.NOT_FOUND_UP_TO_BOUND

        assert check_t0(zeros_ones) is not None and is_t0_map(zeros_ones, one)
        assert is_infinite(zeros_ones)
        found = check_t3(zeros_ones)
        assert found.status is T3Status.FOUND
        assert (found.witness.phi, found.witness.word) == (one, w("0"))

        assert check_t0(rotations_001) is None
        assert not is_infinite(rotations_001)
        assert check_t3(rotations_001).status is T3Status.NOT_T0


def test_criterion_03_clock(criterion):
    with criterion(3, "clock ticks injective, columns are shifted block sequences", 1.0):
        for texts in (("00", "10"), ("0", "1")):
            ba = BlockAlphabet(BINARY, len(texts[0]), tuple(w(t) for t in texts))
            ck = clock(ba)
            n = ck.n
            assert len(set(ck.ticks)) == 2 * n
            u, uv = ck.u, ck.u + ck.v
            for q in range(2 * n):
                for p in range(3 * n):
                    col = UPWord.periodic(ck.column(q, p, 2 * n))
                    assert col in {UPWord.periodic(r) for r in rotations(u)} | {UPWord.periodic(r) for r in rotations(uv)}


def test_criterion_04_borders(criterion):
    with criterion(4, "border words: freezing, outside phi(A), BUBU in Theta, columns in the subshift", 5.0):
        one = PhiMap.constant(BINARY, "1")
        targets = {
            "0": compile_text(EXAMPLES["zeros_then_ones"], BINARY),
            "01": compile_text("(01)^w + 1^w", BINARY),
        }
        for word, sigma in targets.items():
            bs = make_borders(1, w(word), one)
            assert is_freezing(bs.upsilon, bs.k + 3 * len(bs.w))
            assert all(set(b) - one.image() for b in bs.upsilon)
            for b1, u1, b2, u2 in product(bs.blocks.blocks, bs.upsilon, bs.blocks.blocks, bs.upsilon):
                assert theta_member(bs, b1 + u1 + b2 + u2)
            assert all(member_up(sigma, z) for z in border_columns(bs).values())


def test_criterion_05_simulation(criterion, golden_result):
    with criterion(5, "encoded configurations simulate the inner rule (period <= 3, t = 30)", 30.0):
        blocks = golden_result.borders.blocks.blocks
        for p in range(1, 4):
            for y in product(blocks, repeat=p):
                assert simulation_check(golden_result, y, 30), y


def test_criterion_06_stability(criterion, golden_result):
    with criterion(6, "Theta preimage and stability on 10^4 seeded samples", 60.0):
        report = stability_check(golden_result, samples=10_000, seed=1)
        assert report.ok, report.to_json()


def test_criterion_07_full_pipeline(criterion, sigma_prime_result):
    with criterion(7, "synthesized rule for (0*1+1*)0^w: sampled soundness n=8, completeness n<=6", 120.0):
        sigma = compile_text(EXAMPLES["sigma_prime"], BINARY)
        rule = sigma_prime_result.rule
        report = compare_trace_language(rule, sigma, 8, samples=10_000, seed=1, steps=200, max_period=64,
                                        realizers=synthesis_realizers(sigma_prime_result, 8))
        assert report.mode == "sampled" and report.extra == [], report.to_text()
        realizers = synthesis_realizers(sigma_prime_result, 6)
        for n in range(1, 7):
            assert factors(sigma, n) <= realized_factors(rule, realizers, n, 200), n


def test_criterion_08_particles(criterion):
    with criterion(8, "bouncing particle traces for p, q <= 3; golden rule file", 5.0):
        for p in range(4):
            for q in range(4):
                assert clmctrx_check(p, q, 4 * (p + q + 1)), (p, q)
        golden = (FIXTURES / "particle.rule").read_text()
        rows = [line.split(":", 1)[1].split("->") for line in golden.splitlines() if line.startswith("map:")]
        assert [(a.strip(), b.strip()) for a, b in rows] == list(PARTICLE_TABLE)
        assert parse_rule(golden) == builtin("particle")


def test_criterion_09_non_t3(criterion):
    with criterion(9, "non-T3 rule: four periodic traces, T0 but no T3 witness up to 4", 60.0):
        rule = builtin("non_t3")
        assert {"".join(x) for x in exact_trace_factors(rule, 4)} == {"0000", "1111", "0101", "1010"}
        induced = induced_sft(rule, 4)
        assert check_t0(induced) is not None
        assert check_t3(induced, max_w_len=4).status is T3Status.NOT_FOUND_UP_TO_BOUND


def test_criterion_10_trace_subshifts_are_t0(criterion):
    with criterion(10, "every exactly enumerable trace subshift is T0", 120.0):
        rules = [builtin(name) for name in sorted(BUILTINS)]
        rules += [trace_2sft(golden_mean()), trace_2sft(Sft.from_forbidden(BINARY, ["00", "11"]))]
        for rule in rules:
            assert check_t0(induced_sft(rule, 4)) is not None, rule


def test_criterion_11_higher_block_projections(criterion):
    with criterion(11, "projections of the 2-block recoding give back the SFT", 10.0):
        rng = np.random.default_rng(2024)
        done = 0
        while done < 3:
            k = int(rng.integers(1, 4))
            blocks = list(product("01", repeat=k))
            keep = rng.random(len(blocks)) < 0.7
            s = Sft(BINARY, k, frozenset(b for b, kept in zip(blocks, keep) if kept))
            if s.is_empty:
                continue
            g2, _ = higher_block(s)
            assert equal(project_all(g2, BINARY), s.graph)
            assert equal(project(g2, 0, BINARY), s.graph)
            done += 1


def test_shipped_block_witness_is_valid():
    # the order-2 block SFT used for criterion 7 has both projections equal to the target
    sigma = compile_text(EXAMPLES["sigma_prime"], BINARY)
    gamma = sigma_prime_gamma()
    assert equal(project(gamma, 0, BINARY), sigma) and equal(project_all(gamma, BINARY), sigma)
    assert synthesize(sigma, gamma, check_t3(sigma).witness).borders.h == 10
    assert block_recode(golden_mean()).order == 2


if __name__ == "__main__":
    raise SystemExit(pytest.main([__file__, "-q"]))
