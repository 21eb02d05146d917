from itertools import product

import numpy as np
import pytest
from conftest import BINARY, EXAMPLES, golden_mean, sigma_prime_gamma

import oracles
from tracecast.ca import PeriodicConfig, exact_trace_factors, trace_periodic
from tracecast.shiftlang import (
    Alphabet,
    BlockAlphabet,
    BlockMap,
    SoficGraph,
    Sft,
    UPWord,
    compile_text,
    equal,
    image_graph,
    rotations,
    word_str,
)
from tracecast.synthesis import (
    SynthesisError,
    WitnessError,
    block_recode,
    border_step,
    clock,
    edge_shift_cover,
    is_freezing,
    macro_delta,
    make_borders,
    multi,
    phase_windows,
    successor_choice,
    synthesize,
    t1_report,
    t2_to_t1,
    theta_member,
    trace_2sft,
)
from tracecast.tracecheck import PhiMap, T3Witness, check_t3


def w(text):
    return tuple(text)


def blocks_of(*texts):
    k = len(texts[0])
    return BlockAlphabet(BINARY, k, tuple(tuple(t) for t in texts))


ONE = PhiMap.constant(BINARY, "1")
ZERO = PhiMap.constant(BINARY, "0")


# -- tracing a 2-SFT -------------------------------------------------------------


def table(rule):
    return {a + b: rule((a, b)) for a in "01" for b in "01"}


def test_trace_2sft_tables():
    alternating = Sft.from_forbidden(BINARY, ["00", "11"])
    assert table(trace_2sft(alternating)) == {"00": "1", "01": "1", "10": "0", "11": "0"}
    assert table(trace_2sft(Sft.full(BINARY, 2))) == {"00": "0", "01": "1", "10": "0", "11": "1"}
    assert table(trace_2sft(golden_mean())) == {"00": "0", "01": "1", "10": "0", "11": "0"}


def test_successor_choice_errors():
    with pytest.raises(SynthesisError):
        successor_choice(Sft.full(BINARY, 3))


def test_trace_2sft_alternating_cone_factors():
    rule = trace_2sft(Sft.from_forbidden(BINARY, ["00", "11"]))
    assert {word_str(x) for x in exact_trace_factors(rule, 8)} == {"01010101", "10101010"}


@pytest.mark.parametrize(
    "allowed",
    [("00", "01", "10"), ("01", "10"), ("00", "01", "11"), ("00", "01", "10", "11"), ("01", "10", "11")],
)
def test_trace_2sft_exact_language(allowed):
    pairs = {w(a) for a in allowed}
    s = Sft(BINARY, 2, frozenset(pairs))
    rule = trace_2sft(s)
    for n in range(1, 9):
        assert exact_trace_factors(rule, n) == oracles.sft_factors("01", pairs, 2, n), n


@pytest.mark.parametrize("period", ["0", "01", "001", "0010", "00100"])
def test_trace_2sft_reproduces_elements(period):
    rule = trace_2sft(golden_mean())
    z = PeriodicConfig(w(period))
    assert trace_periodic(rule, z, 20) == oracles.up_prefix("", period, 21)


def test_block_recode():
    recoded = block_recode(golden_mean())
    assert set(recoded.alphabet) == {("0",), ("1",)}
    assert (("1",), ("1",)) not in recoded.allowed


# -- clock and multi-encoding ----------------------------------------------------


def test_clock_two_blocks():
    ck = clock(blocks_of("00", "10"))
    assert [word_str(t) for t in ck.ticks] == ["000010", "000100", "001000", "000001"]


def test_clock_letters():
    ck = clock(blocks_of("0", "1"))
    assert [word_str(t) for t in ck.ticks] == ["001", "010"]


def test_clock_needs_two_blocks():
    with pytest.raises(SynthesisError):
        clock(blocks_of("01"))


@pytest.mark.parametrize("texts", [("0", "1"), ("00", "10"), ("001", "010", "100"), ("000", "010"), ("011", "110")])
def test_clock_columns_are_shifted_block_sequences(texts):
    ba = blocks_of(*texts)
    ck = clock(ba)
    n = ck.n
    assert len(set(ck.ticks)) == 2 * n
    u, uv = "".join(ck.u), "".join(ck.u + ck.v)
    for q in range(2 * n):
        for p in range(3 * n):
            col = "".join(ck.column(q, p, 6 * n))
            shifts = {oracles.up_prefix("", u, 12 * n)[s:][: 6 * n] for s in range(n)}
            shifts |= {oracles.up_prefix("", uv, 12 * n)[s:][: 6 * n] for s in range(2 * n)}
            assert tuple(col) in shifts


def test_phase_windows():
    assert {word_str(x) for x in phase_windows(blocks_of("00", "10"), 1)} == {"00", "01"}


def psi_oracle(texts):
    """Length-n windows of Psi, straight from the definition: column p at time q
    is a length-n factor of sigma^((q-p) mod n) applied to two blocks, and the
    clock columns carry H(q), H(q+1), ..."""
    n = len(texts[0])
    ticks = clock(blocks_of(*texts)).ticks
    out = set()
    for q in range(2 * n):
        per_column = []
        for p in range(n):
            s = (q - p) % n
            per_column.append({(b + c)[s : s + n] for b in texts for c in texts})
        for cols in product(*per_column):
            out.add(tuple(tuple(c[j] for c in cols) + ticks[(q + j) % (2 * n)] for j in range(n)))
    return out


@pytest.mark.parametrize("texts", [("0", "1"), ("00", "10")])
def test_psi_windows_match_definition(texts):
    enc = multi(blocks_of(*texts))
    assert set(enc.psi.allowed) == psi_oracle(texts)
    if len(texts[0]) == 1:
        assert len(enc.psi.alphabet) == 4


@pytest.mark.parametrize("texts,seq", [(("0", "1"), ["0", "1"]), (("00", "10"), ["00", "10", "10"])])
def test_multi_encoding_decodes(texts, seq):
    enc = multi(blocks_of(*texts))
    n = len(texts[0])
    for q in range(n):
        x = enc.encode([w(s) for s in seq], q, length=len(seq) * n * 3)
        assert all(x[i : i + n] in enc.psi.allowed for i in range(len(x) - n + 1))
        decoded = [word_str(b) for b in enc.decoder.apply(x)]
        assert decoded == [seq[j % len(seq)] for j in range(len(decoded))]


def test_shifted_encoding_changes_phase():
    enc = multi(blocks_of("00", "10"))
    seq = [w("00"), w("10"), w("10")]
    x0 = enc.encode(seq, 0, length=12)
    x1 = enc.encode(seq, 1, length=12)
    # the clock columns of sigma(x0) read H(1), H(2), ...
    assert [s[2:] for s in x0[1:]] == [s[2:] for s in x1[:-1]]


# -- T2 to T1 --------------------------------------------------------------------


def test_t2_to_t1_golden_mean():
    sigma = golden_mean().graph
    ba = blocks_of("00", "10")
    cover = Sft(ba.alphabet, 2, frozenset((a, b) for a in ba.blocks for b in ba.blocks) - {(w("10"), w("10"))})
    factor = BlockMap.letter_map(ba.alphabet, BINARY, {w("00"): "0", w("10"): "1"})
    assert equal(image_graph(cover, factor), sigma)
    result = t2_to_t1(sigma, cover, factor)
    assert result.valid and result.gamma.order == 2
    assert t1_report(result.gamma, sigma) == (True, True)


def test_t2_to_t1_full_shift_edge_cover():
    sigma = SoficGraph.full_shift(BINARY)
    cover, factor = edge_shift_cover(sigma, blocks_of("0", "1"))
    result = t2_to_t1(sigma, cover, factor)
    assert result.valid


def test_t2_to_t1_rejects_bad_cover():
    sigma = golden_mean().graph
    ba = blocks_of("01", "11")
    cover = Sft.full(ba.alphabet, 2)
    factor = BlockMap.letter_map(ba.alphabet, BINARY, {w("01"): "0", w("11"): "1"})
    with pytest.raises(SynthesisError, match="cover invalid"):
        t2_to_t1(sigma, cover, factor)


def test_edge_cover_needs_enough_blocks():
    with pytest.raises(SynthesisError):
        edge_shift_cover(golden_mean().graph, blocks_of("0", "1"))


def test_sigma_prime_gamma_is_t1_witness():
    sigma = compile_text(EXAMPLES["sigma_prime"], BINARY)
    assert t1_report(sigma_prime_gamma(), sigma) == (True, True)


# -- freezing words and borders ------------------------------------------------


def test_is_freezing_examples():
    assert is_freezing([w("1001111")], 4)
    assert not is_freezing([w("00")], 1)
    assert is_freezing([w("01")], 1)
    with pytest.raises(ValueError):
        is_freezing([w("0"), w("01")], 1)


def test_is_freezing_matches_oracle():
    rng = np.random.default_rng(0)
    for _ in range(200):
        size = int(rng.integers(2, 7))
        words = {"".join(rng.choice(["0", "1"], size)) for _ in range(int(rng.integers(1, 4)))}
        k = int(rng.integers(1, size))
        assert is_freezing([w(x) for x in words], k) == (not oracles.overlaps(words, k))


def test_borders_single_letter_witness():
    bs = make_borders(1, w("0"), ONE)
    assert [word_str(b) for b in bs.upsilon] == ["1001111"]
    assert (bs.l, bs.h) == (7, 8)


def test_borders_two_letter_witness():
    bs = make_borders(1, w("01"), ONE)
    assert {word_str(b) for b in bs.upsilon} == {"1101101111111", "1110011111111"}
    assert (bs.l, bs.h) == (13, 14)


@pytest.mark.parametrize("k,word,phi", [(1, "0", ONE), (1, "01", ONE), (2, "1", ZERO), (1, "01", ZERO), (3, "011", ZERO)])
def test_borders_match_oracle(k, word, phi):
    bs = make_borders(k, w(word), phi)
    expected = oracles.borders("01", k, word, phi.as_dict())
    assert [word_str(b) for b in bs.upsilon] == expected
    assert len(bs.upsilon) == len(phi.image()) * len(set(rotations(w(word))))
    assert not oracles.overlaps(expected, k + 3 * len(word))


def test_borders_reject_witness_inside_image():
    with pytest.raises(SynthesisError):
        make_borders(1, w("11"), ONE)


def test_border_step():
    bs = make_borders(1, w("0"), ONE)
    assert border_step(bs, w("1001111")) == w("1001111")
    bs2 = make_borders(1, w("01"), ONE)
    assert word_str(border_step(bs2, w("1101101111111"))) == "1110011111111"
    with pytest.raises(SynthesisError):
        border_step(bs, w("1111111"))


def test_border_step_closed():
    for k, word, phi in [(1, "01", ONE), (2, "011", ZERO), (1, "0", ONE)]:
        bs = make_borders(k, w(word), phi)
        assert {border_step(bs, b) for b in bs.upsilon} <= set(bs.upsilon)


# -- Theta and macro steps ---------------------------------------------------------


def small_system():
    return make_borders(1, w("0"), ONE)


def test_theta_member_examples():
    bs = small_system()
    assert theta_member(bs, w("0" + "1001111" + "1" * 8))
    assert not theta_member(bs, w("1" * 16))
    with pytest.raises(ValueError):
        theta_member(bs, w("0"))


def test_double_macrocells_are_in_theta():
    bs = small_system()
    blocks, ups = ["0", "1"], ["1001111"]
    for b1, u1, b2, u2 in product(blocks, ups, blocks, ups):
        word = b1 + u1 + b2 + u2
        assert theta_member(bs, w(word))
        assert oracles.theta(word, blocks, set(ups), 8)


def test_theta_matches_oracle_on_random_words():
    bs = make_borders(1, w("01"), ONE)
    ups = {word_str(b) for b in bs.upsilon}
    rng = np.random.default_rng(4)
    hits = 0
    for _ in range(2000):
        b = rng.choice(["0", "1"])
        u = rng.choice(sorted(ups))
        tail = "".join(rng.choice(["0", "1"], 14))
        if rng.random() < 0.5:
            tail = rng.choice(["0", "1"]) + rng.choice(sorted(ups)) if rng.random() < 0.5 else tail
        word = (b + u + tail) if rng.random() < 0.8 else "".join(rng.choice(["0", "1"], 28))
        expected = oracles.theta(word, ["0", "1"], ups, 14)
        hits += expected
        assert theta_member(bs, w(word)) == expected
    assert hits > 100


def test_macro_delta_branches():
    bs = small_system()
    g = trace_2sft(Sft.from_forbidden(Alphabet(((("0",), ("1",)))), [(("1",), ("1",))]))
    border = "1001111"
    # neighbor is a macrocell: g reads the neighbor's block
    sim = macro_delta(bs, g, w("0" + border + "1" + border + "0" + border))
    assert word_str(sim) == "1" + border
    # corrupted neighbor: g reads the cell's own block twice
    mono = macro_delta(bs, g, w("0" + border + "1" + "1" * 7 + "0" * 8))
    assert word_str(mono) == "0" + border
    assert bs.is_macrocell(sim) and bs.is_macrocell(mono)
    with pytest.raises(SynthesisError):
        macro_delta(bs, g, w("1" * 24))


# -- the macrocell rule ---------------------------------------------------------


def test_golden_mean_sizes(golden_result):
    rule = golden_result.rule
    assert golden_result.borders.h == 14
    assert (rule.anchor, rule.diameter) == (13, 55)
    assert word_str(golden_result.borders.w) == "01"


def test_sigma_prime_sizes(sigma_prime_result):
    bs = sigma_prime_result.borders
    assert (bs.k, bs.l, bs.h) == (2, 8, 10)
    assert (sigma_prime_result.rule.anchor, sigma_prime_result.rule.diameter) == (9, 39)


def test_microdefault_on_uniform_window():
    bs = small_system()
    full = SoficGraph.full_shift(BINARY)
    rule = synthesize(full, block_recode(Sft.full(BINARY, 2)), T3Witness(ONE, w("0"))).rule
    assert rule.borders.upsilon == bs.upsilon
    assert rule(w("1" * rule.diameter)) == "1"
    assert rule(w("0" * rule.diameter)) == "1"


@pytest.mark.parametrize("fixture", ["golden_result", "sigma_prime_result"])
def test_vectorized_rule_matches_literal(fixture, request):
    result = request.getfixturevalue(fixture)
    rule = result.rule
    rng = np.random.default_rng(9)
    from tracecast.verify import stability_windows

    x = stability_windows(result, 60, 3, rule.diameter + 20)
    fast = rule.image_indices(x)
    for r in range(len(x)):
        row = rule.alphabet.decode(x[r])
        for c in rng.choice(fast.shape[1], 6, replace=False):
            assert rule.alphabet.symbols[fast[r, c]] == rule(row[c : c + rule.diameter])


def test_valid_encoding_simulates_inner_rule(sigma_prime_result):
    result = sigma_prime_result
    rule, h, m = result.rule, result.borders.h, result.rule.anchor
    y = [w("01"), w("10"), w("00")]
    x = result.encode(y) * 3
    ext = x[-m:] + x + x[: rule.diameter]
    from tracecast.ca import apply_to_word

    out = apply_to_word(rule, ext)[: len(x)]
    for i in range(len(y)):
        got = out[i * h : i * h + 2]
        assert got == result.inner((y[i], y[(i + 1) % len(y)]))


def test_neighbor_beyond_short_window_changes_output(sigma_prime_result):
    """A window of 3h-1 cells around a macrocell cannot tell whether its right
    neighbor is itself in Theta: a fake macrocell 8 cells after the neighbor's
    start (more than the 5-cell freezing depth) sits partly beyond it."""
    result = sigma_prime_result
    rule, bs = result.rule, result.borders
    h = bs.h
    border = word_str(bs.upsilon[0])
    assert border == "01100000"
    assert result.inner((w("01"), w("01"))) == w("01")
    assert result.inner((w("01"), w("10"))) == w("10")
    pad = "1" * (h - 1)
    # the neighbor's border ends in 00, which doubles as the block of a second
    # macrocell starting 8 cells after the neighbor
    head = pad + "01" + border + "10" + border
    crowded = head + border + "11"
    clear = head + "1" * 8 + "11"
    assert len(crowded) == len(clear) == rule.diameter == 4 * h - 1
    assert crowded[: 3 * h - 1] == clear[: 3 * h - 1]
    neighbor = slice(h - 1 + h, h - 1 + 3 * h)
    assert not theta_member(bs, w(crowded[neighbor]))
    assert theta_member(bs, w(clear[neighbor]))
    assert rule(w(crowded)) == "0"  # g(01, 01) starts with 0
    assert rule(w(clear)) == "1"  # g(01, 10) starts with 1


# -- synthesize -------------------------------------------------------------------


def test_witness_errors():
    sigma = golden_mean().graph
    gamma = block_recode(golden_mean())
    good = check_t3(sigma).witness
    with pytest.raises(WitnessError, match="t1 order"):
        synthesize(sigma, block_recode(Sft.from_forbidden(BINARY, ["111"])), good)
    with pytest.raises(WitnessError, match="t1 first projection"):
        synthesize(sigma, block_recode(Sft.full(BINARY, 2)), good)
    with pytest.raises(WitnessError, match="t3 phi"):
        synthesize(sigma, gamma, T3Witness(ONE, w("01")))
    with pytest.raises(WitnessError, match="t3 word"):
        synthesize(sigma, gamma, T3Witness(ZERO, w("1")))


def test_sigma_prime_all_projections_checked():
    sigma = compile_text(EXAMPLES["sigma_prime"], BINARY)
    ba = Alphabet((w("01"), w("11"), w("00")))
    x, y, z = ba.symbols
    # first projection is right but the second column adds 1^w
    gamma = Sft(ba, 2, frozenset({(x, y), (y, y), (y, z), (z, z)}))
    with pytest.raises(WitnessError):
        synthesize(sigma, gamma, T3Witness(ZERO, w("1")))


def test_metadata(golden_result):
    meta = golden_result.metadata()
    assert meta["construction"] == "macrocell"
    assert (meta["k"], meta["w"], meta["h"], meta["l"], meta["diameter"], meta["anchor"]) == (1, "01", 14, 13, 55, 13)
    assert meta["phi"] == {"0": "0", "1": "0"}
    assert meta["inner"]["1 1"] == "0"
    assert '"borders": 2' in golden_result.metadata_json()


def test_encode_rejects_unknown_block(sigma_prime_result):
    with pytest.raises(SynthesisError):
        sigma_prime_result.encode([w("0")])


def test_border_columns_stay_in_subshift(golden_result):
    from tracecast.verify import border_columns

    cols = border_columns(golden_result.borders)
    allowed = {("0", "0"), ("0", "1"), ("1", "0")}
    for z in cols.values():
        prefix = z.prefix(40)
        assert all(prefix[i : i + 2] in allowed for i in range(39))
    assert UPWord.periodic(w("0")) in cols.values()
