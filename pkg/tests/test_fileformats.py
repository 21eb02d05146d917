import json

import pytest
from conftest import BINARY, EXAMPLES, FIXTURES, golden_mean, sigma_prime_gamma

from tracecast.ca import TableRule
from tracecast.fileformats import (
    FormatError,
    atomic_write,
    parse_phi,
    parse_rule,
    parse_subshift,
    parse_t3_witness,
    phi_text,
    t3_witness_text,
    write_rule,
    write_subshift,
    write_synthesis,
)
from tracecast.shiftlang import Alphabet, SoficGraph, Sft, compile_text, equal
from tracecast.synthesis import MacrocellRule
from tracecast.tracecheck import PhiMap, T3Witness
from tracecast.verify import BUILTINS, builtin

# -- subshifts -----------------------------------------------------------------


def test_parse_sft():
    spec = parse_subshift((FIXTURES / "golden_mean.sub").read_text())
    assert spec.kind == "sft" and spec.sft == golden_mean()


def test_parse_expr():
    spec = parse_subshift((FIXTURES / "sigma_prime.sub").read_text())
    assert spec.kind == "expr"
    assert equal(spec.graph, compile_text(EXAMPLES["sigma_prime"], BINARY))


def test_parse_allowed_words_and_blocks():
    spec = parse_subshift((FIXTURES / "sigma_prime_gamma.sub").read_text())
    assert spec.sft.order == 2 and len(spec.sft.allowed) == 6
    assert ("0", "1") in spec.alphabet


@pytest.mark.parametrize(
    "obj",
    [golden_mean(), Sft.from_forbidden(BINARY, ["111", "010"]), Sft.full(BINARY, 1), sigma_prime_gamma(),
     SoficGraph.full_shift(BINARY), compile_text(EXAMPLES["rotations_001"], BINARY)],
    ids=["golden", "order3", "full", "blocks", "full-graph", "rotations"],
)
def test_subshift_round_trip(obj):
    back = parse_subshift(write_subshift(obj)).subshift
    left = obj.graph if isinstance(obj, Sft) else obj
    right = back.graph if isinstance(back, Sft) else back
    assert equal(left, right)
    if isinstance(obj, Sft):
        assert back.essential().allowed == obj.essential().allowed


def test_expr_spec_round_trip():
    spec = parse_subshift("alphabet: 0 1\nkind: expr\nexpr: (1+e)(01)^w\n")
    assert write_subshift(spec) == "alphabet: 0 1\nkind: expr\nexpr: (1+e)(01)^w\n"


def test_multi_character_symbols():
    text = "alphabet: ab cd\nkind: sft\norder: 2\nforbidden: cd cd\n"
    spec = parse_subshift(text)
    assert ("cd", "cd") not in spec.sft.allowed and len(spec.sft.allowed) == 3
    assert equal(parse_subshift(write_subshift(spec.sft)).graph, spec.graph)


@pytest.mark.parametrize(
    "text,line",
    [
        ("alphabet: 0 1\nkind: sft\norder: 2\nforbidden: 12\n", 4),
        ("alphabet: 0 1\nkind: sft\norder: x\n", 3),
        ("alphabet: 0 1\nkind: blob\n", 2),
        ("alphabet: 0 1\nkind: expr\nexpr: (01\n", 3),
        ("alphabet: 0 1\nkind: graph\nedge: p 0\n", 3),
        ("alphabet: 0 1\n\n# comment\nwhat: 1\n", 4),
        ("alphabet: 0 1\nalphabet: 0 1\n", 2),
        ("alphabet: 0 1\nkind: sft\norder: 2\nforbidden: 111\n", 4),
    ],
)
def test_subshift_errors_carry_line_numbers(text, line):
    with pytest.raises(FormatError) as info:
        parse_subshift(text)
    assert info.value.line == line


def test_missing_alphabet():
    with pytest.raises(FormatError, match="alphabet"):
        parse_subshift("kind: sft\n")


# -- maps and witnesses --------------------------------------------------------


def test_phi_text():
    phi = parse_phi("0->1,1->0", BINARY)
    assert phi_text(phi) == "0->1 1->0"
    assert parse_phi("1->0", BINARY) == PhiMap.from_dict(BINARY, {"0": "0", "1": "0"})
    with pytest.raises(FormatError):
        parse_phi("0=1", BINARY)
    with pytest.raises(FormatError):
        parse_phi("0->2", BINARY)


def test_t3_witness_round_trip():
    phi, word = parse_t3_witness("phi:0->0,1->0;w:1", BINARY)
    t3 = T3Witness(phi, word)
    assert t3_witness_text(t3) == "phi:0->0,1->0;w:1"
    with pytest.raises(FormatError):
        parse_t3_witness("phi:0->0", BINARY)
    with pytest.raises(FormatError):
        parse_t3_witness("phi:0->0;w:2", BINARY)


# -- rules ---------------------------------------------------------------------


def test_particle_golden_file():
    assert parse_rule((FIXTURES / "particle.rule").read_text()) == builtin("particle")


def test_non_t3_golden_file():
    assert parse_rule((FIXTURES / "non_t3.rule").read_text()) == builtin("non_t3")


@pytest.mark.parametrize("name", sorted(BUILTINS))
def test_builtin_rule_round_trip(name):
    rule = builtin(name)
    text = write_rule(rule)
    assert parse_rule(text) == rule
    assert write_rule(parse_rule(text)) == text


def test_phi_default_is_chosen_when_shorter():
    rule = TableRule.from_function(BINARY, 0, 2, lambda w: "0")
    text = write_rule(rule)
    assert "default: phi 0->0 1->0" in text and "map:" not in text
    assert parse_rule(text) == rule


def test_rule_wildcards_first_match():
    text = "alphabet: 0 1\nanchor: 0\ndiameter: 2\nmap: 1? -> 0\nmap: ?1 -> 1\n"
    rule = parse_rule(text)
    assert rule(("1", "1")) == "0" and rule(("0", "1")) == "1" and rule(("0", "0")) == "0"


@pytest.mark.parametrize(
    "text,line",
    [
        ("alphabet: 0 1\nanchor: 0\ndiameter: 2\nmap: 1 -> 0\n", 4),
        ("alphabet: 0 1\nanchor: 0\ndiameter: 2\nmap: 12 -> 0\n", 4),
        ("alphabet: 0 1\nanchor: 0\ndiameter: 2\nmap: 11 -> 2\n", 4),
        ("alphabet: 0 1\nanchor: 0\ndiameter: 2\nmap: 11 0\n", 4),
        ("alphabet: 0 1\nanchor: 0\ndiameter: 0\n", 3),
        ("alphabet: 0 1\nanchor: 0\ndiameter: 1\ndefault: zero\n", 4),
        ("alphabet: 0 1\nanchor: 0\ndiameter: 1\nconstruction: magic\n", 4),
    ],
)
def test_rule_errors_carry_line_numbers(text, line):
    with pytest.raises(FormatError) as info:
        parse_rule(text)
    assert info.value.line == line


def test_missing_rule_field():
    with pytest.raises(FormatError, match="anchor"):
        parse_rule("alphabet: 0 1\ndiameter: 1\n")


# -- synthesized rules ----------------------------------------------------------


def test_macrocell_rule_round_trip(sigma_prime_result):
    text = write_rule(sigma_prime_result.rule)
    back = parse_rule(text)
    assert isinstance(back, MacrocellRule)
    assert (back.anchor, back.diameter) == (9, 39)
    assert back.borders.upsilon == sigma_prime_result.borders.upsilon
    assert write_rule(back) == text


def test_macrocell_diameter_mismatch(sigma_prime_result):
    text = write_rule(sigma_prime_result.rule).replace("diameter: 39", "diameter: 29")
    with pytest.raises(FormatError) as info:
        parse_rule(text)
    assert info.value.line == 2


def test_macrocell_missing_inner_pair(sigma_prime_result):
    lines = write_rule(sigma_prime_result.rule).splitlines()
    text = "\n".join(line for line in lines if not line.startswith("inner: 01 01")) + "\n"
    with pytest.raises(FormatError, match="misses 1"):
        parse_rule(text)


def test_write_synthesis(golden_result, tmp_path):
    rule_path, meta_path = write_synthesis(golden_result, tmp_path / "gm.rule")
    assert meta_path.name == "gm.rule.json"
    meta = json.loads(meta_path.read_text())
    assert (meta["h"], meta["diameter"]) == (14, 55)
    back = parse_rule(rule_path.read_text())
    assert back.borders.upsilon == golden_result.borders.upsilon


def test_atomic_write(tmp_path):
    target = tmp_path / "out.txt"
    atomic_write(target, "one")
    atomic_write(target, b"two")
    assert target.read_text() == "two"
    assert [p.name for p in tmp_path.iterdir()] == ["out.txt"]


def test_alphabet_helpers_are_plain():
    assert str(Alphabet.of("brlw")) == "b r l w"
