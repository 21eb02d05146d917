import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from tracecast.fileformats import parse_subshift  # noqa: E402
from tracecast.shiftlang import Alphabet, Sft, compile_text  # noqa: E402
from tracecast.synthesis import block_recode, synthesize  # noqa: E402
from tracecast.tracecheck import check_t3  # noqa: E402

FIXTURES = Path(__file__).parent / "fixtures"
BINARY = Alphabet.of("01")

EXAMPLES = {
    "alternating": "(1+e)(01)^w",
    "zeros_then_ones": "0^w+0*1^w",
    "rotations_001": "(01+1+e)(001)^w",
    "sigma_prime": "(0*1+1*)0^w",
    "three_points": "0^w+(01)^w",
}


def golden_mean() -> Sft:
    return Sft.from_forbidden(BINARY, ["11"])


def sigma_prime_gamma() -> Sft:
    return parse_subshift((FIXTURES / "sigma_prime_gamma.sub").read_text()).sft


@pytest.fixture(scope="session")
def golden_result():
    gm = golden_mean()
    return synthesize(gm.graph, block_recode(gm), check_t3(gm.graph).witness)


@pytest.fixture(scope="session")
def sigma_prime_result():
    sigma = compile_text(EXAMPLES["sigma_prime"], BINARY)
    return synthesize(sigma, sigma_prime_gamma(), check_t3(sigma).witness)
