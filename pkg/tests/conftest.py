from pathlib import Path

import pytest

from gknet import load_network, load_pmf

FIXTURES = Path(__file__).resolve().parents[1] / "fixtures"


@pytest.fixture(scope="session")
def fixtures_dir() -> Path:
    return FIXTURES


@pytest.fixture(scope="session")
def two_blocks():
    """3x4 joint table with a singleton block and a five-symbol block."""
    return load_pmf(FIXTURES / "pmf_two_blocks.json")


@pytest.fixture(scope="session")
def shared_bit():
    """X = (X', K), Y = (Y', K) with three independent fair bits."""
    return load_pmf(FIXTURES / "pmf_shared_bit.json")


@pytest.fixture(scope="session")
def shared_bit3():
    """Three sources, each a private fair bit paired with one shared bit."""
    return load_pmf(FIXTURES / "pmf_shared_bit3.json")


@pytest.fixture(scope="session")
def chain_erasure():
    """Two-block table extended by a rate-1/2 erasure of its second variable."""
    return load_pmf(FIXTURES / "pmf_chain_erasure.json")


@pytest.fixture(scope="session")
def independent2():
    """Two independent uniform 2-bit sources."""
    return load_pmf(FIXTURES / "pmf_independent2.json")


@pytest.fixture(scope="session")
def three_terminal_net():
    """Unit-capacity network with sources a, e and terminals f, g, k."""
    return load_network(FIXTURES / "net_three_terminal.json")


@pytest.fixture(scope="session")
def butterfly_net():
    return load_network(FIXTURES / "net_butterfly.json")


@pytest.fixture(scope="session")
def parallel_net():
    return load_network(FIXTURES / "net_parallel.json")
