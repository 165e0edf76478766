import math

import numpy as np
import pytest

from ntnsim.scenario import ScenarioConfig
from ntnsim.schemes import ChannelRealization

# Lines collected by the acceptance suite, echoed in the terminal summary.
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture
def cfg() -> ScenarioConfig:
    return ScenarioConfig()


def unit_realization(M=1, N=1, L=1, direct=1.0, ris=1.0, relay=1.0) -> ChannelRealization:
    """Deterministic realization with constant complex gains."""
    return ChannelRealization(
        direct=np.full((M, L), direct, dtype=complex),
        haps_ris=np.full((M, N), ris, dtype=complex),
        ris_user=np.full((N, L), ris, dtype=complex),
        haps_uav_relay=np.full((M,), relay, dtype=complex),
        uav_user_relay=np.full((L,), relay, dtype=complex),
    )


def dbm_for_snr(config: ScenarioConfig, snr: float) -> float:
    """Transmit power in dBm giving ``snr`` over the receiver noise at unit gain."""
    return 10.0 * math.log10(snr * config.radio.noise_power) + 30.0
