import os

import numpy as np
import pytest

from qemsim.composite import CouplingParams, OscillatorParams
from qemsim.qubit import ChargeBasis, CpbParams

# Hypothesis runs are deterministic so the suite is reproducible.
try:
    from hypothesis import settings

    settings.register_profile("qemsim", derandomize=True, deadline=None, max_examples=40)
    settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "qemsim"))
except ImportError:  # pragma: no cover
    pass


@pytest.fixture
def lc_system():
    """Single-tone parameter set (E_C = 1.3 GHz)."""
    return (CpbParams(E_C=1.3e9, E_J0=12.7e9), OscillatorParams(omega=1.94e9, n_fock=10),
            CouplingParams(lam=1.6e8), ChargeBasis(7))


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def pytest_terminal_summary(terminalreporter):
    from test_acceptance import RESULTS

    if not RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(RESULTS):
        terminalreporter.write_line(RESULTS[number])
