import functools

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from omcspec import Backend, Branch, FilterSpec, Mode, SystemParams, make_initial_state, spectrum

settings.register_profile("default", deadline=None, max_examples=40,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

FIG2 = SystemParams()
FIG5 = SystemParams(gamma_m=0.1, gamma_a=0.4, mbar=0.1)

_ACCEPTANCE = {}


def record(criterion, label, passed, detail):
    key = f"{criterion}{'' if label is None else f' [{label}]'}"
    _ACCEPTANCE[key] = (passed, detail)
    print(f"criterion {key}: {'PASS' if passed else 'FAIL'} - {detail}")


@pytest.fixture
def report():
    return record


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")

    def order(item):
        head = item[0].split()[0]
        return int(head), item[0]

    for key, (passed, detail) in sorted(_ACCEPTANCE.items(), key=order):
        terminalreporter.write_line(f"criterion {key}: {'PASS' if passed else 'FAIL'} - {detail}")


@functools.lru_cache(maxsize=None)
def cached_spectrum(params: SystemParams, times: tuple, mode: str = "incoherent", backend: str = "closed",
                    gamma: float = 0.1):
    """Spectra on the default grid, shared between test modules."""
    psi0 = make_initial_state(Branch.ATOM_EXCITED, 0, params)
    return spectrum(params, FilterSpec(gamma), times, psi0, Mode(mode), Backend(backend))


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)
