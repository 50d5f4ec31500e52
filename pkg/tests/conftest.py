import numpy as np
import pytest

from catscale.statekit import PhotonPMF

#: filled by tests/test_acceptance.py: (number, description, passed)
ACCEPTANCE_RESULTS = []


def record_acceptance(number, description, passed):
    ACCEPTANCE_RESULTS.append((number, description, bool(passed)))


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for number, description, passed in sorted(ACCEPTANCE_RESULTS):
        status = "PASS" if passed else "FAIL"
        terminalreporter.write_line(f"[{status}] criterion {number:2d}: {description}")


@pytest.fixture
def fock_pair():
    def build(m, n):
        c = max(m, n)
        a = np.zeros(c + 1)
        b = np.zeros(c + 1)
        a[m] = 1.0
        b[n] = 1.0
        return PhotonPMF(a), PhotonPMF(b)
    return build
