"""Shared fixtures. Frozen numbers come from tests/oracles.py (mpmath, exact ints, scipy)."""
import math

import pytest
from hypothesis import HealthCheck, settings

from qcutoff.kernel import GroupFamily
from qcutoff.states import CentralState, PureCharacter, RotationAngle

settings.register_profile(
    "default", max_examples=60, deadline=None, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("default")

# exact TV values: (N, t, k) -> value, free-orthogonal pure states
FROZEN_TV = {
    (10, 6, 5): 0.3261236124174794,
    (10, 6, 8): 0.07125164366512785,
    (10, 6, 20): 0.000155172183400276864,
    (8, 4, 3): 0.4181359462810448,
    (8, 4, 10): 0.0033157273571294715,
    (10, 8, 11): 0.3588076209819723,
    (10, 8, 20): 0.048919444571020036,
    (10, 1, 2): 0.042268096680044654,
}
FROZEN_TV_SPLUS = {
    (10, 8, 20): 0.024259856770726545,
    (9, 0, 2): 0.0493472486,
}


def oplus(N):
    return GroupFamily("oplus", N)


def pure(N, t, kind="oplus"):
    return CentralState(GroupFamily(kind, N), PureCharacter(t))


def rotation(N, theta, kind="oplus"):
    return CentralState(GroupFamily(kind, N), RotationAngle(theta))


@pytest.fixture
def rot_pi_10():
    return rotation(10, math.pi)


# one line per acceptance criterion, printed after the run
ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
