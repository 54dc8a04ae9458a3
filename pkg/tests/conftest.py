import math

import numpy as np
import pytest

from olgland.config import preset
from olgland.equilibrium import EquilibriumPath, build, date0_prices


@pytest.fixture(scope="session")
def fig1_cfg():
    return preset("fig1")


@pytest.fixture(scope="session")
def fig2_cfg():
    return preset("fig2")


@pytest.fixture(scope="session")
def fig1_path(fig1_cfg):
    return build(fig1_cfg)


@pytest.fixture(scope="session")
def fig2_path(fig2_cfg):
    return build(fig2_cfg)


def synthetic_path(R, r, G=1.2, e_y=1.0, w=0.0, e_o=0.5, P=None, y=None, z=None, n=None):
    """Path from arbitrary rate/dividend arrays; prices default to the fundamental value."""
    R = np.broadcast_to(np.asarray(R, dtype=float), (n,)).copy() if n else np.asarray(R, dtype=float)
    n = len(R)
    t = np.arange(n, dtype=float)
    r = np.broadcast_to(np.asarray(r, dtype=float), (n,)).copy()
    log_q = date0_prices(R)[:-1]
    if P is None:
        # P_t = (1/q_t) sum_{s>t} q_s r_s with the dividend stream continued at rate G
        P = np.array([r[i] * G / (R[i] - G) for i in range(n)])
    ones = np.ones(n)
    return EquilibriumPath(
        t=t,
        w=w * ones,
        r=r,
        P=np.asarray(P, dtype=float),
        e_y=e_y * ones,
        y=(e_y * ones) if y is None else y,
        z=(e_o * ones) if z is None else z,
        R=R,
        log_q=log_q,
        x=np.exp(-t * math.log(G)),
        G=G,
        e_o=e_o,
    )


# (criterion number, line) per acceptance criterion, echoed after the run
ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for _, line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
