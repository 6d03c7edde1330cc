import numpy as np
import pytest
from hypothesis import settings

from metrivec import Euclidean, Integrand

settings.register_profile("metrivec", deadline=None, max_examples=60, derandomize=False)
settings.load_profile("metrivec")


def linear(space=None):
    """t -> t e_1."""
    space = space or Euclidean(1)
    return Integrand(lambda t: space.from_coords({1: float(t)}), space, label="t*e1",
                     bound=1.0, batch=lambda ts: np.pad(ts[:, None], ((0, 0), (0, space.dim - 1))))


def curve(space=None):
    """t -> (t, t^2)."""
    space = space or Euclidean(2)
    return Integrand(lambda t: space.from_coords({1: float(t), 2: float(t) ** 2}), space,
                     label="(t,t^2)", bound=2 ** 0.5,
                     batch=lambda ts: np.stack([ts, ts * ts], axis=1))


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


ACCEPTANCE = []


def record(criterion, ok, detail):
    """Print and remember one acceptance verdict line."""
    line = f"{'PASS' if ok else 'FAIL'} criterion {criterion}: {detail}"
    ACCEPTANCE.append(line)
    print(line)
    return ok


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE, key=lambda s: int(s.split()[2].rstrip(":"))):
            terminalreporter.write_line(line)
