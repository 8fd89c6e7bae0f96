import pytest

from uavmmw.antenna import ArrayConfig
from uavmmw.channel import LinkBudget, OrientationStats


def make_link(kind="A2A", nt=8, nr=8, sigma_t=2.0, sigma_r=2.0, off_t=(0.5, 0.5),
              off_r=(0.5, 0.5), distance=1000.0, ptx=20.0, noise=-110.0, m=3.0,
              threshold=10.0, **extra):
    """Baseline link in human units (degrees, dBm, metres)."""
    tx = (OrientationStats.ground() if kind == "G2A"
          else OrientationStats.from_degrees(*off_t, sigma_t))
    rx = (OrientationStats.ground() if kind == "A2G"
          else OrientationStats.from_degrees(*off_r, sigma_r))
    return LinkBudget(kind, distance, ptx, noise, m, threshold, 30.0, ArrayConfig(nt),
                      ArrayConfig(nr), tx, rx, **extra)


@pytest.fixture
def link_factory():
    return make_link


ACCEPTANCE_LINES = {}


@pytest.fixture
def record_criterion():
    """Print and remember one PASS/FAIL line per acceptance criterion."""
    def record(number, title, passed, detail):
        line = f"criterion {number:>2}: {'PASS' if passed else 'FAIL'}  {title} -- {detail}"
        ACCEPTANCE_LINES[number] = line
        print(line)
        return passed
    return record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for number in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(ACCEPTANCE_LINES[number])
