import numpy as np
import pytest

from filament.curves import SampledCurve, grid
from filament.hasimoto import PotentialSignal

ACCEPTANCE = []


def record(number, ok, detail):
    ACCEPTANCE.append((number, bool(ok), detail))


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number, ok, detail in sorted(ACCEPTANCE):
        terminalreporter.write_line(f"criterion {number}: {'PASS' if ok else 'FAIL'}  {detail}")


def circle(n=256, r=1.0):
    s = grid(n)
    return SampledCurve(np.c_[r * np.cos(s), r * np.sin(s), 0 * s])


def helix(n=256):
    # unit speed, radius 1, pitch 1: curvature = torsion = 1/2
    s = grid(n) / np.sqrt(2)
    return SampledCurve(np.c_[np.cos(s), np.sin(s), s], closed=False)


def const(c, n=512):
    return PotentialSignal.constant(c, n)


@pytest.fixture
def q1():
    return const(1.0)


@pytest.fixture
def q0():
    return const(0.0, 64)
