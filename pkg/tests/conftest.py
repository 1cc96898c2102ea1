import math

import numpy as np
import pytest

from piercing_lab.geometry import Disc, Point, RegionFamily, axis_square

ACCEPTANCE_LINES: list[str] = []


def disc(x, y, r):
    return Disc(Point(x, y), r)


def random_discs(rng, n, side=6.0, rmin=0.5, rmax=1.5):
    return RegionFamily(
        tuple(disc(float(rng.uniform(0, side)), float(rng.uniform(0, side)), float(rng.uniform(rmin, rmax))) for _ in range(n))
    )


def random_squares(rng, n, side=4.0):
    return RegionFamily(tuple(axis_square(float(rng.uniform(0, side)), float(rng.uniform(0, side))) for _ in range(n)))


def triangle_family(s=1.9):
    """Three unit discs, pairwise intersecting, no common point."""
    return RegionFamily((disc(0, 0, 1), disc(s, 0, 1), disc(s / 2, s * math.sqrt(3) / 2, 1)))


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def record(criterion: str, passed: bool, detail: str) -> None:
    ACCEPTANCE_LINES.append(f"[{'PASS' if passed else 'FAIL'}] {criterion}: {detail}")


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
