import math

import numpy as np
import pytest

from aniso_cheeger.planar_convex import (
    Anisotropy,
    circumscribed_polygon,
    disc,
    make_polygon,
)


def random_symmetric_points(rng, pairs=None, spread=0.6):
    """Antipodal point cloud with ``pairs`` random directions and radii."""
    p = pairs if pairs is not None else int(rng.integers(2, 7))
    ang = np.sort(rng.uniform(0.0, math.pi, p))
    r = np.exp(rng.normal(0.0, spread, p))
    half = np.column_stack([r * np.cos(ang), r * np.sin(ang)])
    return np.vstack([half, -half])


def random_anisotropy(rng, pairs=None):
    while True:
        pts = random_symmetric_points(rng, pairs)
        try:
            return Anisotropy.from_points(pts, warn=False)
        except Exception:
            continue


def random_convex(rng, count=None, center=(0.0, 0.0)):
    """Hull of a random Gaussian cloud; not symmetric in general."""
    k = count if count is not None else int(rng.integers(3, 12))
    while True:
        pts = rng.normal(size=(k, 2)) * rng.uniform(0.5, 2.0, 2) + np.asarray(center)
        try:
            return make_polygon(pts)
        except Exception:
            continue


@pytest.fixture(scope="session")
def square():
    return make_polygon([[1, 1], [-1, 1], [-1, -1], [1, -1]])


@pytest.fixture(scope="session")
def unit_square():
    return make_polygon([[-0.5, -0.5], [0.5, -0.5], [0.5, 0.5], [-0.5, 0.5]])


@pytest.fixture(scope="session")
def disc4096():
    return disc(4096)


@pytest.fixture(scope="session")
def disc_aniso(disc4096):
    return Anisotropy.from_polygon(disc4096)


@pytest.fixture(scope="session")
def square_aniso(square):
    return Anisotropy.from_polygon(square)


@pytest.fixture(scope="session")
def pstar():
    cache = {}

    def get(n):
        if n not in cache:
            cache[n] = Anisotropy.from_polygon(circumscribed_polygon(n))
        return cache[n]

    return get


_CRITERIA = {}


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is None or report.when != "call" and report.passed:
        return
    key = mark.args[0]
    ok = report.passed and _CRITERIA.get(key, (True, ""))[0]
    detail = "" if report.passed else str(report.longrepr.reprcrash.message).splitlines()[0]
    _CRITERIA[key] = (ok, detail or _CRITERIA.get(key, (True, ""))[1])


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(_CRITERIA):
        ok, detail = _CRITERIA[key]
        line = f"criterion {key:>2}: {'PASS' if ok else 'FAIL'}"
        terminalreporter.write_line(line + (f"  ({detail})" if detail else ""))
