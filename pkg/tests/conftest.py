"""Shared fixtures and the per-criterion acceptance summary."""

from __future__ import annotations

import numpy as np
import pytest

from nlslab.grid import Field, make_grid

_CRITERIA: dict[int, dict] = {}


def pytest_configure(config):
    config.addinivalue_line(
        "markers", "criterion(number, title): acceptance criterion covered by the test"
    )


def pytest_collection_modifyitems(items):
    for item in items:
        m = item.get_closest_marker("criterion")
        if m is not None:
            number, title = m.args
            _CRITERIA.setdefault(number, {"title": title, "outcomes": []})


def pytest_runtest_logreport(report):
    if report.when != "call" and not (report.when == "setup" and report.outcome != "passed"):
        return
    for number, entry in _CRITERIA.items():
        if f"criterion_{number:02d}_" in report.nodeid:
            entry["outcomes"].append(report.outcome)


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for number in sorted(_CRITERIA):
        entry = _CRITERIA[number]
        outcomes = entry["outcomes"]
        if not outcomes:
            verdict = "NOT RUN"
        elif all(o == "passed" for o in outcomes):
            verdict = "PASS"
        else:
            verdict = "FAIL"
        tr.write_line(f"criterion {number:2d}: {verdict:7s} {entry['title']}")


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture(scope="session")
def grid3():
    return make_grid(3, 16, 8.0)


@pytest.fixture(scope="session")
def grid32():
    return make_grid(3, 32, 8.0)


def random_field(grid, rng) -> Field:
    return Field(grid, rng.standard_normal(grid.shape) + 1j * rng.standard_normal(grid.shape))


def single_mode(grid, mode) -> Field:
    """exp(i xi_k . x) for integer mode vector k (unit amplitude)."""
    phase = sum(k * np.pi / grid.half_width * x for k, x in zip(mode, grid.mesh()))
    return Field(grid, np.exp(1j * phase) * np.ones(grid.shape))
