from collections import defaultdict

import numpy as np
import pytest

from braidforge.linalg import MonomialOperator

# reference values of sqrt(2) * B_8, row by row
B8_TIMES_SQRT2 = np.array([
    [1, 0, 0, 0, 0, 0, 0, 1],
    [0, 1, 0, 0, 0, 0, 1, 0],
    [0, 0, 1, 0, 0, 1, 0, 0],
    [0, 0, 0, 1, 1, 0, 0, 0],
    [0, 0, 0, -1, 1, 0, 0, 0],
    [0, 0, -1, 0, 0, 1, 0, 0],
    [0, -1, 0, 0, 0, 0, 1, 0],
    [-1, 0, 0, 0, 0, 0, 0, 1],
], dtype=float)

S = 1 / np.sqrt(2)


def random_monomial(rng: np.random.Generator, dim: int, unimodular: bool = True) -> MonomialOperator:
    target = rng.permutation(dim)
    if unimodular:
        phase = np.exp(2j * np.pi * rng.random(dim))
    else:
        phase = rng.choice([-1.0, 1.0], size=dim).astype(complex)
    return MonomialOperator(target, phase)


def series_expm(a: np.ndarray, terms: int = 30) -> np.ndarray:
    """Truncated Taylor series, used only as an oracle."""
    out = np.eye(a.shape[0], dtype=complex)
    term = np.eye(a.shape[0], dtype=complex)
    for n in range(1, terms):
        term = term @ a / n
        out = out + term
    return out


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


# ---------------------------------------------------------------- acceptance summary

_CRITERIA: dict[int, dict] = defaultdict(lambda: {"title": "", "outcomes": []})


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None:
        return
    if report.when == "call" or (report.when == "setup" and report.outcome != "passed"):
        number, title = marker.args
        entry = _CRITERIA[number]
        entry["title"] = title
        entry["outcomes"].append((item.name, report.outcome))


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_CRITERIA):
        entry = _CRITERIA[number]
        ok = all(o == "passed" for _, o in entry["outcomes"])
        failed = [name for name, o in entry["outcomes"] if o != "passed"]
        line = f"criterion {number:>2}: {'PASS' if ok else 'FAIL'}  {entry['title']}"
        if failed:
            line += f"  (failing: {', '.join(failed)})"
        terminalreporter.write_line(line)
