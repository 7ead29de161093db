import numpy as np
import pytest

_ACCEPTANCE: dict[int, tuple[str, bool, str]] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion reported in the summary")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None:
        return
    if rep.when == "call" or (rep.when == "setup" and rep.failed):
        number, title = marker.args
        detail = dict(item.user_properties).get("detail", "")
        if rep.failed and not detail:
            detail = rep.longrepr.reprcrash.message if hasattr(rep.longrepr, "reprcrash") else "error"
        _ACCEPTANCE[number] = (title, rep.passed, detail)


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_ACCEPTANCE):
        title, ok, detail = _ACCEPTANCE[number]
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  C{number:<2d} {title}: {detail}")


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def random_phases(rng, n, count):
    """Half uniform floats, half exact dyadic k/2^n (as (k, n) tuples)."""
    out = [float(rng.random()) for _ in range(count - count // 2)]
    out += [(int(k), n) for k in rng.integers(0, 2 ** n, size=count // 2)]
    return out
