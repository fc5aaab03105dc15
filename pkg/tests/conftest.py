import math

import pytest


def erfc_cdf(z):
    """Normal CDF from the standard library, independent of scipy."""
    return 0.5 * math.erfc(-z / math.sqrt(2.0))


def bisect_quantile(p, lo=-40.0, hi=40.0):
    """Quantile by bisection on :func:`erfc_cdf`."""
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if erfc_cdf(mid) < p:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


@pytest.fixture
def c05():
    return bisect_quantile(0.95)


@pytest.fixture
def c025():
    return bisect_quantile(0.975)


ACCEPTANCE_LINES = []


@pytest.fixture
def criterion(request):
    """Record one PASS/FAIL line per acceptance criterion."""
    state = {"detail": ""}

    def note(detail):
        state["detail"] = detail

    yield note
    rep = getattr(request.node, "rep_call", None)
    ok = rep is not None and rep.passed
    name = request.node.name
    ACCEPTANCE_LINES.append(f"[{'PASS' if ok else 'FAIL'}] {name}: {state['detail']}")


@pytest.hookimpl(hookwrapper=True, tryfirst=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    if rep.when == "call":
        item.rep_call = rep


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
