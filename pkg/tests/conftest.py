import time
from contextlib import contextmanager

import pytest

_RESULTS = pytest.StashKey[list]()


def pytest_configure(config):
    config.stash[_RESULTS] = []


@pytest.fixture
def criterion(request):
    """Context manager recording one PASS/FAIL line per acceptance criterion."""
    results = request.config.stash[_RESULTS]

    @contextmanager
    def run(label, envelope):
        start = time.perf_counter()
        ok = False
        try:
            yield
            ok = True
        finally:
            seconds = time.perf_counter() - start
            ok = ok and seconds < envelope
            line = f"{label}: {'PASS' if ok else 'FAIL'} ({seconds:.2f}s, envelope {envelope}s)"
            results.append(line)
            print(line)
        assert seconds < envelope, f"{label} exceeded its {envelope}s envelope"

    return run


def pytest_terminal_summary(terminalreporter, config):
    lines = config.stash[_RESULTS]
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
