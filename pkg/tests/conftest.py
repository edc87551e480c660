import time
from contextlib import contextmanager

import pytest

ACCEPTANCE = pytest.StashKey[list]()


def pytest_configure(config):
    config.stash[ACCEPTANCE] = []


@pytest.fixture
def criterion(request):
    """Context manager recording one PASS/FAIL line per acceptance criterion."""
    log = request.config.stash[ACCEPTANCE]

    @contextmanager
    def run(label: str, limit_s: float | None = None):
        t0 = time.perf_counter()
        try:
            yield
        except BaseException as exc:
            line = f"FAIL  {label}  ({type(exc).__name__}: {str(exc).splitlines()[0] if str(exc) else ''})"
            log.append(line)
            print(line)
            raise
        dt = time.perf_counter() - t0
        if limit_s is not None and dt > limit_s:
            line = f"FAIL  {label}  ({dt:.1f} s, limit {limit_s:.0f} s)"
            log.append(line)
            print(line)
            pytest.fail(f"took {dt:.1f} s, limit {limit_s} s")
        line = f"PASS  {label}  ({dt:.2f} s)"
        log.append(line)
        print(line)

    return run


def pytest_terminal_summary(terminalreporter, config):
    lines = config.stash[ACCEPTANCE]
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
