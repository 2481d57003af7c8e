import pytest

from reptile import gallery
from reptile.analysis import analyze


@pytest.fixture(scope="session")
def pinwheel1():
    return analyze(gallery.load("pinwheel1"))


@pytest.fixture(scope="session")
def pinwheel2():
    return analyze(gallery.load("pinwheel2"))


@pytest.fixture(scope="session")
def square4():
    return analyze(gallery.load("square4"))


@pytest.fixture(scope="session")
def analyses(pinwheel1, pinwheel2, square4):
    return {"pinwheel1": pinwheel1, "pinwheel2": pinwheel2, "square4": square4}



# acceptance results, printed in the terminal summary so they show up in any run
_ACCEPTANCE = pytest.StashKey[dict]()


@pytest.fixture
def criterion(request):
    """Record and assert one acceptance criterion: ``criterion(n, ok, detail)``."""
    results = request.config.stash.setdefault(_ACCEPTANCE, {})

    def record(number: int, ok: bool, detail: str):
        results[number] = f"criterion {number:>2}: {'PASS' if ok else 'FAIL'}  {detail}"
        assert ok, detail

    return record


def pytest_terminal_summary(terminalreporter, config):
    results = config.stash.get(_ACCEPTANCE, {})
    if results:
        terminalreporter.section("acceptance criteria")
        for n in range(1, max(11, max(results)) + 1):
            terminalreporter.write_line(results.get(n, f"criterion {n:>2}: FAIL  did not complete"))
