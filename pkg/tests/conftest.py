import pytest

from scsparse import complex as complex_mod
from scsparse.hodge import chain_complex_check

_seen = {"complexes": 0, "violations": []}
ACCEPTANCE_LINES: list[str] = []


def _checked_init(orig):
    def __init__(self, *args, **kwargs):
        orig(self, *args, **kwargs)
        _seen["complexes"] += 1
        for k in range(1, self.dim):
            if not chain_complex_check(self, k):
                _seen["violations"].append((repr(self), k))

    return __init__


@pytest.fixture(autouse=True, scope="session")
def _invariant_watch():
    """Every complex built during the run must satisfy B_k B_{k+1} = 0.

    Closure is already enforced by the constructor, so reaching the wrapper
    means it passed.
    """
    cls = complex_mod.SimplicialComplex
    orig = cls.__init__
    cls.__init__ = _checked_init(orig)
    yield _seen
    cls.__init__ = orig


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
    terminalreporter.write_line(
        f"invariant watch: {_seen['complexes']} complexes constructed, {len(_seen['violations'])} chain-complex violations"
    )
