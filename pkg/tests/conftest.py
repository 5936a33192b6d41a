import pytest

from frontforge.potential import builtin, builtin_spec
from frontforge.profile import Grid
from frontforge.solver import SolverConfig, solve_front


@pytest.fixture(scope="session")
def cubic():
    return builtin("cubic_force", (0.4,))


@pytest.fixture(scope="session")
def cubic_spec():
    return builtin_spec("cubic_force", (0.4,))


@pytest.fixture(scope="session")
def cubic_front(cubic):
    """Converged cubic-force front on the default grid."""
    return solve_front(cubic, SolverConfig(), Grid(0.05, 40))


@pytest.fixture(scope="session")
def cubic_front_fine(cubic):
    return solve_front(cubic, SolverConfig(), Grid(0.025, 40))


ACCEPTANCE_KEY = pytest.StashKey[list]()


@pytest.fixture
def verdict(request):
    """Record and print one PASS/FAIL line for an acceptance criterion."""
    lines = request.config.stash.setdefault(ACCEPTANCE_KEY, [])

    def record(number, title, checks):
        ok = all(passed for _, passed in checks)
        detail = "; ".join(f"{text} [{'ok' if passed else 'FAIL'}]" for text, passed in checks)
        line = f"C{number:<2} {'PASS' if ok else 'FAIL'}  {title}: {detail}"
        lines.append(line)
        print(line)
        assert ok, line

    return record


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = config.stash.get(ACCEPTANCE_KEY, [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines, key=lambda s: int(s[1:3])):
            terminalreporter.write_line(line)
