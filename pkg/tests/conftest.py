import pytest

from interlock.construction import TangleSpec, build_full_scene, build_tangle, equilateral_frame


@pytest.fixture(scope="session")
def full_scene():
    return build_full_scene(equilateral_frame(1.0, 0.01), 5.0)


@pytest.fixture(scope="session")
def tangle_scene():
    return build_tangle(TangleSpec(0.6))


_ACCEPTANCE_LINES: list[str] = []


@pytest.fixture
def acceptance():
    """Record one pass/fail line for an acceptance criterion (echoed in the terminal summary)."""

    def record(number: int, title: str, passed: bool, detail: str = "") -> bool:
        line = f"criterion {number:2d} [{'PASS' if passed else 'FAIL'}] {title}" + (f": {detail}" if detail else "")
        print(line)
        _ACCEPTANCE_LINES.append(line)
        return passed

    return record


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(_ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
