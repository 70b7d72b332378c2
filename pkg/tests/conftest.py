import pytest

from twophoton import make_params


@pytest.fixture
def unit_params():
    return make_params(0.0, 1.0)


@pytest.fixture
def shifted_params():
    """Non-trivial omega and gamma, to catch unit slips."""
    return make_params(0.7, 1.6)


def pytest_terminal_summary(terminalreporter):
    lines = []
    for key in ("passed", "failed"):
        for rep in terminalreporter.stats.get(key, []):
            if rep.when != "call":
                continue
            lines += [v for k, v in rep.user_properties if k == "acceptance"]
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines, key=lambda s: int(s.split()[2].rstrip(":"))):
            terminalreporter.write_line(line)
