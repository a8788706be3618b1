import pytest

from ellipwire.geometry import FieldParams, MaterialParams, build_frame

_LOG = pytest.StashKey[list]()


def pytest_configure(config):
    config.stash[_LOG] = []


@pytest.fixture(scope="session")
def frame():
    return build_frame(MaterialParams.preset("bi-t-hole"))


@pytest.fixture(scope="session")
def field2r(frame):
    """L_B = 2R pointing along +1."""
    return FieldParams.from_lb_ratio(frame, 2.0, 1)


@pytest.fixture
def acceptance_log(request):
    return request.config.stash[_LOG]


def pytest_terminal_summary(terminalreporter, config):
    lines = config.stash.get(_LOG, [])
    if not lines:
        return
    terminalreporter.section("acceptance criteria")
    for line in sorted(lines, key=lambda s: int(s.split()[1].rstrip(":"))):
        terminalreporter.write_line(line)
