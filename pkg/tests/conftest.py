import pytest

from mmnudge.corpus import load_corpus
from mmnudge.providers import MockEmbedder


@pytest.fixture(scope="session")
def corpus():
    return load_corpus()


@pytest.fixture
def tag_embedder():
    return MockEmbedder(seed=42, mode="tag_aware")


@pytest.fixture
def small_embedder():
    return MockEmbedder(seed=7, mode="hash", dim=32)


_ACCEPTANCE_KEY = pytest.StashKey[list]()


def pytest_configure(config):
    config.stash[_ACCEPTANCE_KEY] = []


@pytest.fixture
def acceptance(request):
    """Record one PASS/FAIL line for an acceptance criterion, then assert."""
    lines = request.config.stash[_ACCEPTANCE_KEY]

    def report(criterion, ok, detail):
        line = f"criterion {criterion}: {'PASS' if ok else 'FAIL'}  {detail}"
        lines.append(line)
        print(line)
        assert ok, line

    return report


def pytest_terminal_summary(terminalreporter, config):
    lines = config.stash.get(_ACCEPTANCE_KEY, [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines, key=lambda s: s.split(":")[0].split()[1]):
            terminalreporter.write_line(line)
