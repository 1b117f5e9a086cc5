import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from cultmig.datasets import make_synthetic_corpus, write_corpus  # noqa: E402
from cultmig.ingest import load_hofstede  # noqa: E402
from reference import ACCEPTANCE_LINES, EXCERPT  # noqa: E402


@pytest.fixture(scope="session")
def excerpt_profiles():
    return load_hofstede(EXCERPT)


@pytest.fixture(scope="session")
def synthetic_corpus():
    return make_synthetic_corpus(seed=7)


@pytest.fixture(scope="session")
def synthetic_dir(tmp_path_factory, synthetic_corpus):
    return write_corpus(synthetic_corpus, tmp_path_factory.mktemp("corpus"))


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
