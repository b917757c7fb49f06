import os

import pytest

from mtnoise import ParallelCorpus, build_lexicon, bundled_profile, tokenize

FIXTURE_DIR = os.path.join(os.path.dirname(__file__), "fixtures")


def read_fixture(name: str) -> list[str]:
    with open(os.path.join(FIXTURE_DIR, name), encoding="utf-8") as fh:
        return fh.read().splitlines()


@pytest.fixture(scope="session")
def lv():
    return bundled_profile("lv")


@pytest.fixture(scope="session")
def en():
    return bundled_profile("en")


@pytest.fixture(scope="session")
def fixture_sources():
    return read_fixture("latvian_src.txt")


@pytest.fixture(scope="session")
def fixture_targets():
    return read_fixture("latvian_tgt.txt")


@pytest.fixture(scope="session")
def fixture_corpus(fixture_sources, fixture_targets):
    return ParallelCorpus(tuple(fixture_sources), tuple(fixture_targets))


@pytest.fixture(scope="session")
def fixture_lexicon(fixture_sources, lv):
    return build_lexicon(fixture_sources, lv, min_count=1)


@pytest.fixture(scope="session")
def fixture_sentences(fixture_sources, lv):
    return [tokenize(line, lv) for line in fixture_sources]


# Acceptance tests register one line each here; the summary hook prints them
# after the run so the pass/fail verdicts are visible without -s.
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
