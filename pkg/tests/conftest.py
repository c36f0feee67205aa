import pytest

from lra.corpus_index import index_from_texts
from lra.datasets import make_relational_fixture
from lra.pipeline import LraConfig, run_pipeline
from lra.thesaurus import Thesaurus, load_thesaurus

ACCEPTANCE_RESULTS: dict[str, str] = {}


@pytest.fixture(scope="session")
def fixture_data():
    return make_relational_fixture(seed=0)


@pytest.fixture(scope="session")
def fixture_files(fixture_data, tmp_path_factory):
    return fixture_data.write(tmp_path_factory.mktemp("fixture"))


@pytest.fixture(scope="session")
def fixture_index(fixture_data):
    return index_from_texts(fixture_data.documents)


@pytest.fixture(scope="session")
def fixture_thesaurus(fixture_files) -> Thesaurus:
    return load_thesaurus(fixture_files["thesaurus"])


@pytest.fixture(scope="session")
def build(fixture_data, fixture_index, fixture_thesaurus):
    def run(**overrides):
        config = LraConfig(k=8, num_patterns=100).with_overrides(**overrides)
        return run_pipeline(config, fixture_data.pairs, fixture_index, fixture_thesaurus)
    return run


@pytest.fixture(scope="session")
def built(build):
    return build()


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for name in sorted(ACCEPTANCE_RESULTS, key=lambda s: int(s.split()[0])):
        terminalreporter.write_line(f"{ACCEPTANCE_RESULTS[name]}  #{name}")
