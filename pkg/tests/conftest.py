import pytest

from netval.ingest import find_company, load_bundled_corpus, load_bundled_snapshot


@pytest.fixture(scope="session")
def corpus():
    return load_bundled_corpus()


@pytest.fixture(scope="session")
def snapshots():
    return load_bundled_snapshot()


@pytest.fixture(scope="session")
def profile_of(corpus):
    def get(name):
        profile = find_company(corpus, name)
        assert profile is not None, f"bundled corpus should contain {name}"
        return profile

    return get


@pytest.fixture(scope="session")
def snapshot_of(snapshots):
    by_name = {s.name: s for s in snapshots}

    def get(name):
        assert name in by_name, f"bundled snapshot should contain {name}"
        return by_name[name]

    return get
