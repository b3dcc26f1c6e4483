import pytest

from normrel import catalog


@pytest.fixture(scope="session")
def corpus():
    """All bundled structures keyed by (context subdir, name)."""
    out = {}
    for sub, instances in catalog.bundled_instances().items():
        for x in instances:
            out[(sub, x.name)] = x
    return out


@pytest.fixture(scope="session")
def gp_corpus(corpus):
    return [x for (sub, _), x in sorted(corpus.items()) if sub == "gp"]


@pytest.fixture(scope="session")
def gpds_corpus(corpus):
    return [x for (sub, _), x in sorted(corpus.items()) if sub == "gpds"]


@pytest.fixture(scope="session")
def gpcirc_corpus(corpus):
    return [x for (sub, _), x in sorted(corpus.items()) if sub == "gpcirc"]
