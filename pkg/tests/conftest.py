import os

# Point the run registry at a private in-memory database before dlcm is imported
os.environ["DLCM_DATABASE_URL"] = "sqlite://"

import numpy as np
import pytest

from dlcm.core.database import init_registry
from dlcm.data_io import QueryGroup
from dlcm.data_io import synthetic

init_registry()


def make_group(qid, features, labels):
    features = np.asarray(features, dtype=np.float64)
    return QueryGroup(qid, [f"{qid}-{i}" for i in range(len(labels))], features, np.asarray(labels, dtype=np.int64))


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture
def small_groups(rng):
    """Six queries, 5 to 8 documents, 4 features, grades following feature 0"""
    groups = []
    for q in range(6):
        m = 5 + q % 4
        x = rng.uniform(0.0, 1.0, size=(m, 4))
        labels = np.minimum(4, (x[:, 0] * 5).astype(np.int64))
        groups.append(make_group(f"q{q}", x, labels))
    return groups


@pytest.fixture
def tiny_context_corpus():
    return synthetic.generate_context_corpus(num_queries=30, docs_per_query=8, num_features=4, seed=7)


@pytest.fixture
def letor_file(tmp_path):
    path = tmp_path / "sample.txt"
    path.write_text(
        "2 qid:10 1:0.5 3:1.25 #doc-A\n"
        "0 qid:10 1:0.1 2:0.2 3:0.3 #doc-B\n"
        "\n"
        "1 qid:7 2:1.0 # docid = D7\n"
        "7 qid:7 1:0\n",
        encoding="utf-8",
    )
    return path
