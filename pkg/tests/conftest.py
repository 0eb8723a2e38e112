import numpy as np
import pytest

from edvwcut import SplittingSpec, build_hypergraph

ACCEPTANCE_LINES = []


def single_edge(gammas, kappa=1.0, edge_id="e1"):
    names = [f"v{i + 1}" for i in range(len(gammas))]
    return build_hypergraph(names, [(edge_id, kappa, dict(zip(names, gammas)))])


def random_edge(rng, lo=2, hi=7, kappa=1.0):
    k = int(rng.integers(lo, hi + 1))
    return single_edge(list(rng.uniform(0.1, 5.0, size=k)), kappa).hyperedges[0]


def random_hypergraph(rng, n_max=12, m_max=6, size_max=5, n_min=3):
    n = int(rng.integers(n_min, n_max + 1))
    names = [f"v{i}" for i in range(n)]
    edges = []
    for j in range(int(rng.integers(1, m_max + 1))):
        k = int(rng.integers(2, min(size_max, n) + 1))
        members = rng.choice(n, size=k, replace=False)
        edges.append((f"e{j}", float(rng.uniform(0.5, 3.0)),
                      {names[i]: float(rng.uniform(0.1, 5.0)) for i in members}))
    return build_hypergraph(names, edges)


BUILTIN_SPECS = {
    "product": SplittingSpec.product(),
    "minhalf": SplittingSpec.minhalf(),
    "thresh0.3": SplittingSpec.thresholded(beta=0.3),
    "wmin": SplittingSpec.weighted_min(2.0, 1.0),
}


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
