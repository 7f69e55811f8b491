import numpy as np
import pytest

from partition_tuner import ClusteringInstance, gen_k4_shatter


@pytest.fixture(scope="session")
def k4_bundle():
    """Shared 20-point block instance: (inst, emb, z, witness)."""
    return gen_k4_shatter(20, 1)


def euclidean_instance(rng, n, dim=3, **kw):
    """Random point-cloud metric, the workhorse for randomized checks."""
    pts = rng.normal(size=(n, dim))
    D = np.sqrt(((pts[:, None, :] - pts[None, :, :]) ** 2).sum(-1))
    np.fill_diagonal(D, 0.0)
    return ClusteringInstance(n=n, dist=D, **kw)
