import numpy as np
import pytest

from diffinfer.cascade_sim import ObservationMatrix
from diffinfer.likelihood import RelaxedState
from diffinfer.mi_prune import CandidateMap


def random_instance(rng, n_max=6, beta_max=5, max_pairs=10, interior=True):
    """Random (obs, candidates, state) with at least one candidate pair."""
    n = int(rng.integers(2, n_max + 1))
    beta = int(rng.integers(1, beta_max + 1))
    all_pairs = [(j, i) for i in range(n) for j in range(n) if j != i]
    k = int(rng.integers(1, min(max_pairs, len(all_pairs)) + 1))
    picks = rng.choice(len(all_pairs), size=k, replace=False)
    pairs = [all_pairs[p] for p in picks]
    cands = CandidateMap(n, [p[0] for p in pairs], [p[1] for p in pairs])
    obs = ObservationMatrix(rng.random((beta, n)))
    lo, hi = (0.05, 0.95) if interior else (0.0, 1.0)
    state = RelaxedState(rng.uniform(lo, hi, k), rng.uniform(lo, hi, k))
    return obs, cands, state


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def single_pair(s_parent=1.0, s_child=1.0):
    """n=2, beta=1, the only candidate pair is 0 -> 1."""
    obs = ObservationMatrix(np.array([[s_parent, s_child]]))
    return obs, CandidateMap(2, [0], [1])
