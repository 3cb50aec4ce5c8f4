import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from diffinfer.cascade_sim import ObservationMatrix
from diffinfer.evaluation import (
    MetricRow, alpha_mae, f_score, metric_series, read_report, write_metric_series, write_report,
)
from diffinfer.graph_io import Graph
from diffinfer.likelihood import RelaxedState
from diffinfer.mi_prune import CandidateMap
from diffinfer.oracle import (
    exhaustive_binary_optimum, finite_diff_gradient, reference_objective, reference_objectives,
)
from diffinfer.rounding import sample_binary, select_best_sample

from conftest import random_instance


# -- rounding ---------------------------------------------------------------

def test_degenerate_bernoulli(rng):
    assert sample_binary(np.array([1.0, 0.0, 1.0]), rng).tolist() == [1, 0, 1]


def test_bernoulli_calibration(rng):
    assert 0.48 <= sample_binary(np.full(10000, 0.5), rng).mean() <= 0.52


def test_single_sample(rng):
    obs, c, state = random_instance(rng)
    net = select_best_sample(state.x, state.alpha, obs, c, r=1, rng=5)
    assert net.x_hat.tolist() == sample_binary(state.x, np.random.default_rng(5)).tolist()
    assert net.sample_index == 0


def test_integral_input_returned(rng):
    obs, c, state = random_instance(rng)
    x = (state.x > 0.5).astype(float)
    assert select_best_sample(x, state.alpha, obs, c, r=25, rng=1).x_hat.tolist() == x.astype(int).tolist()


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_selected_sample_is_argmax(seed):
    obs, c, state = random_instance(np.random.default_rng(seed))
    net = select_best_sample(state.x, state.alpha, obs, c, r=20, rng=seed)
    gen = np.random.default_rng(seed)
    samples = np.array([sample_binary(state.x, gen) for _ in range(20)], dtype=float)
    vals = reference_objectives(samples, state.alpha, obs, c)
    assert net.objective == pytest.approx(vals.max(), abs=1e-10)
    assert np.all(net.objective >= vals - 1e-10)
    assert net.sample_index == int(np.flatnonzero(vals >= vals.max() - 1e-10)[0])
    assert net.objective == pytest.approx(reference_objective(RelaxedState(net.x_hat, net.alpha), obs, c), abs=1e-10)
    assert np.all(net.x_hat[state.x == 0] == 0)


def test_network_views():
    c = CandidateMap(3, [0, 1], [1, 2])
    net = select_best_sample(np.array([1.0, 0.0]), np.array([0.4, 0.6]),
                             ObservationMatrix(np.zeros((1, 3))), c, r=3, rng=0)
    assert net.edges() == [(0, 1)]
    assert net.to_graph().edges == {(0, 1): 0.4}
    assert net.alpha_map() == {(0, 1): 0.4, (1, 2): 0.6}


# -- evaluation ---------------------------------------------------------------

def test_f_score_formula():
    truth = Graph(6, {(0, 1): 0.3, (1, 2): 0.3, (2, 3): 0.3, (3, 4): 0.3, (4, 5): 0.3})
    inferred = Graph(6, {(0, 1): None, (1, 2): None, (2, 3): None, (5, 0): None})
    p, r, f = f_score(inferred, truth)
    assert (p, r) == (0.75, 0.6) and f == pytest.approx(0.666667, abs=1e-6)
    assert tuple(f_score(truth, truth)) == (1.0, 1.0, 1.0)
    assert tuple(f_score(Graph(6), truth)) == (0.0, 0.0, 0.0)
    assert tuple(f_score(inferred, Graph(6))) == (0.0, 0.0, 0.0)
    with pytest.raises(ValueError):
        f_score(Graph(5), truth)


def _graph(n, edges):
    return Graph(n, {e: None for e in edges})


edge_lists = st.lists(st.tuples(st.integers(0, 6), st.integers(0, 6)).filter(lambda e: e[0] != e[1]), max_size=20)


@settings(max_examples=100, deadline=None)
@given(edge_lists, edge_lists, st.permutations(range(7)))
def test_f_score_properties(a, b, perm):
    p, r, f = f_score(_graph(7, a), _graph(7, b))
    assert 0 <= p <= 1 and 0 <= r <= 1 and 0 <= f <= min(2 * p, 2 * r) + 1e-12
    relabel = lambda es: [(perm[j], perm[i]) for j, i in es]
    assert tuple(f_score(_graph(7, relabel(a)), _graph(7, relabel(b)))) == pytest.approx((p, r, f))


def test_alpha_mae():
    truth = Graph(3, {(0, 1): 0.3})
    assert alpha_mae({(0, 1): 0.25}, truth) == pytest.approx(0.05)
    assert alpha_mae({(0, 1): 0.3}, truth) == 0.0
    assert alpha_mae({}, truth) == pytest.approx(0.3)  # pruned pair counts as 0
    with pytest.raises(ValueError):
        alpha_mae({}, Graph(3, {(0, 1): None}))


def test_metric_series(tmp_path):
    truth = Graph(3, {(0, 1): 0.3, (1, 2): 0.5})
    snap = (Graph(3, {(0, 1): 0.2}), {(0, 1): 0.2})
    rows = metric_series([(t, *snap) for t in range(4)], truth)
    assert len(rows) == 4 and len({(r.f_score, r.alpha_mae) for r in rows}) == 1
    write_metric_series(rows, tmp_path / "s.tsv")
    assert len((tmp_path / "s.tsv").read_text().splitlines()) == 5
    assert isinstance(rows[0], MetricRow)


def test_report_round_trip(tmp_path):
    write_report(tmp_path / "m.txt", {"precision": 0.5, "recall": 1.0, "f_score": 2 / 3, "alpha_mae": 0.1,
                                      "iterations": 7}, {"mu": 0.3})
    rep = read_report(tmp_path / "m.txt")
    assert rep["f_score"] == "0.666667" and rep["iterations"] == "7" and rep["config.mu"] == "0.300000"


# -- oracle ---------------------------------------------------------------------

def test_exhaustive_enumeration_size():
    obs = ObservationMatrix(np.array([[1.0, 0.5, 0.0]]))
    c = CandidateMap(3, [0, 1], [1, 2])
    x, val, seen = exhaustive_binary_optimum(obs, c, np.array([0.3, 0.3]))
    assert seen == 4 and x.shape == (2,)


def test_exhaustive_matches_brute_loop(rng):
    obs, c, state = random_instance(rng, max_pairs=6)
    x, val, seen = exhaustive_binary_optimum(obs, c, state.alpha)
    assert seen == 2 ** c.size
    best = max(reference_objective(RelaxedState(np.array([(k >> (c.size - 1 - b)) & 1 for b in range(c.size)],
                                                        dtype=float), state.alpha), obs, c)
               for k in range(2 ** c.size))
    assert val == pytest.approx(best, abs=1e-12)


def test_all_zero_observations_zero_assignment_optimal():
    obs = ObservationMatrix(np.zeros((3, 4)))
    c = CandidateMap.complete(4).restrict_to([1, 2])
    x, val, _ = exhaustive_binary_optimum(obs, c, np.full(c.size, 0.4))
    assert val == 0.0 and not x.any()  # all-zero comes first lexicographically


def test_exhaustive_rejects_large():
    c = CandidateMap.complete(6)
    with pytest.raises(ValueError):
        exhaustive_binary_optimum(ObservationMatrix(np.zeros((1, 6))), c, np.zeros(c.size))


def test_fd_flat_region():
    obs = ObservationMatrix(np.zeros((2, 3)))
    c = CandidateMap.complete(3)
    state = RelaxedState(np.full(6, 0.5), np.full(6, 0.5))
    assert np.allclose(finite_diff_gradient(state, obs, c, "x"), 0.0)


def test_fd_rejects_boundary():
    obs = ObservationMatrix(np.zeros((1, 2)))
    c = CandidateMap(2, [0], [1])
    with pytest.raises(ValueError):
        finite_diff_gradient(RelaxedState(np.array([0.0]), np.array([0.5])), obs, c, "x")


def test_fd_second_order_trend(rng):
    from diffinfer.likelihood import grad_alpha
    obs, c, state = random_instance(rng)
    g = grad_alpha(state, obs, c)
    errs = [np.max(np.abs(finite_diff_gradient(state, obs, c, "alpha", h) - g)) for h in (1e-2, 5e-3)]
    assert errs[1] < errs[0]
