import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from diffinfer.cascade_sim import (
    UNCERTAINTY_STD, ObservationFormatError, ObservationMatrix, inject_uncertainty, process_rng, read_observations, run_ic_cascade,
    sample_propagation_weights, seed_count, select_seeds, simulate_observations, write_observations,
)
from diffinfer.graph_io import Graph, generate_random_graph


def _big_graph():
    return generate_random_graph(2500, 4, 0)  # 10000 edges


def test_degenerate_weights():
    g = sample_propagation_weights(generate_random_graph(20, 2, 0), 0.3, 0.0, 1)
    assert set(g.edges.values()) == {0.3}


def test_weight_distribution():
    w = np.array(list(sample_propagation_weights(_big_graph(), 0.3, 0.05, 5).edges.values()))
    assert w.size == 10000
    assert np.mean((w >= 0.2) & (w <= 0.4)) >= 0.94
    assert abs(w.mean() - 0.3) <= 0.005
    assert w.min() >= 0.01 and w.max() <= 0.99


@pytest.mark.parametrize("n,expected", [(100, 15), (3, 1), (10, 2)])
def test_seed_counts(n, expected):
    assert seed_count(n, 0.15) == expected
    seeds = select_seeds(n, 0.15, beta=4, rng_seed=0)
    assert all(len(s) == expected and len(set(s.tolist())) == expected for s in seeds)


def _chain_graph(w):
    return Graph(5, {(0, 1): w, (1, 2): w, (3, 4): w})


def test_certain_transmission_is_reachability(rng):
    assert run_ic_cascade(_chain_graph(1.0), [0], rng).tolist() == [1, 1, 1, 0, 0]


def test_no_transmission_marks_only_seeds(rng):
    assert run_ic_cascade(_chain_graph(0.0), [0, 3], rng).tolist() == [1, 0, 0, 1, 0]


def test_single_edge_rate():
    g = Graph(2, {(0, 1): 0.3})
    rng = np.random.default_rng(3)
    hits = sum(int(run_ic_cascade(g, [0], rng)[1]) for _ in range(100000))
    assert 0.29 <= hits / 100000 <= 0.31


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10**6))
def test_cascade_monotone_in_seeds(seed):
    g = sample_propagation_weights(generate_random_graph(30, 3, seed), 0.3, 0.1, seed)
    rng = np.random.default_rng(seed)
    base = rng.choice(30, 3, replace=False)
    extra = np.append(base, rng.integers(30))
    a = run_ic_cascade(g, base, np.random.default_rng(seed + 1))
    b = run_ic_cascade(g, extra, np.random.default_rng(seed + 1))  # same stream per edge
    assert np.all(b >= a)


def test_uncertainty_identity_at_zero_mu():
    b = np.random.default_rng(0).integers(0, 2, (20, 7))
    assert np.array_equal(inject_uncertainty(b, 0.0, 3).values, b.astype(float))


def test_uncertainty_stats_and_range():
    b = np.zeros((400, 50), dtype=int)
    b[::2] = 1
    v = inject_uncertainty(b, 0.3, 9).values
    assert np.all((v >= 0) & (v <= 1))
    # with s=0 entries become |u|, with s=1 entries 1-u (u ~ N(0.3, 0.1) rarely leaves [0, 1])
    assert abs(v[1::2].mean() - 0.3) < 0.01 and abs(v[1::2].std() - 0.1) < 0.01
    assert abs(v[::2].mean() - 0.7) < 0.01


def test_uncertainty_formula_examples():
    b = np.array([[1, 0]])
    v = inject_uncertainty(b, 0.3, 1).values
    u = process_rng(1, 0, purpose=2).normal(0.3, UNCERTAINTY_STD, size=2)
    assert v[0].tolist() == np.clip(np.abs([1 - u[0], -u[1]]), 0, 1).tolist()
    s = np.array([1.0, 0.0, 0.0])
    u = np.array([0.3, 0.3, -1.2])
    assert np.clip(np.abs(s - u), 0, 1).tolist() == pytest.approx([0.7, 0.3, 1.0])


def test_simulation_is_deterministic_and_prefix_stable():
    g = sample_propagation_weights(generate_random_graph(40, 3, 1), rng_seed=2)
    a = simulate_observations(g, 50, 0.15, 0.3, 7)
    b = simulate_observations(g, 50, 0.15, 0.3, 7)
    c = simulate_observations(g, 20, 0.15, 0.3, 7)
    assert np.array_equal(a.values, b.values)
    assert np.array_equal(a.values[:20], c.values)


def test_csv_round_trip(tmp_path):
    obs = ObservationMatrix(np.round(np.random.default_rng(0).random((2, 3)), 6))
    write_observations(obs, tmp_path / "o.csv")
    assert (tmp_path / "o.csv").read_text().splitlines()[0] == "beta=2,n=3"
    assert np.array_equal(read_observations(tmp_path / "o.csv").values, obs.values)


@pytest.mark.parametrize("text,msg", [
    ("beta=2,n=3\n0.1,0.2\n0.1,0.2,0.3\n", "row 1"),
    ("beta=1,n=2\n0.1,1.5\n", "outside"),
    ("beta=1,n=2\n0.1,abc\n", "non-numeric"),
    ("beta=2,n=2\n0.1,0.2\n", "rows"),
    ("n=2\n0.1,0.2\n", "header"),
])
def test_csv_errors(tmp_path, text, msg):
    p = tmp_path / "o.csv"
    p.write_text(text)
    with pytest.raises(ObservationFormatError, match=msg):
        read_observations(p)


def test_observation_matrix_rejects_out_of_range():
    with pytest.raises(ValueError):
        ObservationMatrix(np.array([[0.5, 1.2]]))
