"""Simulate -> prune -> infer -> evaluate, as used by the CLI and the scripts."""

from __future__ import annotations

import time
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .am_solver import IterationTrace, SolverConfig, alternate_maximize
from .cascade_sim import ObservationMatrix, sample_propagation_weights, simulate_observations
from .config import RunConfig, derive_seed
from .evaluation import alpha_mae, f_score
from .graph_io import Graph, generate_random_graph, load_graph
from .likelihood import LikelihoodModel, RelaxedState
from .mi_prune import CandidateMap, build_candidate_sets
from .rounding import InferredNetwork, select_best_sample

# sub-streams of a run's rng_seed
GRAPH, WEIGHTS, DATA, ROUNDING = range(4)


class EmptyCandidatesError(RuntimeError):
    def __init__(self, eta: float):
        super().__init__(f"no candidate pairs survive MI pruning (eta={eta:.6g})")
        self.eta = eta


def simulate(config: RunConfig):
    """Weighted ground-truth graph and its observation matrix."""
    if config.graph:
        graph = load_graph(config.graph)
    else:
        graph = generate_random_graph(config.n, config.avg_degree, derive_seed(config.rng_seed, GRAPH))
    if not graph.is_weighted or len(graph) == 0:
        graph = sample_propagation_weights(graph, config.alpha_mean, config.alpha_std,
                                           derive_seed(config.rng_seed, WEIGHTS))
    obs = simulate_observations(graph, config.beta, config.seed_ratio, config.mu,
                                derive_seed(config.rng_seed, DATA))
    return graph, obs


@dataclass
class InferenceResult:
    candidates: CandidateMap
    eta: float
    mi: np.ndarray
    state: RelaxedState
    trace: IterationTrace
    network: InferredNetwork
    timings: dict

    @property
    def runtime(self) -> float:
        return sum(self.timings.values())


def solver_config(config: RunConfig) -> SolverConfig:
    return SolverConfig(tol=config.tol, max_iter=config.max_iter, rng_seed=config.rng_seed)


def infer(obs: ObservationMatrix, config: RunConfig,
          callback: Optional[Callable[[int, RelaxedState], None]] = None) -> InferenceResult:
    timings = {}
    t0 = time.perf_counter()
    candidates, eta, mi = build_candidate_sets(obs)
    timings["prune"] = time.perf_counter() - t0
    if candidates.size == 0:
        raise EmptyCandidatesError(eta)
    t0 = time.perf_counter()
    state, trace = alternate_maximize(obs, candidates, solver_config(config), callback=callback)
    timings["solve"] = time.perf_counter() - t0
    t0 = time.perf_counter()
    network = select_best_sample(state.x, state.alpha, obs, candidates, config.r,
                                 rng=derive_seed(config.rng_seed, ROUNDING))
    timings["round"] = time.perf_counter() - t0
    return InferenceResult(candidates, eta, mi, state, trace, network, timings)


def score(network: InferredNetwork, truth: Graph) -> dict:
    p, r, f = f_score(network.to_graph(), truth)
    return {"precision": p, "recall": r, "f_score": f,
            "alpha_mae": alpha_mae(network.alpha_map(), truth)}


def convergence_series(obs: ObservationMatrix, truth: Graph, config: RunConfig, r: Optional[int] = None):
    """Per-iteration F-score (of a rounded snapshot) and alpha MAE.

    Returns ``(rows, result)``; row t describes the state after iteration t,
    row 0 the initial state.
    """
    r = config.r if r is None else r
    snaps = []
    result = infer(obs, config, callback=lambda t, state: snaps.append((t, state)))
    candidates = result.candidates
    model = LikelihoodModel(obs, candidates)
    rounding_seed = derive_seed(config.rng_seed, ROUNDING)
    rows = []
    for t, state in snaps:
        net = select_best_sample(state.x, state.alpha, obs, candidates, r,
                                 rng=derive_seed(rounding_seed, t), model=model)
        m = score(net, truth)
        rows.append({"iteration": t, **m})
    return rows, result
