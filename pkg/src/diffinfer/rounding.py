"""Integral edge decisions from the relaxed solution by repeated sampling."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .cascade_sim import ObservationMatrix
from .graph_io import Graph
from .likelihood import LikelihoodModel
from .mi_prune import CandidateMap


@dataclass
class InferredNetwork:
    candidates: CandidateMap
    x_hat: np.ndarray  # 0/1 per candidate pair
    alpha: np.ndarray  # learned alpha per candidate pair (all pairs, not only selected)
    objective: float
    sample_index: int = 0

    def edges(self):
        return [pair for pair, keep in zip(self.candidates.pairs(), self.x_hat) if keep]

    def to_graph(self) -> Graph:
        """Selected edges weighted by their learned alpha."""
        sel = self.x_hat.astype(bool)
        pairs = zip(self.candidates.parents[sel].tolist(), self.candidates.children[sel].tolist())
        return Graph(self.candidates.n, {p: float(a) for p, a in zip(pairs, self.alpha[sel])})

    def alpha_map(self):
        return dict(zip(self.candidates.pairs(), self.alpha.tolist()))


def sample_binary(x_star, rng: np.random.Generator) -> np.ndarray:
    """Independent Bernoulli(x*) draw per entry."""
    x_star = np.asarray(x_star, dtype=float)
    return (rng.random(x_star.shape) < x_star).astype(np.int8)


def select_best_sample(x_star, alpha_star, obs: ObservationMatrix, candidates: CandidateMap,
                       r: int = 100, rng=None, model: LikelihoodModel | None = None) -> InferredNetwork:
    """Draw ``r`` binary samples from ``x_star`` and keep the one with the highest likelihood.

    Ties go to the earliest sample.
    """
    if r < 1:
        raise ValueError("need at least one sample")
    rng = rng if isinstance(rng, np.random.Generator) else np.random.default_rng(rng)
    model = model or LikelihoodModel(obs, candidates)
    alpha_star = np.asarray(alpha_star, dtype=float)
    logterm = model.log_terms(alpha_star)
    best, best_val, best_k = None, -np.inf, 0
    for k in range(r):
        xs = sample_binary(x_star, rng)
        val = float(np.sum(model.node_objectives(xs.astype(float), alpha_star, logterm=logterm)))
        if best is None or val > best_val:
            best, best_val, best_k = xs, val, k
    return InferredNetwork(candidates, best, alpha_star.copy(), best_val, best_k)
