"""Independent-cascade simulation and probabilistic observation data."""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import List

import numpy as np

from .graph_io import Graph

UNCERTAINTY_STD = 0.1
WEIGHT_CLAMP = (0.01, 0.99)


class ObservationFormatError(ValueError):
    pass


@dataclass(frozen=True)
class ObservationMatrix:
    """``beta x n`` matrix; entry ``[l, i]`` is the probability node i ended process l infected."""

    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        if v.ndim != 2:
            raise ValueError("observations must be a 2-D array")
        if not np.all((v >= 0.0) & (v <= 1.0)):
            raise ValueError("observation entries must lie in [0, 1]")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    @property
    def beta(self) -> int:
        return self.values.shape[0]

    @property
    def n(self) -> int:
        return self.values.shape[1]

    def head(self, beta: int) -> "ObservationMatrix":
        """The first ``beta`` processes."""
        return ObservationMatrix(self.values[:beta].copy())


def process_rng(rng_seed: int, ell: int, purpose: int = 0) -> np.random.Generator:
    """Independent stream for process ``ell``; ``purpose`` separates seeding from spreading."""
    return np.random.default_rng(np.random.SeedSequence([rng_seed, ell, purpose]))


def sample_propagation_weights(graph: Graph, mean: float = 0.3, std: float = 0.05,
                               rng_seed: int = 0) -> Graph:
    if len(graph) == 0:
        raise ValueError("graph has no edges")
    if not 0.0 < mean < 1.0:
        raise ValueError("mean must lie in (0, 1)")
    if std < 0:
        raise ValueError("std must be non-negative")
    rng = np.random.default_rng(rng_seed)
    w = rng.normal(mean, std, size=len(graph)) if std > 0 else np.full(len(graph), mean)
    return graph.with_weights(np.clip(w, *WEIGHT_CLAMP))


def seed_count(n: int, ratio: float) -> int:
    return max(1, int(np.floor(n * ratio + 0.5)))


def select_seeds(n: int, ratio: float = 0.15, beta: int = 1, rng_seed: int = 0) -> List[np.ndarray]:
    if not 0.0 < ratio < 1.0:
        raise ValueError("ratio must lie in (0, 1)")
    if n < 1:
        raise ValueError("need at least one node")
    k = seed_count(n, ratio)
    return [np.sort(process_rng(rng_seed, ell).choice(n, size=k, replace=False))
            for ell in range(beta)]


class _Adjacency:
    """Children lists in CSR form, edges in sorted order."""

    def __init__(self, graph: Graph):
        parents, children, weights = graph.edge_arrays()
        if np.isnan(weights).any():
            raise ValueError("every edge needs a propagation weight")
        self.n = graph.n
        self.children = children
        self.weights = weights
        self.indptr = np.searchsorted(parents, np.arange(graph.n + 1))


def run_ic_cascade(graph, seeds, rng: np.random.Generator) -> np.ndarray:
    """One IC diffusion; returns a 0/1 status vector of length n.

    One uniform per edge is drawn up front (in sorted edge order) and edge
    ``(j, i)`` transmits iff its uniform is below its weight. Each edge is
    tried at most once, when its parent is newly infected, so this is the
    round-based IC process; sharing ``rng`` state couples runs edge by edge.
    """
    adj = graph if isinstance(graph, _Adjacency) else _Adjacency(graph)
    live = rng.random(len(adj.weights)) < adj.weights
    status = np.zeros(adj.n, dtype=np.int8)
    frontier = np.unique(np.asarray(seeds, dtype=np.int64))
    status[frontier] = 1
    while frontier.size:
        nxt = []
        for j in frontier:
            lo, hi = adj.indptr[j], adj.indptr[j + 1]
            hit = adj.children[lo:hi][live[lo:hi]]
            hit = hit[status[hit] == 0]
            status[hit] = 1
            nxt.append(hit)
        frontier = np.concatenate(nxt) if nxt else np.empty(0, dtype=np.int64)
    return status


def simulate_binary(weighted_graph: Graph, beta: int, seed_ratio: float = 0.15,
                    rng_seed: int = 0) -> np.ndarray:
    """``beta x n`` matrix of exact final infection statuses."""
    adj = _Adjacency(weighted_graph)
    seeds = select_seeds(weighted_graph.n, seed_ratio, beta, rng_seed)
    out = np.empty((beta, weighted_graph.n), dtype=np.int8)
    for ell, sd in enumerate(seeds):
        out[ell] = run_ic_cascade(adj, sd, process_rng(rng_seed, ell, purpose=1))
    return out


def inject_uncertainty(binary_matrix, mu: float = 0.3, rng_seed: int = 0) -> ObservationMatrix:
    """Replace each status s by clamp(|s - u|, 0, 1) with u ~ N(mu, 0.1); mu = 0 means u = 0."""
    s = np.asarray(binary_matrix, dtype=float)
    if not np.isin(s, (0.0, 1.0)).all():
        raise ValueError("binary matrix entries must be 0 or 1")
    if mu < 0:
        raise ValueError("mu must be non-negative")
    if mu == 0:
        return ObservationMatrix(s.copy())
    # one stream per process row, so a prefix of processes is reproducible on its own
    u = np.stack([process_rng(rng_seed, ell, purpose=2).normal(mu, UNCERTAINTY_STD, size=s.shape[1])
                  for ell in range(s.shape[0])]) if s.size else np.zeros(s.shape)
    return ObservationMatrix(np.clip(np.abs(s - u), 0.0, 1.0))


def simulate_observations(weighted_graph: Graph, beta: int, seed_ratio: float = 0.15,
                          mu: float = 0.3, rng_seed: int = 0) -> ObservationMatrix:
    binary = simulate_binary(weighted_graph, beta, seed_ratio, rng_seed)
    return inject_uncertainty(binary, mu, rng_seed=rng_seed)


def write_observations(obs: ObservationMatrix, path) -> None:
    lines = [f"beta={obs.beta},n={obs.n}"]
    lines += [",".join(f"{v:.6f}" for v in row) for row in obs.values]
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def read_observations(path) -> ObservationMatrix:
    lines = Path(path).read_text(encoding="utf-8").splitlines()
    if not lines:
        raise ObservationFormatError("empty observations file")
    try:
        header = dict(field.split("=") for field in lines[0].strip().split(","))
        beta, n = int(header["beta"]), int(header["n"])
    except (ValueError, KeyError):
        raise ObservationFormatError(f"bad header {lines[0]!r}, expected 'beta=<B>,n=<N>'") from None
    rows = [ln for ln in lines[1:] if ln.strip()]
    if len(rows) != beta:
        raise ObservationFormatError(f"header declares beta={beta} but found {len(rows)} rows")
    values = np.empty((beta, n))
    for r, line in enumerate(rows, start=1):
        cells = line.split(",")
        if len(cells) != n:
            raise ObservationFormatError(f"row {r} has {len(cells)} values, header declares n={n}")
        for c, cell in enumerate(cells):
            try:
                v = float(cell)
            except ValueError:
                raise ObservationFormatError(f"non-numeric cell {cell!r} at row {r}, column {c}") from None
            if not 0.0 <= v <= 1.0:
                raise ObservationFormatError(f"value {cell} outside [0, 1] at row {r}, column {c}")
            values[r - 1, c] = v
    return ObservationMatrix(values)
