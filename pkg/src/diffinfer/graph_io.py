"""Directed diffusion graphs, their TSV edge-list format, and a random generator."""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, Iterable, Optional, Tuple

import numpy as np

Edge = Tuple[int, int]


class GraphFormatError(ValueError):
    """Raised when a graph file cannot be parsed."""


@dataclass(frozen=True)
class Graph:
    """Directed graph on nodes ``0..n-1``.

    ``edges`` maps ``(parent, child)`` to a propagation weight in [0, 1] or
    ``None`` when the edge is unweighted. Treat instances as read-only.
    """

    n: int
    edges: Dict[Edge, Optional[float]] = field(default_factory=dict)

    def __post_init__(self):
        if self.n < 0:
            raise ValueError("node count must be non-negative")
        for (j, i), w in self.edges.items():
            if j == i:
                raise ValueError(f"self-loop on node {j}")
            if not (0 <= j < self.n and 0 <= i < self.n):
                raise ValueError(f"edge ({j}, {i}) outside [0, {self.n})")
            if w is not None and not 0.0 <= w <= 1.0:
                raise ValueError(f"weight {w} of edge ({j}, {i}) outside [0, 1]")

    @property
    def edge_set(self) -> frozenset:
        return frozenset(self.edges)

    @property
    def is_weighted(self) -> bool:
        return all(w is not None for w in self.edges.values())

    def __len__(self) -> int:
        return len(self.edges)

    def sorted_edges(self):
        return sorted(self.edges)

    def edge_arrays(self):
        """Return ``(parents, children, weights)`` arrays sorted by edge."""
        es = self.sorted_edges()
        parents = np.array([e[0] for e in es], dtype=np.int64)
        children = np.array([e[1] for e in es], dtype=np.int64)
        weights = np.array(
            [np.nan if self.edges[e] is None else self.edges[e] for e in es],
            dtype=float,
        )
        return parents, children, weights

    def with_weights(self, weights: Iterable[float]) -> "Graph":
        """New graph with ``weights`` assigned in sorted-edge order."""
        es = self.sorted_edges()
        ws = [float(w) for w in weights]
        if len(ws) != len(es):
            raise ValueError("need exactly one weight per edge")
        return Graph(self.n, dict(zip(es, ws)))


def generate_random_graph(n: int, avg_degree: float, rng_seed: int) -> Graph:
    """Uniform random directed graph with ``round(n * avg_degree)`` edges.

    Edges are drawn without replacement from the ``n (n - 1)`` ordered
    non-self pairs.
    """
    if n < 2:
        raise ValueError("need at least 2 nodes")
    if avg_degree <= 0:
        raise ValueError("avg_degree must be positive")
    n_pairs = n * (n - 1)
    m = int(round(n * avg_degree))
    if m > n_pairs:
        raise ValueError(
            f"avg_degree {avg_degree} requests {m} edges but only {n_pairs} "
            "ordered pairs exist"
        )
    rng = np.random.default_rng(rng_seed)
    picks = np.sort(rng.choice(n_pairs, size=m, replace=False))
    parents = picks // (n - 1)
    offs = picks % (n - 1)
    children = offs + (offs >= parents)
    return Graph(n, {(int(j), int(i)): None for j, i in zip(parents, children)})


def save_graph(graph: Graph, path) -> None:
    lines = [f"#n={graph.n}"]
    for j, i in graph.sorted_edges():
        w = graph.edges[(j, i)]
        lines.append(f"{j}\t{i}" if w is None else f"{j}\t{i}\t{float(w)!r}")
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def load_graph(path) -> Graph:
    text = Path(path).read_text(encoding="utf-8")
    declared_n = None
    edges: Dict[Edge, Optional[float]] = {}
    max_id = -1
    for lineno, raw in enumerate(text.split("\n"), start=1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            if line.startswith("#n="):
                try:
                    declared_n = int(line[3:])
                except ValueError:
                    raise GraphFormatError(f"bad node count at line {lineno}") from None
            continue
        parts = line.split("\t")
        if len(parts) not in (2, 3):
            raise GraphFormatError(
                f"expected 2 or 3 tab-separated fields at line {lineno}, got {len(parts)}"
            )
        try:
            j, i = int(parts[0]), int(parts[1])
        except ValueError:
            raise GraphFormatError(f"non-integer node id at line {lineno}") from None
        if j < 0 or i < 0 or (declared_n is not None and max(i, j) >= declared_n):
            raise GraphFormatError(f"node id out of range at line {lineno}")
        if j == i:
            raise GraphFormatError(f"self-loop at line {lineno}")
        w = None
        if len(parts) == 3:
            try:
                w = float(parts[2])
            except ValueError:
                raise GraphFormatError(f"non-numeric weight at line {lineno}") from None
            if not 0.0 <= w <= 1.0:
                raise GraphFormatError(f"weight outside [0, 1] at line {lineno}")
        if (j, i) in edges:
            raise GraphFormatError(f"duplicate edge at line {lineno}")
        edges[(j, i)] = w
        max_id = max(max_id, i, j)
    n = declared_n if declared_n is not None else max_id + 1
    return Graph(n, edges)
