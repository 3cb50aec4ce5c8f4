"""Mutual-information screening of candidate parents."""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import List, Sequence

import numpy as np

from .cascade_sim import ObservationMatrix

NEG_TOL = 1e-12
KMEANS_MAX_ITER = 100


def _xlogy_ratio(p, q):
    """Elementwise p * ln(p / q) with 0 * ln(0 / q) = 0."""
    p = np.asarray(p, dtype=float)
    q = np.asarray(q, dtype=float)
    out = np.zeros(np.broadcast(p, q).shape)
    mask = np.broadcast_to(p > 0, out.shape)
    pb = np.broadcast_to(p, out.shape)
    qb = np.broadcast_to(q, out.shape)
    out[mask] = pb[mask] * np.log(pb[mask] / qb[mask])
    return out


def mutual_information(obs: ObservationMatrix, i: int, j: int) -> float:
    """MI of the infection statuses of nodes i and j (natural log).

    Per process the joint is the product of the two marginals; the pooled
    joint and marginals are the averages over processes.
    """
    if i == j:
        raise ValueError("mutual information needs two distinct nodes")
    s = obs.values
    si, sj = s[:, i], s[:, j]
    pi = np.array([1.0 - si.mean(), si.mean()])
    pj = np.array([1.0 - sj.mean(), sj.mean()])
    ai = np.stack([1.0 - si, si])
    aj = np.stack([1.0 - sj, sj])
    joint = ai @ aj.T / obs.beta
    return float(_xlogy_ratio(joint, np.outer(pi, pj)).sum())


def mi_matrix(obs: ObservationMatrix) -> np.ndarray:
    """All pairwise MI values, ``n x n``; the diagonal is set to 0."""
    s = obs.values
    beta = obs.beta
    one = s.mean(axis=0)
    zero = 1.0 - one
    t = 1.0 - s
    p11 = s.T @ s / beta
    p10 = s.T @ t / beta
    p01 = t.T @ s / beta
    p00 = t.T @ t / beta
    mi = (_xlogy_ratio(p11, np.outer(one, one)) + _xlogy_ratio(p10, np.outer(one, zero))
          + _xlogy_ratio(p01, np.outer(zero, one)) + _xlogy_ratio(p00, np.outer(zero, zero)))
    mi = 0.5 * (mi + mi.T)
    np.fill_diagonal(mi, 0.0)
    return mi


def two_means_threshold(values: Sequence[float], max_iter: int = KMEANS_MAX_ITER) -> float:
    """Largest value of the cluster anchored at 0 in a 1-D 2-means.

    One mean stays at 0; the other starts at ``max(values)`` and tracks its
    cluster's average. Ties go to the non-zero cluster. Returns 0 if the zero
    cluster ends up empty.
    """
    v = np.asarray(values, dtype=float).ravel()
    if v.size == 0:
        raise ValueError("need at least one value")
    if (v < -NEG_TOL).any():
        raise ValueError("values must be non-negative")
    v = np.maximum(v, 0.0)
    mean1 = v.max()
    in_one = None
    for _ in range(max_iter):
        new = np.abs(v - mean1) <= v  # |v - 0| = v
        if in_one is not None and np.array_equal(new, in_one):
            break
        in_one = new
        if in_one.any():
            mean1 = v[in_one].mean()
    zero_cluster = v[~in_one]
    return float(zero_cluster.max()) if zero_cluster.size else 0.0


@dataclass(frozen=True)
class CandidateMap:
    """Candidate parents per node as flat pair arrays sorted by (child, parent).

    Pair ``p`` is the potential edge ``parents[p] -> children[p]``; the pairs
    of node i occupy ``offsets[i]:offsets[i + 1]``.
    """

    n: int
    parents: np.ndarray
    children: np.ndarray

    def __post_init__(self):
        parents = np.asarray(self.parents, dtype=np.int64)
        children = np.asarray(self.children, dtype=np.int64)
        order = np.lexsort((parents, children))
        parents, children = parents[order], children[order]
        if (parents == children).any():
            raise ValueError("a node cannot be its own candidate parent")
        if parents.size and (min(parents.min(), children.min()) < 0
                             or max(parents.max(), children.max()) >= self.n):
            raise ValueError("candidate ids out of range")
        if parents.size > 1:
            same = (np.diff(children) == 0) & (np.diff(parents) == 0)
            if same.any():
                raise ValueError("duplicate candidate pair")
        for a in (parents, children):
            a.setflags(write=False)
        object.__setattr__(self, "parents", parents)
        object.__setattr__(self, "children", children)
        object.__setattr__(self, "offsets", np.searchsorted(children, np.arange(self.n + 1)))

    @classmethod
    def from_sets(cls, n: int, sets) -> "CandidateMap":
        """Build from ``{child: iterable of parents}`` or a list indexed by child."""
        items = sets.items() if isinstance(sets, dict) else enumerate(sets)
        pairs = [(int(j), int(i)) for i, cs in items for j in cs]
        return cls(n, [p[0] for p in pairs], [p[1] for p in pairs])

    @classmethod
    def complete(cls, n: int) -> "CandidateMap":
        return cls.from_sets(n, [[j for j in range(n) if j != i] for i in range(n)])

    @property
    def size(self) -> int:
        return int(self.parents.size)

    def __len__(self) -> int:
        return self.size

    def pairs(self):
        return list(zip(self.parents.tolist(), self.children.tolist()))

    def parents_of(self, i: int) -> List[int]:
        return self.parents[self.offsets[i]:self.offsets[i + 1]].tolist()

    def as_sets(self) -> List[List[int]]:
        return [self.parents_of(i) for i in range(self.n)]

    def index(self) -> dict:
        """``{(parent, child): pair index}``."""
        return {pair: k for k, pair in enumerate(self.pairs())}

    def restrict_to(self, nodes) -> "CandidateMap":
        """Keep only the pairs whose child is in ``nodes``."""
        keep = np.isin(self.children, np.asarray(list(nodes), dtype=np.int64))
        return CandidateMap(self.n, self.parents[keep], self.children[keep])


def build_candidate_sets(obs: ObservationMatrix):
    """Prune candidate parents whose MI with the child is at most the 2-means threshold.

    Returns ``(candidates, eta, mi)``.
    """
    if obs.n < 2:
        raise ValueError("need at least two nodes")
    mi = mi_matrix(obs)
    if (mi < -NEG_TOL).any():
        raise ArithmeticError("negative mutual information beyond rounding")
    iu = np.triu_indices(obs.n, k=1)
    eta = two_means_threshold(np.maximum(mi[iu], 0.0))
    keep = mi > eta
    np.fill_diagonal(keep, False)
    children, parents = np.nonzero(keep)
    return CandidateMap(obs.n, parents, children), eta, mi


def write_mi_dump(mi: np.ndarray, eta: float, path) -> None:
    n = mi.shape[0]
    lines = [f"eta={eta:.6e},n={n}"]
    lines += [",".join(f"{v:.6e}" for v in row) for row in mi]
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")
