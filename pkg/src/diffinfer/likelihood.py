"""Relaxed log-likelihood of probabilistic infection data and its gradients.

Every variable is indexed by candidate pair (see ``CandidateMap``): ``x[p]``
is the relaxed indicator of edge ``parents[p] -> children[p]`` and
``alpha[p]`` its propagation probability. All logarithms are natural and
every log / denominator argument is clamped below by ``EPS``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .cascade_sim import ObservationMatrix
from .mi_prune import CandidateMap

EPS = 1e-12


@dataclass
class RelaxedState:
    x: np.ndarray
    alpha: np.ndarray

    def __post_init__(self):
        self.x = np.asarray(self.x, dtype=float)
        self.alpha = np.asarray(self.alpha, dtype=float)
        if self.x.shape != self.alpha.shape or self.x.ndim != 1:
            raise ValueError("x and alpha must be 1-D arrays of equal length")

    @classmethod
    def constant(cls, candidates: CandidateMap, x: float = 0.5, alpha: float = 0.5):
        return cls(np.full(candidates.size, float(x)), np.full(candidates.size, float(alpha)))

    def is_feasible(self) -> bool:
        return bool(np.all((self.x >= 0) & (self.x <= 1) & (self.alpha >= 0) & (self.alpha <= 1)))

    def copy(self) -> "RelaxedState":
        return RelaxedState(self.x.copy(), self.alpha.copy())

    def as_dict(self, candidates: CandidateMap):
        """``({(j, i): x}, {(j, i): alpha})``."""
        pairs = candidates.pairs()
        return dict(zip(pairs, self.x.tolist())), dict(zip(pairs, self.alpha.tolist()))


def _safe_log(v):
    return np.log(np.maximum(v, EPS))


def _log_one_minus(sp, a):
    """ln(max(1 - sp * a, EPS)) for ``sp`` of shape (pairs, beta), ``a`` per pair."""
    t = sp * a[:, None]
    np.subtract(1.0, t, out=t)
    np.maximum(t, EPS, out=t)
    return np.log(t, out=t)


def _rowsum_prod(a, b):
    return np.einsum("pl,pl->p", a, b)


class LikelihoodModel:
    """Objective and gradients for fixed observations and candidate pairs.

    Arrays are stored pair-major (``pairs x beta``) and every reduction runs
    along contiguous rows or over whole row groups, so evaluating a subset
    of nodes reproduces the full evaluation bit for bit.

    Most methods accept ``logterm``, the full ``P x beta`` matrix of
    ln(1 - s_j alpha_ji) from ``log_terms(alpha)``, to skip recomputing it.
    """

    def __init__(self, obs: ObservationMatrix, candidates: CandidateMap):
        if obs.n != candidates.n:
            raise ValueError(f"observations have n={obs.n}, candidates n={candidates.n}")
        self.obs = obs
        self.cands = candidates
        self.n = candidates.n
        self.s_t = np.ascontiguousarray(obs.values.T)
        self.s_par = np.ascontiguousarray(self.s_t[candidates.parents])
        self.miss_t = 1.0 - self.s_t
        self.sizes = np.diff(candidates.offsets)
        self._all_nodes = np.arange(self.n)

    # -- helpers -----------------------------------------------------------
    def _nodes(self, nodes):
        if nodes is None:
            return self._all_nodes
        return np.unique(np.asarray(nodes, dtype=np.int64))

    def pair_index(self, nodes=None) -> np.ndarray:
        if nodes is None:
            return np.arange(self.cands.size)
        mask = np.zeros(self.n, dtype=bool)
        mask[nodes] = True
        return np.flatnonzero(np.repeat(mask, self.sizes))

    def _rows(self, a, idx):
        return a if idx.size == self.cands.size else a[idx]

    def _group_sum(self, a, nodes):
        """Sum the rows (or entries) of ``a`` belonging to each node in ``nodes``."""
        sizes = self.sizes[nodes]
        out = np.zeros((len(nodes),) + a.shape[1:])
        nonempty = sizes > 0
        if nonempty.any():
            starts = np.concatenate(([0], np.cumsum(sizes)[:-1]))[nonempty]
            out[nonempty] = np.add.reduceat(a, starts, axis=0)
        return out

    def log_terms(self, alpha, idx=None) -> np.ndarray:
        idx = np.arange(self.cands.size) if idx is None else idx
        return _log_one_minus(self._rows(self.s_par, idx), alpha[idx])

    def _pieces(self, x, alpha, nodes, logterm=None):
        nodes = self._nodes(nodes)
        idx = self.pair_index(nodes)
        lt = self.log_terms(alpha, idx) if logterm is None else self._rows(logterm, idx)
        log_surv = self._group_sum(lt * x[idx, None], nodes)
        return nodes, idx, lt, log_surv

    def _terms(self, nodes, log_surv):
        """Row sums of s ln(1 - P) + (1 - s) ln P for the given nodes.

        Every pair of child i carries the same miss weight 1 - s_i, so the
        miss part collapses onto the node's log survival product. Entries
        with a zero coefficient contribute exactly 0.
        """
        s_node = self.s_t[nodes]
        h = np.where(s_node > 0, s_node * _safe_log(-np.expm1(log_surv)), 0.0)
        h += self.miss_t[nodes] * log_surv
        return h.sum(axis=1)

    # -- objective ---------------------------------------------------------
    def node_objectives(self, x, alpha, nodes=None, logterm=None) -> np.ndarray:
        """Per-node objective terms for the sorted unique ``nodes`` (all by default).

        A node without candidate parents has no variables; its term is a
        constant and is reported as 0.
        """
        nodes, idx, lt, log_surv = self._pieces(x, alpha, nodes, logterm)
        return np.where(self.sizes[nodes] > 0, self._terms(nodes, log_surv), 0.0)

    def objective(self, x, alpha) -> float:
        return float(np.sum(self.node_objectives(x, alpha)))

    # -- gradients ---------------------------------------------------------
    def factor(self, x, alpha, nodes=None, logterm=None):
        """Per (node, process) factor s * P / (1 - P) - (1 - s) with P the survival product."""
        nodes, idx, lt, log_surv = self._pieces(x, alpha, nodes, logterm)
        s_node = self.s_t[nodes]
        fac = s_node * np.exp(log_surv) / np.maximum(-np.expm1(log_surv), EPS) - (1.0 - s_node)
        return fac, nodes, idx, lt

    def grad_x(self, x, alpha, nodes=None, logterm=None) -> np.ndarray:
        """Gradient w.r.t. the x entries of ``nodes``' pairs (all pairs by default)."""
        fac, nodes, idx, lt = self.factor(x, alpha, nodes, logterm)
        return -_rowsum_prod(lt, np.repeat(fac, self.sizes[nodes], axis=0))

    def grad_alpha(self, x, alpha, nodes=None, logterm=None) -> np.ndarray:
        fac, nodes, idx, _ = self.factor(x, alpha, nodes, logterm)
        sp = self._rows(self.s_par, idx)
        ratio = sp * alpha[idx, None]
        np.subtract(1.0, ratio, out=ratio)
        np.maximum(ratio, EPS, out=ratio)
        np.divide(sp, ratio, out=ratio)
        return x[idx] * _rowsum_prod(ratio, np.repeat(fac, self.sizes[nodes], axis=0))

    # -- cheap line evaluations for backtracking -----------------------------
    def x_line(self, x, alpha, direction, nodes, logterm=None):
        """Per-node objective along ``x + t * direction`` as a cheap function of per-node t.

        With alpha fixed the log survival product is linear in t, so each
        trial costs O(beta) per node instead of O(beta |C_i|). Agrees with
        ``node_objectives`` up to rounding. Returns ``(nodes, evaluate)``
        where ``evaluate(t, which)`` takes positions into ``nodes``.
        """
        nodes = self._nodes(nodes)
        idx = self.pair_index(nodes)
        lt = self.log_terms(alpha, idx) if logterm is None else self._rows(logterm, idx)
        base = self._group_sum(lt * x[idx, None], nodes)
        slope = self._group_sum(lt * direction[idx, None], nodes)

        def evaluate(t, which):
            ls = base[which] + t[:, None] * slope[which]
            return self._terms(nodes[which], ls)

        return nodes, evaluate

    def alpha_line(self, x, alpha, direction, nodes, logterm=None):
        """Per-node objective along ``clip(alpha + t * direction)``, recomputing moving pairs only.

        Every node in ``nodes`` must have at least one nonzero direction entry.
        Same calling convention as ``x_line``; ``evaluate.moving_logs(keep)``
        returns the moving pairs' log terms from the latest trial so an exact
        check of the same trial need not recompute them.
        """
        nodes = self._nodes(nodes)
        idx = self.pair_index(nodes)
        moving = direction[idx] != 0
        lt = self.log_terms(alpha, idx) if logterm is None else self._rows(logterm, idx)
        still = np.where(moving, 0.0, x[idx])
        ls_static = self._group_sum(lt * still[:, None], nodes)
        mv_idx = idx[moving]
        mv_count = np.add.reduceat(moving.astype(np.int64),
                                   np.concatenate(([0], np.cumsum(self.sizes[nodes])[:-1])))
        mv_start = np.concatenate(([0], np.cumsum(mv_count)[:-1]))
        sp_mv = self.s_par[mv_idx]
        x_mv = x[mv_idx]
        a_mv = alpha[mv_idx]
        d_mv = direction[mv_idx]
        last = {}

        def evaluate(t, which):
            counts = mv_count[which]
            starts = np.concatenate(([0], np.cumsum(counts)[:-1]))
            if which.size == nodes.size:
                rows = slice(None)
            else:
                rows = np.repeat(mv_start[which] - starts, counts) + np.arange(counts.sum())
            a = np.repeat(t, counts)
            a *= d_mv[rows]
            a += a_mv[rows]
            np.clip(a, 0.0, 1.0, out=a)
            lt_t = _log_one_minus(sp_mv[rows], a)
            last.update(counts=counts, rows=rows, lt=lt_t)
            ls = ls_static[which] + np.add.reduceat(lt_t * x_mv[rows, None], starts, axis=0)
            return self._terms(nodes[which], ls)

        def moving_logs(keep):
            """Pair indices and log terms of the last trial, for the nodes where ``keep``."""
            counts = last["counts"]
            sel = np.repeat(keep, counts)
            return mv_idx[last["rows"]][sel], last["lt"][sel]

        evaluate.moving_logs = moving_logs
        return nodes, evaluate


# -- functional API ---------------------------------------------------------

def _model(obs, candidates):
    return LikelihoodModel(obs, candidates)


def survival_product(state: RelaxedState, obs: ObservationMatrix, candidates: CandidateMap,
                     i: int, ell: int) -> float:
    """Probability node i escapes every candidate parent in process ``ell``."""
    lo, hi = candidates.offsets[i], candidates.offsets[i + 1]  # node i's pairs
    sj = obs.values[ell, candidates.parents[lo:hi]]
    return float(np.exp(np.sum(state.x[lo:hi] * _safe_log(1.0 - sj * state.alpha[lo:hi]))))


def node_process_factor(state: RelaxedState, obs: ObservationMatrix, candidates: CandidateMap,
                        i: int, ell: int) -> float:
    surv = survival_product(state, obs, candidates, i, ell)
    s = obs.values[ell, i]
    return float(s * surv / max(1.0 - surv, EPS) - (1.0 - s))


def objective(state: RelaxedState, obs: ObservationMatrix, candidates: CandidateMap) -> float:
    return _model(obs, candidates).objective(state.x, state.alpha)


def grad_alpha(state: RelaxedState, obs: ObservationMatrix, candidates: CandidateMap) -> np.ndarray:
    return _model(obs, candidates).grad_alpha(state.x, state.alpha)


def grad_x(state: RelaxedState, obs: ObservationMatrix, candidates: CandidateMap) -> np.ndarray:
    return _model(obs, candidates).grad_x(state.x, state.alpha)
