"""Brute-force checks for the analytic likelihood machinery.

``reference_objectives`` re-derives the relaxed log-likelihood directly from
its definition with dense per-node bookkeeping; it shares no code with
``likelihood.LikelihoodModel``.
"""

from __future__ import annotations

import itertools

import numpy as np

from .likelihood import EPS, RelaxedState

MAX_EXHAUSTIVE_PAIRS = 20


def reference_objectives(xs, alpha, obs, candidates) -> np.ndarray:
    """Objective for each row of ``xs`` (shape ``(B, P)``) at fixed ``alpha``."""
    xs = np.atleast_2d(np.asarray(xs, dtype=float))
    s = np.asarray(obs.values, dtype=float)
    parents = np.asarray(candidates.parents)
    children = np.asarray(candidates.children)
    alpha = np.asarray(alpha, dtype=float)
    n = candidates.n
    member = np.zeros((len(parents), n))
    member[np.arange(len(parents)), children] = 1.0
    logs = np.log(np.maximum(1.0 - s[:, parents] * alpha[None, :], EPS))  # (beta, P)
    log_surv = np.einsum("bp,lp,pi->bli", xs, logs, member)
    one_minus = np.maximum(1.0 - np.exp(log_surv), EPS)
    # nodes without candidate parents carry no variables and are left out
    has_parents = member.sum(axis=0) > 0
    hit = np.where((s[None] > 0) & has_parents, s[None] * np.log(one_minus), 0.0).sum(axis=(1, 2))
    miss_coef = 1.0 - s[:, children]  # (beta, P)
    miss = xs @ (miss_coef * logs).sum(axis=0)
    return hit + miss


def reference_objective(state: RelaxedState, obs, candidates) -> float:
    return float(reference_objectives(state.x[None], state.alpha, obs, candidates)[0])


def finite_diff_gradient(state: RelaxedState, obs, candidates, block: str, h: float = 1e-6) -> np.ndarray:
    """Central differences of the reference objective in each entry of ``block``."""
    if h <= 0:
        raise ValueError("h must be positive")
    if block not in ("x", "alpha"):
        raise ValueError(f"unknown block {block!r}")
    values = state.x if block == "x" else state.alpha
    if np.any((values <= h) | (values >= 1.0 - h)):
        raise ValueError("finite differences need every entry farther than h from the box boundary")
    grad = np.empty(values.size)
    for p in range(values.size):
        up, down = values.copy(), values.copy()
        up[p] += h
        down[p] -= h
        if block == "x":
            f_up = reference_objective(RelaxedState(up, state.alpha), obs, candidates)
            f_down = reference_objective(RelaxedState(down, state.alpha), obs, candidates)
        else:
            f_up = reference_objective(RelaxedState(state.x, up), obs, candidates)
            f_down = reference_objective(RelaxedState(state.x, down), obs, candidates)
        grad[p] = (f_up - f_down) / (2.0 * h)
    return grad


def exhaustive_binary_optimum(obs, candidates, alpha_fixed, chunk: int = 4096):
    """Best 0/1 assignment of all candidate pairs at fixed alpha.

    Enumerates assignments in lexicographic order (pair 0 most significant)
    and keeps the first maximizer. Returns ``(x, objective, n_evaluated)``.
    """
    P = candidates.size
    if P > MAX_EXHAUSTIVE_PAIRS:
        raise ValueError(f"{P} candidate pairs is too many to enumerate (max {MAX_EXHAUSTIVE_PAIRS})")
    best_x, best_val, seen = None, -np.inf, 0
    it = itertools.product((0.0, 1.0), repeat=P)
    while True:
        block = np.array(list(itertools.islice(it, chunk)), dtype=float).reshape(-1, P)
        if not block.shape[0]:
            break
        vals = reference_objectives(block, alpha_fixed, obs, candidates)
        seen += block.shape[0]
        k = int(np.argmax(vals))
        if vals[k] > best_val:
            best_x, best_val = block[k].astype(np.int8), float(vals[k])
    return best_x, best_val, seen
