"""Alternating projected-gradient ascent on the relaxed likelihood.

Each outer iteration updates all edge indicators ``x`` and then all
propagation probabilities ``alpha``. Within a block every child node is
handled on its own (the objective is a sum of per-node terms that share no
variables): its ascent direction is the gradient with components pointing
out of the box zeroed, the step starts at the largest feasible length and is
halved until that node's objective strictly increases.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, List, Optional

import numpy as np

from .cascade_sim import ObservationMatrix
from .likelihood import LikelihoodModel, RelaxedState
from .mi_prune import CandidateMap

BOUNDARY_TOL = 1e-12
SKIPPED = -1  # node had a zero direction, no step attempted
SCREEN_SLACK = 1e-9


@dataclass
class SolverConfig:
    tol: float = 0.01
    max_iter: int = 1000
    max_halvings: int = 60
    init_x: float = 0.5
    init_alpha: float = 0.5
    rng_seed: int = 0

    def __post_init__(self):
        if not self.tol > 0:
            raise ValueError("tol must be positive")
        if self.max_iter < 1 or self.max_halvings < 1:
            raise ValueError("max_iter and max_halvings must be at least 1")
        for name in ("init_x", "init_alpha"):
            if not 0.0 <= getattr(self, name) <= 1.0:
                raise ValueError(f"{name} must lie in [0, 1]")


@dataclass
class IterationRecord:
    iteration: int
    objective_before: float
    objective_x: float
    objective_alpha: float
    m: np.ndarray  # halvings per node in the x-block (SKIPPED / max_halvings + 1 = none)
    k: np.ndarray  # same for the alpha-block
    max_variation: float
    x_step_taken: bool
    alpha_step_taken: bool
    # sum of the per-node objective increases of each block; positive whenever
    # a step was taken, even if the rounded totals above happen to tie
    gain_x: float = 0.0
    gain_alpha: float = 0.0


@dataclass
class IterationTrace:
    initial_objective: float
    max_halvings: int
    records: List[IterationRecord] = field(default_factory=list)
    converged: bool = False

    def __len__(self):
        return len(self.records)

    def objectives(self) -> np.ndarray:
        """Initial value followed by the value after each block update."""
        vals = [self.initial_objective]
        for r in self.records:
            vals += [r.objective_x, r.objective_alpha]
        return np.array(vals)

    def backtrack_counts(self):
        """``(attempted, null)`` backtracking searches over all iterations and blocks."""
        attempted = null = 0
        for r in self.records:
            for arr in (r.m, r.k):
                attempted += int(np.sum(arr != SKIPPED))
                null += int(np.sum(arr > self.max_halvings))
        return attempted, null

    def write(self, path) -> None:
        lines = ["iteration\tobjective_x\tobjective_alpha\tm\tk\tmax_variation"]
        for r in self.records:
            lines.append(
                f"{r.iteration}\t{float(r.objective_x)!r}\t{float(r.objective_alpha)!r}\t"
                f"{_summ(r.m)}\t{_summ(r.k)}\t{float(r.max_variation)!r}"
            )
        Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def _summ(arr) -> str:
    used = arr[arr != SKIPPED]
    return str(int(used.max())) if used.size else str(SKIPPED)


def read_trace(path):
    """Rows of a trace report as dicts of floats/ints."""
    lines = Path(path).read_text(encoding="utf-8").splitlines()
    keys = lines[0].split("\t")
    rows = []
    for line in lines[1:]:
        vals = line.split("\t")
        rows.append({k: (int(v) if k in ("iteration", "m", "k") else float(v))
                     for k, v in zip(keys, vals)})
    return rows


def project_direction(values, gradient, tol: float = BOUNDARY_TOL) -> np.ndarray:
    """Gradient with components that would leave [0, 1] at an active bound zeroed."""
    values = np.asarray(values, dtype=float)
    d = np.array(gradient, dtype=float, copy=True)
    d[(values <= tol) & (d < 0)] = 0.0
    d[(values >= 1.0 - tol) & (d > 0)] = 0.0
    return d


def _entry_bounds(values, direction) -> np.ndarray:
    values = np.asarray(values, dtype=float)
    direction = np.asarray(direction, dtype=float)
    out = np.full(values.shape, np.inf)
    neg, pos = direction < 0, direction > 0
    out[neg] = values[neg] / -direction[neg]
    out[pos] = (1.0 - values[pos]) / direction[pos]
    return out


def max_feasible_step(values, direction) -> float:
    """Largest step keeping ``values + step * direction`` inside [0, 1]; inf for a zero direction."""
    b = _entry_bounds(values, direction)
    return float(b.min()) if b.size else math.inf


def _block_values(state, block):
    if block == "x":
        return state.x
    if block == "alpha":
        return state.alpha
    raise ValueError(f"unknown block {block!r}")


def backtrack_step(state: RelaxedState, obs: ObservationMatrix, candidates: CandidateMap,
                   block: str, direction, theta_max: float, max_halvings: int = 60,
                   model: Optional[LikelihoodModel] = None):
    """Halve ``theta_max`` until the objective strictly increases along ``direction``.

    Treats the block as one unit. Returns ``(step, new_state, halvings)``;
    when no step within ``max_halvings`` halvings helps, returns
    ``(0.0, state, None)``.
    """
    model = model or LikelihoodModel(obs, candidates)
    direction = np.asarray(direction, dtype=float)
    if not np.any(direction) or not math.isfinite(theta_max):
        raise ValueError("backtracking needs a nonzero direction and a finite bound")
    base = model.objective(state.x, state.alpha)
    values = _block_values(state, block)
    for m in range(max_halvings + 1):
        step = theta_max / 2.0 ** m
        trial = np.clip(values + step * direction, 0.0, 1.0)
        new = RelaxedState(trial, state.alpha.copy()) if block == "x" \
            else RelaxedState(state.x.copy(), trial)
        if model.objective(new.x, new.alpha) > base:
            return step, new, m
    return 0.0, state, None


class _NodeBlockUpdater:
    """Per-node projected ascent step on one block, vectorized over nodes."""

    def __init__(self, model: LikelihoodModel, max_halvings: int, screen: bool = True):
        self.model = model
        self.use_screen = screen
        self.max_halvings = max_halvings
        offsets = model.cands.offsets
        self.sizes = model.sizes
        self.nonempty = np.flatnonzero(self.sizes > 0)
        self.starts = offsets[:-1][self.nonempty]

    def step(self, x, alpha, block, node_obj, logterm=None):
        """Update ``x`` or ``alpha`` in place; returns per-node halving counts.

        A node accepts the smallest m whose exactly evaluated objective beats
        its current value. Trial steps are screened with a cheap line
        evaluation first (with a small slack so no true improvement is
        screened out) and then confirmed exactly.
        """
        model = self.model
        n = model.n
        halvings = np.full(n, SKIPPED, dtype=np.int64)
        if not self.nonempty.size:
            return halvings
        values = x if block == "x" else alpha
        gfun = model.grad_x if block == "x" else model.grad_alpha
        grad = gfun(x, alpha, logterm=logterm)
        direction = project_direction(values, grad)
        theta = np.full(n, np.inf)
        theta[self.nonempty] = np.minimum.reduceat(_entry_bounds(values, direction), self.starts)
        pending = np.flatnonzero(np.isfinite(theta))
        screen = None
        if pending.size and self.use_screen:
            line = model.x_line if block == "x" else model.alpha_line
            screen_nodes, screen = line(x, alpha, direction, pending, logterm=logterm)
            pos_of = np.full(n, -1)
            pos_of[screen_nodes] = np.arange(screen_nodes.size)
        reuse = screen is not None and block == "alpha" and logterm is not None
        if reuse:
            work = logterm.copy()
        for m in range(self.max_halvings + 1):
            if not pending.size:
                break
            cand = pending
            if screen is not None:
                col = pos_of[pending]
                est = screen(theta[pending] / 2.0 ** m, col)
                ref = node_obj[pending]
                passed = est > ref - SCREEN_SLACK * np.maximum(1.0, np.abs(ref))
                cand = pending[passed]
                if not cand.size:
                    continue
                if reuse:
                    p, lt = screen.moving_logs(passed)
                    work[p] = lt
            idx = model.pair_index(cand)
            steps = np.repeat(theta[cand] / 2.0 ** m, self.sizes[cand])
            old = values[idx].copy()
            values[idx] = np.clip(old + steps * direction[idx], 0.0, 1.0)
            if block == "x":
                trial = model.node_objectives(x, alpha, cand, logterm=logterm)
            elif reuse:
                trial = model.node_objectives(x, alpha, cand, logterm=work)
            else:
                trial = model.node_objectives(x, alpha, cand)
            ok = trial > node_obj[cand]
            node_obj[cand[ok]] = trial[ok]
            halvings[cand[ok]] = m
            rollback = np.repeat(~ok, self.sizes[cand])
            values[idx[rollback]] = old[rollback]
            if reuse:
                work[idx[rollback]] = logterm[idx[rollback]]
            pending = np.setdiff1d(pending, cand[ok], assume_unique=True)
        halvings[pending] = self.max_halvings + 1
        return halvings


def alternate_maximize(obs: ObservationMatrix, candidates: CandidateMap,
                       config: Optional[SolverConfig] = None,
                       callback: Optional[Callable[[int, RelaxedState], None]] = None):
    """Run x/alpha alternating ascent to convergence.

    Stops once no x or alpha entry moves by ``config.tol`` or more within an
    iteration, or after ``config.max_iter`` iterations. ``callback(t, state)``
    sees a copy of the state before the first and after every iteration.
    Returns ``(state, trace)``.
    """
    config = config or SolverConfig()
    if candidates.size == 0:
        raise ValueError("candidate map is empty; nothing to infer")
    model = LikelihoodModel(obs, candidates)
    state = RelaxedState.constant(candidates, config.init_x, config.init_alpha)
    x, alpha = state.x, state.alpha
    node_obj = model.node_objectives(x, alpha)
    trace = IterationTrace(math.fsum(node_obj), config.max_halvings)
    updater = _NodeBlockUpdater(model, config.max_halvings)
    if callback is not None:
        callback(0, state.copy())
    for t in range(1, config.max_iter + 1):
        before = trace.records[-1].objective_alpha if trace.records else trace.initial_objective
        x_prev, a_prev = x.copy(), alpha.copy()
        logterm = model.log_terms(alpha)  # alpha is fixed until the alpha-block
        obj_prev = node_obj.copy()
        m = updater.step(x, alpha, "x", node_obj, logterm)
        obj_x = math.fsum(node_obj)
        gain_x = math.fsum(node_obj - obj_prev)
        obj_prev = node_obj.copy()
        k = updater.step(x, alpha, "alpha", node_obj, logterm)
        obj_a = math.fsum(node_obj)
        gain_a = math.fsum(node_obj - obj_prev)
        variation = float(max(np.max(np.abs(x - x_prev)), np.max(np.abs(alpha - a_prev))))
        trace.records.append(IterationRecord(
            t, before, obj_x, obj_a, m, k, variation,
            bool(np.any(x != x_prev)), bool(np.any(alpha != a_prev)), gain_x, gain_a,
        ))
        if callback is not None:
            callback(t, state.copy())
        if variation < config.tol:
            trace.converged = True
            break
    return state, trace
