"""Accuracy of an inferred network against the ground truth."""

from __future__ import annotations

from dataclasses import dataclass, asdict
from pathlib import Path
from typing import Dict, Iterable, List, Mapping, Tuple

import numpy as np

from .graph_io import Graph


@dataclass
class EdgeScores:
    precision: float
    recall: float
    f_score: float

    def __iter__(self):
        return iter((self.precision, self.recall, self.f_score))


def f_score(inferred: Graph, truth: Graph) -> EdgeScores:
    """Directed-edge precision, recall and F-score (weights ignored)."""
    if inferred.n != truth.n:
        raise ValueError(f"node universes differ: {inferred.n} vs {truth.n}")
    inf, tru = inferred.edge_set, truth.edge_set
    tp = len(inf & tru)
    p = tp / len(inf) if inf else 0.0
    r = tp / len(tru) if tru else 0.0
    f = 2 * p * r / (p + r) if p + r > 0 else 0.0
    return EdgeScores(p, r, f)


def alpha_mae(inferred_alpha: Mapping[Tuple[int, int], float], truth: Graph) -> float:
    """Mean |learned - true| propagation probability over the true edges.

    True edges missing from ``inferred_alpha`` (pruned pairs) count as learned 0.
    """
    if len(truth) == 0:
        raise ValueError("truth has no edges")
    if not truth.is_weighted:
        raise ValueError("truth graph needs propagation weights")
    errs = [abs(inferred_alpha.get(e, 0.0) - w) for e, w in truth.edges.items()]
    return float(np.mean(errs))


@dataclass
class MetricRow:
    iteration: int
    precision: float
    recall: float
    f_score: float
    alpha_mae: float


def metric_series(snapshots: Iterable[Tuple[int, Graph, Mapping]], truth: Graph) -> List[MetricRow]:
    """Score per-iteration snapshots given as ``(iteration, rounded graph, alpha map)``."""
    rows = []
    for t, graph, alpha in snapshots:
        p, r, f = f_score(graph, truth)
        rows.append(MetricRow(t, p, r, f, alpha_mae(alpha, truth)))
    return rows


def write_metric_series(rows: List[MetricRow], path) -> None:
    lines = ["iteration\tprecision\trecall\tf_score\talpha_mae"]
    lines += [f"{r.iteration}\t{r.precision:.6f}\t{r.recall:.6f}\t{r.f_score:.6f}\t{r.alpha_mae:.6f}"
              for r in rows]
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def write_report(path, metrics: Dict, config: Dict | None = None) -> None:
    """``key=value`` report; config entries are prefixed with ``config.``."""
    lines = [f"{k}={_fmt(v)}" for k, v in metrics.items()]
    for k, v in (config or {}).items():
        lines.append(f"config.{k}={_fmt(v)}")
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def read_report(path) -> Dict[str, str]:
    out = {}
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        if line and not line.startswith("#"):
            k, _, v = line.partition("=")
            out[k] = v
    return out


def _fmt(v):
    return f"{v:.6f}" if isinstance(v, float) else str(v)


def scores_dict(scores: EdgeScores) -> Dict[str, float]:
    return asdict(scores)
