"""Command-line front end: ``diffinfer {simulate,infer,eval,bench}``.

Exit codes: 0 success, 1 usage/config error, 2 data error, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import hashlib
import itertools
import logging
import sys
import time
from dataclasses import fields
from pathlib import Path

import numpy as np

from . import pipeline
from .cascade_sim import ObservationFormatError, read_observations, write_observations
from .config import ConfigError, RunConfig, coerce, derive_seed, load_config
from .evaluation import alpha_mae, f_score, write_report
from .graph_io import GraphFormatError, load_graph, save_graph

log = logging.getLogger("diffinfer")

EXIT_USAGE, EXIT_DATA, EXIT_NUMERIC = 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _add_config_flags(p):
    p.add_argument("--config", help="key=value config file")
    p.add_argument("-v", "--verbose", action="store_true")
    for f in fields(RunConfig):
        kind = {"int": int, "float": float}.get(f.type, str)
        p.add_argument("--" + f.name.replace("_", "-"), dest=f.name, type=kind, default=None)


def _config_from(args) -> RunConfig:
    values = load_config(args.config) if args.config else {}
    for f in fields(RunConfig):
        v = getattr(args, f.name, None)
        if v is not None:
            values[f.name] = v
    return RunConfig(**values)


def _sha256(path) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


def _write_manifest(cfg: RunConfig, command: str, artifacts) -> None:
    lines = [f"command={command}"]
    lines += [f"config.{k}={v}" for k, v in cfg.as_dict().items()]
    lines += [f"sha256.{Path(a).name}={_sha256(a)}" for a in artifacts]
    cfg.path("manifest").write_text("\n".join(lines) + "\n", encoding="utf-8")


def write_alpha_dump(result, path) -> None:
    c = result.candidates
    lines = [f"#n={c.n}", "parent\tchild\tx\talpha\tselected"]
    for (j, i), x, a, sel in zip(c.pairs(), result.state.x, result.network.alpha, result.network.x_hat):
        lines.append(f"{j}\t{i}\t{float(x)!r}\t{float(a)!r}\t{int(sel)}")
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def read_alpha_dump(path):
    alpha = {}
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        if not line or line.startswith("#") or line.startswith("parent"):
            continue
        j, i, _x, a, _sel = line.split("\t")
        alpha[(int(j), int(i))] = float(a)
    return alpha


# -- subcommands -------------------------------------------------------------

def cmd_simulate(cfg: RunConfig) -> int:
    Path(cfg.out_dir).mkdir(parents=True, exist_ok=True)
    graph, obs = pipeline.simulate(cfg)
    save_graph(graph, cfg.path("truth"))
    write_observations(obs, cfg.path("obs"))
    _write_manifest(cfg, "simulate", [cfg.path("truth"), cfg.path("obs")])
    log.info("wrote %s and %s", cfg.path("truth"), cfg.path("obs"))
    return 0


def cmd_infer(cfg: RunConfig, obs_path=None) -> int:
    Path(cfg.out_dir).mkdir(parents=True, exist_ok=True)
    obs = read_observations(obs_path or cfg.path("obs"))
    result = pipeline.infer(obs, cfg)
    save_graph(result.network.to_graph(), cfg.path("inferred"))
    result.trace.write(cfg.path("trace"))
    write_alpha_dump(result, cfg.path("alpha_dump"))
    _write_manifest(cfg, "infer", [cfg.path("inferred"), cfg.path("trace"), cfg.path("alpha_dump")])
    log.info("eta=%.6g candidates=%d iterations=%d objective=%.6f",
             result.eta, result.candidates.size, len(result.trace), result.network.objective)
    return 0


def cmd_eval(cfg: RunConfig, inferred=None, truth=None, alpha_path=None) -> int:
    inferred_g = load_graph(inferred or cfg.path("inferred"))
    truth_g = load_graph(truth or cfg.path("truth"))
    p, r, f = f_score(inferred_g, truth_g)
    if alpha_path:
        alpha = read_alpha_dump(alpha_path)
    else:
        alpha = {e: w for e, w in inferred_g.edges.items() if w is not None}
    metrics = {"precision": p, "recall": r, "f_score": f, "alpha_mae": alpha_mae(alpha, truth_g)}
    out = cfg.path("metrics")
    out.parent.mkdir(parents=True, exist_ok=True)
    write_report(out, metrics)
    print("\t".join(f"{k}={v:.6f}" for k, v in metrics.items()))
    return 0


def parse_grid(specs):
    """``["mu=0,0.3", "beta=100,300"]`` -> list of dicts (cartesian product, in order)."""
    axes = []
    for spec in specs or []:
        key, sep, vals = spec.partition("=")
        key = key.strip().replace("-", "_")
        if not sep or not vals:
            raise UsageError(f"bad grid spec {spec!r}, expected key=v1,v2,...")
        try:
            axes.append([(key, coerce(key, v.strip())) for v in vals.split(",")])
        except ConfigError as e:
            raise UsageError(str(e)) from None
    return [dict(combo) for combo in itertools.product(*axes)] if axes else [{}]


def run_bench(base: RunConfig, grid, repeats: int = 10):
    """One aggregate row per grid point; failed repeats are counted, not fatal."""
    rows = []
    for g, point in enumerate(grid):
        point_seed = derive_seed(base.rng_seed, g)
        scores, runtimes, failures = [], [], 0
        for k in range(repeats):
            cfg = base.with_overrides(**point, rng_seed=derive_seed(point_seed, k))
            try:
                truth, obs = pipeline.simulate(cfg)
                t0 = time.perf_counter()
                result = pipeline.infer(obs, cfg)
                runtimes.append(time.perf_counter() - t0)
                scores.append(pipeline.score(result.network, truth))
            except (pipeline.EmptyCandidatesError, ValueError, ArithmeticError) as e:
                log.warning("grid point %d repeat %d failed: %s", g, k, e)
                failures += 1
        row = {"index": g, **point, "repeats_ok": len(scores), "failed": failures}
        for key in ("precision", "recall", "f_score", "alpha_mae"):
            row[key] = float(np.mean([s[key] for s in scores])) if scores else float("nan")
        row["runtime_seconds"] = float(np.mean(runtimes)) if runtimes else float("nan")
        row["status"] = "ok" if not failures else ("partial" if scores else "failed")
        rows.append(row)
    return rows


def write_table(rows, path) -> None:
    keys = list(rows[0].keys()) if rows else []
    lines = ["\t".join(keys)]
    for row in rows:
        lines.append("\t".join(f"{row[k]:.6f}" if isinstance(row[k], float) else str(row[k]) for k in keys))
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def cmd_bench(cfg: RunConfig, grid_specs, repeats: int, table=None) -> int:
    grid = parse_grid(grid_specs)
    rows = run_bench(cfg, grid, repeats)
    out = Path(table) if table else Path(cfg.out_dir) / "bench.tsv"
    out.parent.mkdir(parents=True, exist_ok=True)
    write_table(rows, out)
    sys.stdout.write(out.read_text(encoding="utf-8"))
    return 0


def build_parser():
    parser = _Parser(prog="diffinfer", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("simulate", help="generate a weighted truth graph and observations")
    _add_config_flags(p)

    p = sub.add_parser("infer", help="prune, solve and round from an observations file")
    _add_config_flags(p)
    p.add_argument("--input", help="observations CSV (default: <out-dir>/<obs>)")

    p = sub.add_parser("eval", help="score an inferred graph against the truth")
    _add_config_flags(p)
    p.add_argument("--inferred-graph", help="inferred TSV")
    p.add_argument("--truth-graph", help="ground-truth TSV")
    p.add_argument("--alpha", help="full alpha dump from infer, for the MAE")

    p = sub.add_parser("bench", help="simulate+infer+eval over a parameter grid")
    _add_config_flags(p)
    p.add_argument("--grid", action="append", help="key=v1,v2,... (repeatable; cartesian product)")
    p.add_argument("--repeats", type=int, default=10)
    p.add_argument("--table", help="output TSV (default: <out-dir>/bench.tsv)")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    try:
        cfg = _config_from(args)
        if args.command == "simulate":
            return cmd_simulate(cfg)
        if args.command == "infer":
            return cmd_infer(cfg, args.input)
        if args.command == "eval":
            return cmd_eval(cfg, args.inferred_graph, args.truth_graph, args.alpha)
        if args.repeats < 1:
            raise UsageError("--repeats must be at least 1")
        return cmd_bench(cfg, args.grid, args.repeats, args.table)
    except (ConfigError, UsageError) as e:
        print(f"diffinfer: {e}", file=sys.stderr)
        return EXIT_USAGE
    except pipeline.EmptyCandidatesError as e:
        print(f"diffinfer: {e}", file=sys.stderr)
        return EXIT_NUMERIC
    except (GraphFormatError, ObservationFormatError, OSError, ValueError) as e:
        print(f"diffinfer: data error: {e}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
