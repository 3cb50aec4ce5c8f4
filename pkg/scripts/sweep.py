#!/usr/bin/env python3
"""Accuracy sweeps over uncertainty (mu) and process count (beta).

Every grid point reuses the same repeat seeds, so the graphs and cascades
are shared across points and only the swept parameter changes.

    python3 scripts/sweep.py --param mu --values 0,0.15,0.3 --repeats 10
    python3 scripts/sweep.py --param beta --values 100,200,300 --mu 0.3
"""

import argparse
import sys
import time

import numpy as np

from diffinfer import pipeline
from diffinfer.config import RunConfig, coerce


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--param", required=True, choices=["mu", "beta", "n", "avg_degree", "seed_ratio"])
    ap.add_argument("--values", required=True, help="comma-separated values")
    ap.add_argument("--repeats", type=int, default=10)
    ap.add_argument("--n", type=int, default=150)
    ap.add_argument("--avg-degree", type=float, default=4.0)
    ap.add_argument("--beta", type=int, default=300)
    ap.add_argument("--mu", type=float, default=0.3)
    ap.add_argument("--out", help="write the table here as TSV as well")
    args = ap.parse_args(argv)

    base = RunConfig(n=args.n, avg_degree=args.avg_degree, beta=args.beta, mu=args.mu)
    header = [args.param, "precision", "recall", "f_score", "alpha_mae", "candidates", "iterations", "seconds"]
    lines = ["\t".join(header)]
    print("\t".join(header))
    for raw in args.values.split(","):
        value = coerce(args.param, raw.strip())
        rows = []
        t0 = time.perf_counter()
        for k in range(args.repeats):
            cfg = base.with_overrides(**{args.param: value}, rng_seed=k)
            truth, obs = pipeline.simulate(cfg)
            res = pipeline.infer(obs, cfg)
            m = pipeline.score(res.network, truth)
            rows.append([m["precision"], m["recall"], m["f_score"], m["alpha_mae"],
                         res.candidates.size, len(res.trace)])
        mean = np.mean(rows, axis=0)
        line = f"{value}\t" + "\t".join(f"{v:.4f}" for v in mean[:4]) + \
               f"\t{mean[4]:.0f}\t{mean[5]:.1f}\t{time.perf_counter() - t0:.1f}"
        print(line, flush=True)
        lines.append(line)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write("\n".join(lines) + "\n")
    return 0


if __name__ == "__main__":
    sys.exit(main())
