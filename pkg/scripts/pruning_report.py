#!/usr/bin/env python3
"""How much of the planted graph survives mutual-information pruning.

Reports the threshold, the share of true edges kept and the share of all
ordered pairs kept, over several repeats and uncertainty levels.

    python3 scripts/pruning_report.py --n 150 --beta 300 --mu 0,0.3 --repeats 5
"""

import argparse
import sys

import numpy as np

from diffinfer import pipeline
from diffinfer.config import RunConfig
from diffinfer.mi_prune import build_candidate_sets


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, default=150)
    ap.add_argument("--avg-degree", type=float, default=4.0)
    ap.add_argument("--beta", type=int, default=300)
    ap.add_argument("--mu", default="0,0.3")
    ap.add_argument("--repeats", type=int, default=5)
    args = ap.parse_args(argv)

    print("mu\teta\ttrue_edges_kept\tpairs_kept")
    for mu in (float(v) for v in args.mu.split(",")):
        stats = []
        for k in range(args.repeats):
            cfg = RunConfig(n=args.n, avg_degree=args.avg_degree, beta=args.beta, mu=mu, rng_seed=k)
            truth, obs = pipeline.simulate(cfg)
            cands, eta, _ = build_candidate_sets(obs)
            kept = set(cands.pairs())
            stats.append([eta, len(kept & truth.edge_set) / len(truth), cands.size / (args.n * (args.n - 1))])
        eta, recall, frac = np.mean(stats, axis=0)
        print(f"{mu}\t{eta:.4g}\t{recall:.3f}\t{frac:.3f}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
