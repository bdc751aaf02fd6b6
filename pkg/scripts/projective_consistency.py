"""Compare the law at time t of the process on [m] with the restriction of the process on [n]."""
import argparse
from collections import Counter

import numpy as np
from scipy import stats

from snec.cli import load_config
from snec.partitions import NestedPartition, restrict
from snec.simulator import simulate


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--config", default="configs/full_mixture.json")
    ap.add_argument("--n", type=int, default=5)
    ap.add_argument("--m", type=int, default=3)
    ap.add_argument("--t", type=float, default=0.5)
    ap.add_argument("--replicates", type=int, default=10_000)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    spec = load_config(args.config).spec
    big = Counter(
        str(restrict(simulate(spec, NestedPartition.singletons(args.n), args.t, args.seed, replicate=r).final, args.m))
        for r in range(args.replicates)
    )
    small = Counter(
        str(simulate(spec, NestedPartition.singletons(args.m), args.t, args.seed + 1, replicate=r).final)
        for r in range(args.replicates)
    )
    keys = sorted(set(big) | set(small))
    table = np.array([[big.get(k, 0) for k in keys], [small.get(k, 0) for k in keys]])
    _, p, dof, _ = stats.chi2_contingency(table)
    print(f"{'state':<40}{'restricted n=' + str(args.n):>18}{'direct m=' + str(args.m):>14}")
    for k in keys:
        print(f"{k:<40}{big.get(k, 0):>18}{small.get(k, 0):>14}")
    print(f"chi-square p = {p:.4f} (dof {dof})")


if __name__ == "__main__":
    main()
