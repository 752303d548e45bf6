"""Rope counts against the walk bound and the two growth terms, over |S|.

    python scripts/ropes.py --n 300 --degree 10 --t 4
"""

import argparse

import numpy as np

from cyclespan.graph import gen_gnp
from cyclespan.paths import count_ropes, rope_bound, rope_terms


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--n", type=int, default=300)
    ap.add_argument("--degree", type=float, default=10.0)
    ap.add_argument("--t", type=int, default=4)
    ap.add_argument("--points", type=int, default=10)
    ap.add_argument("--seed", type=int, default=0)
    a = ap.parse_args()
    q = a.degree / (a.n - 1)
    G0 = gen_gnp(a.n, q, a.seed)
    perm = np.random.default_rng(a.seed).permutation(G0.m)
    print("S,count,walk_bound,beta,term1,term2,count_over_max_term")
    ratios = []
    for s in np.unique(np.geomspace(min(30, G0.m), G0.m, a.points).astype(int)):
        S = G0.subset(perm[:s].tolist())
        c, _ = count_ropes(G0, S, a.t)
        beta, t1, t2 = rope_terms(a.n, q, int(s), a.t)
        ratios.append(c / max(t1, t2))
        print(f"{s},{c},{rope_bound(G0, q, S, a.t):.0f},{beta:.4f},{t1:.1f},{t2:.1f},{ratios[-1]:.4f}")
    print(f"# fitted constant C = {max(ratios):.4f}")


if __name__ == "__main__":
    main()
