"""|F0| / (theta |F|) for the canonical minimiser and for a half cut.

    python scripts/coupling.py --n 300 --mult 1.3 --theta 0.25,0.5,0.75 --trials 40
"""

import argparse

from cyclespan.bounds import pstar
from cyclespan.experiments import run_coupling, summarise_coupling


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--n", type=int, default=300)
    ap.add_argument("--kappa", type=int, default=3)
    ap.add_argument("--mult", type=float, default=1.3)
    ap.add_argument("--theta", default="0.5")
    ap.add_argument("--trials", type=int, default=40)
    ap.add_argument("--seed", type=int, default=0)
    a = ap.parse_args()
    p = a.mult * pstar(a.kappa, a.n)
    thetas = [float(x) for x in a.theta.split(",")]
    print("rule,theta,records,qualifying,in_band,band_fraction,all_in_kperp,mean_F")
    for rule in ("minimizer", "half-cut"):
        recs = run_coupling(a.n, a.kappa, p, thetas, a.trials, a.seed, rule)
        for th in thetas:
            sub = [r for r in recs if r.theta == th]
            s = summarise_coupling(sub)
            mean_F = sum(r.F_weight for r in sub) / len(sub)
            print(f"{rule},{th},{s.records},{s.qualifying},{s.in_band},{s.band_fraction:.3f},{s.all_in_kperp},{mean_F:.1f}")


if __name__ == "__main__":
    main()
