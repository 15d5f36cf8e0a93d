"""Monte Carlo against exact counts for K4 at q = 2, in the layout of the reference table."""

from __future__ import annotations

import argparse

from tuttelab import complete, make_field, tutte, tutte_count
from tuttelab.montecarlo import McConfig, mc_vs_exact


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--trials", type=int, nargs="+", default=[10_000, 40_000, 100_000])
    ap.add_argument("--primes", type=int, nargs="+", default=[3, 5, 7, 11, 13, 17, 19, 23])
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--delta", type=float, default=0.05)
    args = ap.parse_args()

    g = complete(4)
    z = tutte(g).specialize_q(2)
    exact = {p: tutte_count(g, 2, make_field(p)).count for p in args.primes}
    print("trials,p,monte_carlo,error,error_bound")
    for n in args.trials:
        cfg = McConfig(n, args.delta, args.seed)
        for p in args.primes:
            row = mc_vs_exact([z], make_field(p), cfg, exact[p])
            print(f"{n},{p},{row['monte_carlo']:.4f},{row['error']:.9f},{row['error_bound']:.9f}")


if __name__ == "__main__":
    main()
