"""Exact K4 counts at q = 2 for p <= 23, the F_11 sweep over q, and the fitter verdict."""

from __future__ import annotations

import argparse
import json
import time

from tuttelab import complete, make_field, tutte_count
from tuttelab.motives import fibration_test, fit_count_polynomial, k4_decomposition_check
from tuttelab.references import annotate

PRIMES = [3, 5, 7, 11, 13, 17, 19, 23]


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--max-p", type=int, default=23)
    ap.add_argument("--threads", type=int, default=1)
    args = ap.parse_args()

    g = complete(4)
    points = []
    for p in PRIMES:
        if p > args.max_p:
            break
        t0 = time.perf_counter()
        n = tutte_count(g, 2, make_field(p), threads=args.threads).count
        notes = "; ".join(a["text"] for a in annotate(g, 2, p, 1, n))
        print(f"p={p:2d}  N={n:>8d}  {time.perf_counter() - t0:6.2f}s  {notes}")
        points.append((p, n))

    verdict = fit_count_polynomial(points, 5, spin=2)
    print("fit:", verdict.status, "-", verdict.reason)

    fib = fibration_test(g, make_field(11))
    for q, n in fib["counts"].items():
        notes = "; ".join(a["text"] for a in annotate(g, q, 11, 1, n))
        print(f"q={q:2d}  N={n:>8d}  {notes}")
    print("fibration:", fib["verdict"])

    for p in (3, 5, 7):
        rep = k4_decomposition_check(make_field(p))
        print(json.dumps(rep))


if __name__ == "__main__":
    main()
