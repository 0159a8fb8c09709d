#!/usr/bin/env python3
"""Tabulate the loop-family weights against their closed form.

For every partition mu with |mu| <= N, run the full pipeline (enumerate the
four-end family, pick out the loop type, resolve it with a seeded shift) and
compare with (1/lcm(mu)) prod [mu_i]^2 / mu_i.  Prints the leading
coefficients and a match flag per partition.
"""

import argparse
import time

from tropgw.enumeration import SearchBounds, enumerate_curve_types
from tropgw.identities import expected_gamma_mu_weight
from tropgw.tropcurve import CurveType, are_isomorphic
from tropgw.weights import curve_weight


def partitions(n):
    def rec(rest, mx):
        if rest == 0:
            yield ()
            return
        for p in range(min(rest, mx), 0, -1):
            for tail in rec(rest - p, p):
                yield (p,) + tail
    yield from rec(n, n)


def gamma_mu(n, mu):
    ies = [(0, 1, (0, 0, m)) for m in mu]
    ees = [(1, (1, 0, 0), 1), (0, (0, 1, 0), 2),
           (1, (-1, 0, n), 3), (0, (0, -1, -n), 4)]
    return CurveType.make([0, 1], ies, ees)


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--max-total", type=int, default=6)
    ap.add_argument("--order", type=int, default=20)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    bounds = SearchBounds()
    for total in range(1, args.max_total + 1):
        ends = [(1, 0, 0), (0, 1, 0), (-1, 0, total), (0, -1, -total)]
        types = enumerate_curve_types(ends, bounds)
        for mu in partitions(total):
            t0 = time.time()
            target = gamma_mu(total, mu)
            match = [t for t in types if are_isomorphic(t, target)]
            assert len(match) == 1
            w = curve_weight(match[0], args.order, "lambda", args.seed)
            expect = expected_gamma_mu_weight(mu, args.order)
            lead = w.coeff(w.low) if not w.is_zero() else 0
            print(f"mu={str(mu):18s} low=x^{w.low:<3d} lead={lead}  "
                  f"match={w.agrees(expect)}  ({time.time() - t0:.2f}s)")


if __name__ == "__main__":
    main()
