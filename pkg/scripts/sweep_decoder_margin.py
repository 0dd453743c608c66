#!/usr/bin/env python3
"""Sweep list-decoder recovery rate against the correctness margin.

Fixes the answer rate c + e and slides the split between correct and
erroneous answers, re-sizing the candidate list for each point from the
declared statistics. Writes a rate-vs-margin plot.
"""

from __future__ import annotations

import argparse

from entrolab import bitlin, hadamard
from entrolab.harness.report import plot_decoder_rates


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--seed", type=int, default=1)
    ap.add_argument("--n", type=int, default=16)
    ap.add_argument("--rate", type=float, default=0.8, help="total answer rate c + e")
    ap.add_argument("--trials", type=int, default=100)
    ap.add_argument("--out", default="reports/decoder-margin.png")
    args = ap.parse_args()

    margins = [0.1, 0.2, 0.3, 0.4, 0.6, 0.8]
    points = []
    for j, margin in enumerate(margins):
        corr = (args.rate + margin) / 2.0
        err = (args.rate - margin) / 2.0
        if err < 0:
            corr, err = margin, 0.0
        l = hadamard.list_size_param(args.n, err, corr)
        rng = bitlin.make_rng(args.seed * 1000 + j)
        hits = 0
        for _ in range(args.trials):
            x = int(bitlin.random_words(args.n, 1, rng)[0])
            oracle = hadamard.NoisyParityOracle(args.n, x, error=err, erasure=1.0 - err - corr)
            hits += int(x in hadamard.ld_decode(oracle, args.n, l, rng))
        rate = hits / args.trials
        points.append((margin, rate))
        print(f"margin={margin:.2f} (c={corr:.2f}, e={err:.2f}, l={l}): rate={rate:.3f}")

    plot_decoder_rates(points, args.out)
    print(f"plot -> {args.out}")


if __name__ == "__main__":
    main()
