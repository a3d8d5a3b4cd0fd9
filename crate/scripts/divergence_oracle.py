#!/usr/bin/env python3
"""Arbitrary-precision KL / JS divergence reference values (base 2).

Inputs are IEEE doubles; mpmath evaluates on their exact binary values at
60 significant digits, so the frozen outputs are correct to well below 1e-15.
"""
import json
import random
import sys

import mpmath

mpmath.mp.dps = 60


def kl(p, m):
    total = mpmath.mpf(0)
    for a, b in zip(p, m):
        if a == 0:
            continue
        total += a * mpmath.log(a / b, 2)
    return total


def jsd(p, q):
    p = [mpmath.mpf(x) for x in p]
    q = [mpmath.mpf(x) for x in q]
    m = [(a + b) / 2 for a, b in zip(p, q)]
    return (kl(p, m) + kl(q, m)) / 2


def random_dist(rng, n):
    w = [rng.random() for _ in range(n)]
    if rng.random() < 0.3:
        w[rng.randrange(n)] = 0.0
    s = sum(w)
    return [x / s for x in w]


def eval_fixture_case(tally_path):
    """Human V202332 tally against a 400-record silicon fixture (40/80/120/100/60)."""
    human = json.load(open(tally_path))["human"]["V202332"]
    n = human["sample_count"]
    counts = [round(p * n) for p in human["probabilities"]]
    assert sum(counts) == n
    p = [mpmath.mpf(c) / n for c in counts]
    q = [mpmath.mpf(c) / 400 for c in (40, 80, 120, 100, 60)]
    m = [(a + b) / 2 for a, b in zip(p, q)]
    return float((kl(p, m) + kl(q, m)) / 2)


def main(dst, tally_path):
    rng = random.Random(20201103)
    pairs = []
    for _ in range(100):
        n = rng.randint(2, 9)
        p, q = random_dist(rng, n), random_dist(rng, n)
        m = [(a + b) / 2 for a, b in zip(p, q)]  # double mixture, as fed to kl
        pairs.append({
            "p": p, "q": q, "m": m,
            "kl_p_m": float(kl([mpmath.mpf(x) for x in p], [mpmath.mpf(x) for x in m])),
            "jsd": float(jsd(p, q)),
        })
    named = {
        "kl_075_025_vs_half": float(kl([mpmath.mpf(0.75), mpmath.mpf(0.25)], [mpmath.mpf(0.5), mpmath.mpf(0.5)])),
        "jsd_half_vs_09_01": float(jsd([0.5, 0.5], [0.9, 0.1])),
        "eval_fixture_V202332": eval_fixture_case(tally_path),
    }
    with open(dst, "w") as fh:
        json.dump({"named": named, "pairs": pairs}, fh, indent=1)
        fh.write("\n")


if __name__ == "__main__":
    main(sys.argv[1], sys.argv[2])
