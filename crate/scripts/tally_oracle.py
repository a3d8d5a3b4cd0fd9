#!/usr/bin/env python3
"""Direct tally oracle for marginals and human answer distributions.

Independent of the Rust implementation: reads the CSV with the stdlib, counts
valid codes with exact rational arithmetic, and freezes the results to JSON.
"""
import csv
import json
import sys
from fractions import Fraction

CATEGORICAL = {
    "V201549x": 5, "V202022": 2, "V201200": 7, "V201231x": 7,
    "V201452": 2, "V201600": 2, "V202406": 4,
}
AGE = ("V201507x", 18, 80)
QUESTIONS = {
    "V202371": 3, "V202287": 3, "V201324": 5, "V202348": 3, "V202332": 5,
    "V201416": 3, "V202234": 3, "V202378": 3, "V202337": 3, "V202257": 3,
}
STRATIFY_AXIS = "V201600"


def tally(values, support):
    counts = {s: 0 for s in support}
    for v in values:
        if v in counts:
            counts[v] += 1
    total = sum(counts.values())
    return [float(Fraction(counts[s], total)) for s in support], total


def main(src, dst):
    with open(src, newline="") as fh:
        rows = [{k: int(v) for k, v in r.items()} for r in csv.DictReader(fh)]
    out = {"rows": len(rows), "marginals": {}, "human": {}, "strata": {}}
    for code, n in CATEGORICAL.items():
        probs, total = tally([r[code] for r in rows], range(1, n + 1))
        out["marginals"][code] = {"values": list(range(1, n + 1)), "probabilities": probs, "valid": total}
    code, lo, hi = AGE
    observed = sorted({r[code] for r in rows if lo <= r[code] <= hi})
    probs, total = tally([r[code] for r in rows], observed)
    out["marginals"][code] = {"values": observed, "probabilities": probs, "valid": total}
    for q, n in QUESTIONS.items():
        probs, total = tally([r[q] for r in rows], range(1, n + 1))
        out["human"][q] = {"probabilities": probs, "sample_count": total}
        per_level = {}
        for level in range(1, CATEGORICAL[STRATIFY_AXIS] + 1):
            subset = [r[q] for r in rows if r[STRATIFY_AXIS] == level]
            probs, total = tally(subset, range(1, n + 1))
            per_level[str(level)] = {"probabilities": probs, "sample_count": total}
        out["strata"][q] = per_level
    with open(dst, "w") as fh:
        json.dump(out, fh, indent=1, sort_keys=True)
        fh.write("\n")


if __name__ == "__main__":
    main(sys.argv[1], sys.argv[2])
