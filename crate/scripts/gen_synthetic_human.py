#!/usr/bin/env python3
"""Generate the bundled synthetic human-response files.

The real survey microdata cannot be redistributed, so the toolkit ships with
seeded synthetic stand-ins in the same column layout (one row per respondent,
header row of variable/question codes, negative sentinel non-response codes).
"""
import csv
import sys

import numpy as np

VARIABLES = {
    # code: (levels, probabilities)
    "V201549x": ([1, 2, 3, 4, 5], [0.70, 0.10, 0.11, 0.05, 0.04]),
    "V202022": ([1, 2], [0.78, 0.22]),
    "V201200": ([1, 2, 3, 4, 5, 6, 7], [0.05, 0.13, 0.11, 0.30, 0.12, 0.19, 0.10]),
    "V201231x": ([1, 2, 3, 4, 5, 6, 7], [0.22, 0.10, 0.12, 0.13, 0.11, 0.10, 0.22]),
    "V201452": ([1, 2], [0.38, 0.62]),
    "V201600": ([1, 2], [0.46, 0.54]),
    "V202406": ([1, 2, 3, 4], [0.35, 0.45, 0.14, 0.06]),
}
SENTINELS = [-9, -8, -7, -6, -5, -1]

# question code -> (n_options, base probabilities, party tilt per option)
QUESTIONS = {
    "V202371": (3, [0.62, 0.08, 0.30], [-0.04, 0.02, 0.02]),
    "V202287": (3, [0.25, 0.12, 0.63], [0.03, -0.01, -0.02]),
    "V201324": (5, [0.03, 0.20, 0.22, 0.30, 0.25], [0.0, 0.03, 0.0, -0.01, -0.02]),
    "V202348": (3, [0.72, 0.05, 0.23], [-0.01, 0.0, 0.01]),
    "V202332": (5, [0.10, 0.17, 0.22, 0.22, 0.29], [0.03, 0.02, 0.0, -0.02, -0.03]),
    "V201416": (3, [0.67, 0.18, 0.15], [-0.05, 0.02, 0.03]),
    "V202234": (3, [0.61, 0.19, 0.20], [-0.05, 0.04, 0.01]),
    "V202378": (3, [0.62, 0.10, 0.28], [-0.04, 0.02, 0.02]),
    "V202337": (3, [0.56, 0.06, 0.38], [-0.05, 0.01, 0.04]),
    "V202257": (3, [0.58, 0.15, 0.27], [-0.05, 0.03, 0.02]),
}


def sentinel_or(rng, value, rate):
    if rng.random() < rate:
        return int(rng.choice(SENTINELS))
    return int(value)


def main(path, n_rows, seed, age_mode):
    rng = np.random.default_rng(seed)
    header = list(VARIABLES) + ["V201507x"] + list(QUESTIONS)
    ages = np.arange(18, 81)
    age_weights = np.exp(-((ages - age_mode) / 22.0) ** 2) + 0.15
    age_weights /= age_weights.sum()
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for _ in range(n_rows):
            row = {}
            for code, (levels, probs) in VARIABLES.items():
                row[code] = sentinel_or(rng, rng.choice(levels, p=probs), 0.02)
            row["V201507x"] = sentinel_or(rng, rng.choice(ages, p=age_weights), 0.04)
            party = row["V201231x"] if row["V201231x"] >= 1 else 4
            for code, (n, base, tilt) in QUESTIONS.items():
                probs = np.array(base) + (party - 4) * np.array(tilt)
                probs = np.clip(probs, 0.01, None)
                probs /= probs.sum()
                row[code] = sentinel_or(rng, rng.choice(np.arange(1, n + 1), p=probs), 0.03)
            writer.writerow([row[c] for c in header])


if __name__ == "__main__":
    main("data/anes2020_synthetic.csv", 5441, 2020, 48)
    main("data/anes2024_synthetic.csv", 5521, 2024, 50)
    sys.exit(0)
