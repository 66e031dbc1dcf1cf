#!/usr/bin/env python3
"""Brute-force reference for the grader metrics over a records CSV.

Writes exact fractions as "num/den" strings (reduced) so the C++ side can
compare without rounding. Undefined rates are null.

    python3 metrics_oracle.py grader_records.csv > metrics_expected.json
"""
import csv
import json
import sys
from decimal import Decimal, ROUND_HALF_UP
from fractions import Fraction

LABELS = [0, 1, 6, 7]


def bucket(score):
    table = {0: 0, 1: 1, 2: 1, 3: 1, 4: 6, 5: 6, 6: 6, 7: 7}
    return table[score]


def round_half_up(text):
    return int(Decimal(text).quantize(Decimal(1), rounding=ROUND_HALF_UP))


def frac(f):
    return None if f is None else f"{f.numerator}/{f.denominator}"


def main(path):
    with open(path, newline="") as fh:
        rows = list(csv.DictReader(fh))
    human = [int(r["human"]) for r in rows]
    pred = [bucket(round_half_up(r["predicted"])) for r in rows]
    n = len(rows)

    hits = sum(1 for h, p in zip(human, pred) if p == bucket(h))
    # 0 and 1 merged: both map to 1 before comparing.
    merged = sum(1 for h, p in zip(human, pred) if (1 if p in (0, 1) else p) == (1 if bucket(h) in (0, 1) else bucket(h)))
    abs_err = sum(abs(p - h) for h, p in zip(human, pred))

    low = [p for h, p in zip(human, pred) if h <= 5]
    high = [p for h, p in zip(human, pred) if h >= 6]
    fpr = Fraction(sum(1 for p in low if p >= 6), len(low)) if low else None
    fnr = Fraction(sum(1 for p in high if p <= 5), len(high)) if high else None

    confusion = [[0] * 4 for _ in LABELS]
    for h, p in zip(human, pred):
        confusion[LABELS.index(bucket(h))][LABELS.index(p)] += 1

    json.dump(
        {
            "n": n,
            "acc": frac(Fraction(hits, n)),
            "merged_acc": frac(Fraction(merged, n)),
            "mae": frac(Fraction(abs_err, 7 * n)),
            "fpr": frac(fpr),
            "fnr": frac(fnr),
            "labels": LABELS,
            "confusion": confusion,
            "predicted_buckets": pred,
        },
        sys.stdout,
        indent=2,
    )
    sys.stdout.write("\n")


if __name__ == "__main__":
    main(sys.argv[1])
