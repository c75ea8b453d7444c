#!/usr/bin/env python3
# SPDX-License-Identifier: Apache-2.0
"""Noisy scaling-law fixture and its least-squares reference solution.

126 points: 7 budgets x 6 model sizes x 3 replicates, generated from
accuracy = 0.08 ln(T+1) + 0.12 ln(M) + 0.05 + N(0, 0.02^2) with a
pinned numpy seed. The unlimited budget enters at 1500 tokens.

The reference fit uses numpy's SVD-based lstsq and a brute-force
normal-equation covariance; the 95% band per parameter is
1.96 standard errors. Writes tests/data/scaling_noisy.csv and
tests/data/scaling_noisy_expected.json.
"""
import json
import pathlib

import numpy as np

DATA = pathlib.Path(__file__).resolve().parent.parent / "data"
SEED = 20240917
ALPHA, BETA, GAMMA, SIGMA = 0.08, 0.12, 0.05, 0.02
BUDGETS = [("none", 0.0), ("64", 64.0), ("128", 128.0), ("256", 256.0), ("512", 512.0), ("1024", 1024.0), ("inf", 1500.0)]
SIZES = [1.5, 1.7, 4.0, 7.0, 8.0, 14.0]
REPLICATES = 3


def main():
    rng = np.random.default_rng(SEED)
    rows = []
    for rep in range(REPLICATES):
        for size in SIZES:
            for label, tokens in BUDGETS:
                mean = ALPHA * np.log(tokens + 1.0) + BETA * np.log(size) + GAMMA
                rows.append((label, tokens, size, mean + rng.normal(0.0, SIGMA)))
    assert len(rows) == 126
    assert all(0.0 <= r[3] <= 1.0 for r in rows)

    x = np.array([[np.log(t + 1.0), np.log(m), 1.0] for _, t, m, _ in rows])
    y = np.array([r[3] for r in rows])
    coef, rss, _, _ = np.linalg.lstsq(x, y, rcond=None)
    n, p = x.shape
    sigma = float(np.sqrt(rss[0] / (n - p)))
    cov = sigma**2 * np.linalg.inv(x.T @ x)
    se = np.sqrt(np.diag(cov))
    band = 1.96 * se

    with open(DATA / "scaling_noisy.csv", "w") as f:
        f.write("budget,tokens,model_size,accuracy\n")
        for label, tokens, size, acc in rows:
            f.write(f"{label},{float(tokens)!r},{float(size)!r},{float(acc)!r}\n")

    expected = {
        "seed": SEED,
        "n_points": n,
        "alpha": float(coef[0]),
        "beta": float(coef[1]),
        "gamma": float(coef[2]),
        "sigma": sigma,
        "std_error": {"alpha": float(se[0]), "beta": float(se[1]), "gamma": float(se[2])},
        "band95": {"alpha": float(band[0]), "beta": float(band[1]), "gamma": float(band[2])},
        "true": {"alpha": ALPHA, "beta": BETA, "gamma": GAMMA},
    }
    (DATA / "scaling_noisy_expected.json").write_text(json.dumps(expected, indent=2) + "\n")
    print(json.dumps(expected, indent=2))


if __name__ == "__main__":
    main()
