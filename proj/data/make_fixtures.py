#!/usr/bin/env python3
"""Regenerate the synthetic test fixtures (panel.csv, flows.csv).

The panel is a 5-country x 3-variable quarterly panel simulated from a
stable factor process: each series follows an AR(1) around a common
per-variable global factor, with persistence chosen per variable so the
stationarity grids show variety. The flow matrix holds raw bilateral trade
values whose max-normalization reproduces the normalized pattern below
exactly (scale 8192 = 2**13, so the division is a pure exponent shift and
round-trips bit-exactly).

Run from the repository root:  python3 data/make_fixtures.py
"""

import numpy as np

COUNTRIES = ["China", "India", "Malaysia", "Singapore", "Vietnam"]
VARIABLES = ["CPI", "GDP", "MPI"]
T = 60
BURN = 100

# AR(1) persistence of the per-variable global factor and of the
# country-level deviations, plus a deterministic drift per variable.
FACTOR_RHO = {"CPI": 0.85, "GDP": 0.70, "MPI": 0.50}
SERIES_RHO = {"CPI": 0.90, "GDP": 0.65, "MPI": 0.45}
DRIFT = {"CPI": 0.05, "GDP": 0.08, "MPI": 0.0}
LEVEL = {"CPI": 100.0, "GDP": 50.0, "MPI": 48.0}

# Normalized trade pattern (row country -> column country); the strongest
# link is China -> Vietnam at exactly 1. Raw flows are SCALE times this.
NORMALIZED_FLOWS = [
    [0.0000, 0.7173, 0.9806, 0.6891, 1.0000],
    [0.6844, 0.0000, 0.0726, 0.1330, 0.0219],
    [0.5861, 0.0619, 0.0000, 0.4591, 0.0351],
    [0.8220, 0.1213, 0.7271, 0.0000, 0.0737],
    [0.7179, 0.0800, 0.0198, 0.0101, 0.0000],
]
SCALE = 8192.0


def quarters(n):
    year, quarter = 1995, 1
    out = []
    for _ in range(n):
        out.append(f"{year}Q{quarter}")
        quarter += 1
        if quarter == 5:
            year, quarter = year + 1, 1
    return out


def simulate(rng):
    values = {}
    for v in VARIABLES:
        factor = 0.0
        series = {c: 0.0 for c in COUNTRIES}
        kept = {c: [] for c in COUNTRIES}
        for t in range(BURN + T):
            factor = FACTOR_RHO[v] * factor + rng.normal(0.0, 0.5)
            for i, c in enumerate(COUNTRIES):
                shock = rng.normal(0.0, 0.4 + 0.05 * i)
                series[c] = SERIES_RHO[v] * series[c] + 0.3 * factor + shock
                if t >= BURN:
                    kept[c].append(LEVEL[v] + DRIFT[v] * (t - BURN) + series[c])
        for c in COUNTRIES:
            values[(c, v)] = kept[c]
    return values


def main():
    rng = np.random.default_rng(20240811)
    values = simulate(rng)
    dates = quarters(T)

    with open("data/panel.csv", "w") as f:
        f.write("country,variable,date,value\n")
        for c in COUNTRIES:
            for v in VARIABLES:
                for t, d in enumerate(dates):
                    f.write(f"{c},{v},{d},{values[(c, v)][t]:.10f}\n")

    with open("data/flows.csv", "w") as f:
        f.write("country," + ",".join(COUNTRIES) + "\n")
        for i, c in enumerate(COUNTRIES):
            row = [f"{NORMALIZED_FLOWS[i][j] * SCALE:.4f}" for j in range(len(COUNTRIES))]
            f.write(c + "," + ",".join(row) + "\n")

    print("wrote data/panel.csv and data/flows.csv")


if __name__ == "__main__":
    main()
