#!/usr/bin/env python3
"""Regenerate the frozen-oracle input series and print their expected values.

The series written here (one value per line, full precision) are the shared
inputs: the C++ tests read them and compare against the reference numbers
this script prints, which were computed with statsmodels/numpy and a
textbook Phillips-Perron implementation. Rerun after changing any input:

    python3 tests/data/freeze_oracles.py
"""

import numpy as np
from statsmodels.tsa.stattools import adfuller, grangercausalitytests
from statsmodels.tsa.vector_ar.vecm import coint_johansen
from statsmodels.stats.stattools import jarque_bera

OUT = "tests/data"


def save(name, arr):
    arr = np.asarray(arr)
    with open(f"{OUT}/{name}", "w") as f:
        if arr.ndim == 1:
            for v in arr:
                f.write(f"{v:.17g}\n")
        else:
            for row in arr:
                f.write(",".join(f"{v:.17g}" for v in row) + "\n")


def pp_ztau(y, det):
    """Textbook Phillips-Perron Z-tau with a Bartlett kernel."""
    y = np.asarray(y)
    n = len(y) - 1
    q = int(np.floor(4.0 * (n / 100.0) ** 0.25))
    cols = [y[:-1]]
    if det in ("c", "ct"):
        cols.insert(0, np.ones(n))
    if det == "ct":
        cols.insert(1, np.arange(1, n + 1, dtype=float))
    X = np.column_stack(cols)
    lhs = y[1:]
    beta, *_ = np.linalg.lstsq(X, lhs, rcond=None)
    u = lhs - X @ beta
    k = X.shape[1]
    sigma2 = u @ u / (n - k)
    xtx_inv = np.linalg.inv(X.T @ X)
    se = np.sqrt(sigma2 * xtx_inv[-1, -1])
    t_rho = (beta[-1] - 1.0) / se
    gamma0 = u @ u / n
    lam2 = gamma0
    for j in range(1, q + 1):
        gj = u[j:] @ u[:-j] / n
        lam2 += 2.0 * (1.0 - j / (q + 1.0)) * gj
    return np.sqrt(gamma0 / lam2) * t_rho - (lam2 - gamma0) * n * se / (
        2.0 * np.sqrt(lam2) * np.sqrt(sigma2)
    )


def main():
    rng = np.random.default_rng(42)
    rw = np.cumsum(rng.standard_normal(200))
    save("series_rw.txt", rw)

    rng = np.random.default_rng(7)
    e = rng.standard_normal(150)
    ar = np.zeros(150)
    for t in range(1, 150):
        ar[t] = 0.5 * ar[t - 1] + e[t]
    save("series_ar.txt", ar)

    print("ADF rw c lag2   :", adfuller(rw, maxlag=2, regression="c", autolag=None)[:2])
    print("ADF rw ct lag2  :", adfuller(rw, maxlag=2, regression="ct", autolag=None)[:2])
    r = adfuller(rw, maxlag=4, regression="c", autolag="AIC")
    print("ADF rw c auto4  :", r[0], r[1], "usedlag", r[2])
    print("ADF ar c lag1   :", adfuller(ar, maxlag=1, regression="c", autolag=None)[:2])
    print("PP  rw c        :", pp_ztau(rw, "c"))
    print("PP  rw ct       :", pp_ztau(rw, "ct"))
    print("PP  ar c        :", pp_ztau(ar, "c"))

    rng = np.random.default_rng(3)
    x = np.cumsum(rng.standard_normal(200))
    y = 0.8 * x + rng.standard_normal(200) * 0.7
    coint2 = np.column_stack([x, y])
    save("series_coint2.csv", coint2)
    jr = coint_johansen(coint2, 0, 1)
    print("JOH coint2 const lag1:", jr.lr1, "eig", jr.eig)

    rng = np.random.default_rng(4)
    walks3 = np.cumsum(rng.standard_normal((250, 3)), axis=0)
    save("series_walks3.csv", walks3)
    print("JOH walks3 const lag1:", coint_johansen(walks3, 0, 1).lr1)
    print("JOH walks3 none  lag2:", coint_johansen(walks3, -1, 2).lr1)

    rng = np.random.default_rng(11)
    gx = rng.standard_normal(200)
    gy = np.zeros(200)
    e = rng.standard_normal(200)
    for t in range(2, 200):
        gy[t] = 0.5 * gy[t - 1] + 0.4 * gx[t - 2] + e[t]
    save("series_granger.csv", np.column_stack([gx, gy]))
    res = grangercausalitytests(np.column_stack([gy, gx]), maxlag=2, verbose=False)
    print("GRANGER x->y lag2:", res[2][0]["ssr_ftest"][:2])
    res = grangercausalitytests(np.column_stack([gx, gy]), maxlag=2, verbose=False)
    print("GRANGER y->x lag2:", res[2][0]["ssr_ftest"][:2])

    rng = np.random.default_rng(9)
    normal = rng.standard_normal(300)
    save("series_normal.txt", normal)
    print("JB normal:", jarque_bera(normal))
    expo = rng.exponential(1.0, 300)
    save("series_expo.txt", expo)
    print("JB expo  :", jarque_bera(expo))

    qv = np.random.default_rng(5).standard_normal(17)
    save("series_q17.txt", qv)
    for q in [0.05, 0.16, 0.50, 0.84, 0.95]:
        print(f"QUANTILE {q}:", np.quantile(qv, q))


if __name__ == "__main__":
    main()
