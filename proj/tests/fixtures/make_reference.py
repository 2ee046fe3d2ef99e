"""Reference values for the statistics tests.

Run once and commit the output:

    python3 tests/fixtures/make_reference.py > tests/fixtures/reference.json

Shapiro-Wilk, Welch t, Wilcoxon and distribution values come from scipy;
Lilliefors p-values from statsmodels. DeLong standard errors use a direct
O(m*n) pairwise implementation written here, independent of the library's
midrank formulation.
"""
import json
import sys

import numpy as np
import scipy
import statsmodels
from scipy import special, stats
from statsmodels.stats.diagnostic import lilliefors


def shapiro_cases(rng):
    cases = [("spaced_1_20", np.arange(1.0, 21.0))]
    sizes = [3, 4, 5, 6, 7, 9, 11, 12, 15, 20, 25, 30, 50, 80, 100, 150, 250, 500, 1000]
    makers = [
        lambda n: rng.normal(0.9, 0.03, n),
        lambda n: rng.exponential(1.0, n),
        lambda n: rng.uniform(0.0, 1.0, n),
        lambda n: rng.standard_t(3, n),
        lambda n: np.round(rng.normal(72.1, 13.7, n), 1),
    ]
    for i, n in enumerate(sizes):
        x = makers[i % len(makers)](n)
        cases.append((f"case_{i:02d}_n{n}", x))
    out = []
    for name, x in cases:
        w, p = stats.shapiro(x)
        out.append({"name": name, "x": [float(v) for v in x], "w": float(w), "p": float(p)})
    return out


def delong_se(scores, labels):
    pos = scores[labels == 1]
    neg = scores[labels == 0]
    psi = (pos[:, None] > neg[None, :]).astype(float) + 0.5 * (pos[:, None] == neg[None, :])
    v10 = psi.mean(axis=1)
    v01 = psi.mean(axis=0)
    auc = psi.mean()
    se = np.sqrt(v10.var(ddof=1) / len(pos) + v01.var(ddof=1) / len(neg))
    return float(auc), float(se)


def delong_cases(rng):
    out = []
    for i in range(20):
        n = 20 if i < 10 else int(rng.integers(10, 80))
        labels = np.zeros(n, dtype=int)
        labels[: n // 2 + (i % 3) - 1] = 1
        rng.shuffle(labels)
        if i % 2 == 0:
            scores = rng.normal(0.0, 1.0, n) + 0.8 * labels
        else:
            scores = np.round(rng.uniform(0.0, 1.0, n) + 0.3 * labels, 1)  # ties
        auc, se = delong_se(scores, labels)
        out.append({"scores": [float(v) for v in scores], "labels": [int(v) for v in labels],
                    "auc": auc, "se": se})
    return out


def welch_cases(rng):
    pairs = [([1, 2, 3, 4], [2, 3, 4, 5]), ([1, 2, 3, 4], [1, 2, 3, 4])]
    for _ in range(8):
        a = rng.normal(0.0, rng.uniform(0.5, 3.0), int(rng.integers(2, 40)))
        b = rng.normal(rng.uniform(-1, 1), rng.uniform(0.5, 3.0), int(rng.integers(2, 40)))
        pairs.append((list(a), list(b)))
    out = []
    for a, b in pairs:
        a = np.asarray(a, dtype=float)
        b = np.asarray(b, dtype=float)
        welch = stats.ttest_ind(a, b, equal_var=False)
        pooled = stats.ttest_ind(a, b, equal_var=True)
        va, vb = a.var(ddof=1) / len(a), b.var(ddof=1) / len(b)
        df = (va + vb) ** 2 / (va**2 / (len(a) - 1) + vb**2 / (len(b) - 1)) if va + vb > 0 else len(a) + len(b) - 2
        out.append({"a": [float(v) for v in a], "b": [float(v) for v in b],
                    "t": float(np.nan_to_num(welch.statistic)), "p": float(np.nan_to_num(welch.pvalue, nan=1.0)),
                    "df": float(df),
                    "t_pooled": float(np.nan_to_num(pooled.statistic)),
                    "p_pooled": float(np.nan_to_num(pooled.pvalue, nan=1.0))})
    return out


def wilcoxon_cases(rng):
    out = []
    for i in range(12):
        n = 30 + 5 * i
        d = np.round(rng.normal(0.15 * (i % 4), 1.0, n), 1)  # one decimal: ties and zeros
        a = rng.normal(0.0, 1.0, n)
        b = a - d
        d_eff = a - b
        res = stats.wilcoxon(a, b, zero_method="wilcox", correction=True, method="approx")
        nz = d_eff[d_eff != 0]
        ranks = stats.rankdata(np.abs(nz))
        out.append({"a": [float(v) for v in a], "b": [float(v) for v in b],
                    "w_plus": float(ranks[nz > 0].sum()), "n_effective": int(len(nz)),
                    "p": float(res.pvalue)})
    return out


def lilliefors_cases(rng):
    out = []
    for i, n in enumerate([5, 8, 12, 20, 35, 50, 80, 100, 101, 150, 300, 1000]):
        x = rng.normal(10.0, 2.0, n) if i % 2 == 0 else rng.gamma(3.0, 1.0, n)
        d, p = lilliefors(x, dist="norm", pvalmethod="approx")
        out.append({"x": [float(v) for v in x], "d": float(d), "p": float(p)})
    return out


def distribution_cases():
    probs = [1e-10, 1e-4, 0.01, 0.025, 0.1, 0.3, 0.5, 0.7, 0.975, 0.999, 1 - 1e-9]
    quant = [{"p": p, "z": float(stats.norm.ppf(p))} for p in probs]
    zs = [-8.0, -3.2, -1.96, -0.5, 0.0, 0.7, 1.64, 5.0]
    cdf = [{"z": z, "p": float(stats.norm.cdf(z))} for z in zs]
    tvals = [(0.0, 3.0), (1.0954451150103321, 6.0), (-2.3, 4.5), (2.0, 1.0), (3.5, 30.0), (12.0, 7.3), (0.4, 250.0)]
    t = [{"t": tv, "df": df, "p_two_sided": float(2 * stats.t.sf(abs(tv), df)), "cdf": float(stats.t.cdf(tv, df))}
         for tv, df in tvals]
    betas = [(0.5, 0.5, 0.3), (2.0, 3.0, 0.4), (10.0, 0.5, 0.99), (30.0, 40.0, 0.45), (1.0, 1.0, 0.25), (0.1, 5.0, 0.01)]
    beta = [{"a": a, "b": b, "x": x, "value": float(special.betainc(a, b, x))} for a, b, x in betas]
    return {"normal_quantile": quant, "normal_cdf": cdf, "student_t": t, "incomplete_beta": beta}


def main():
    rng = np.random.default_rng(20240611)
    doc = {
        "generated_with": {"numpy": np.__version__, "scipy": scipy.__version__,
                           "statsmodels": statsmodels.__version__},
        "shapiro_wilk": shapiro_cases(rng),
        "delong": delong_cases(rng),
        "welch": welch_cases(rng),
        "wilcoxon_approx": wilcoxon_cases(rng),
        "lilliefors": lilliefors_cases(rng),
        "distributions": distribution_cases(),
    }
    json.dump(doc, sys.stdout, indent=1)
    sys.stdout.write("\n")


if __name__ == "__main__":
    main()
