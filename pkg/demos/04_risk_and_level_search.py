"""Conditional risk under custom losses, and the observations needed to reach a target error.

python3 demos/04_risk_and_level_search.py
"""

from netsift import (LossSpec, build_network, conditional_risk, estimate_uncertainty, find_n_for_level,
                     fraction_losses, random_factor_loadings, single_factor_correlation)

N = 20
ref = build_network([f"S{k:02d}" for k in range(N)],
                    single_factor_correlation(random_factor_loadings(N, 0.3, 0.9, seed=2)))

est = estimate_uncertainty(ref, "MG", 0.3, n=200, trials=300, seed=4)
m1, m2 = int(est.m1[0]), int(est.m2[0])
print(f"mean fraction of errors: {est.mean_x:.4f} +/- {est.stderr:.4f}")
print(f"risk with fraction losses: {conditional_risk(fraction_losses('MG', N, m1, m2), est.probabilities):.4f}")

# Penalise a spurious edge three times as much as a missed one.
print(f"risk with a=3, b=1: {conditional_risk(LossSpec.uniform(N, 3.0, 1.0), est.probabilities):.3f}")

grid = [50, 100, 200, 500, 1000, 2000]
for kind, theta in (("MG", 0.3), ("MST", None)):
    s = find_n_for_level(ref, kind, theta, level=0.1, n_grid=grid, trials=200, seed=9)
    where = s.n if s.reached else f"not within n <= {grid[-1]}"
    print(f"{kind}: level 0.1 reached at n = {where}")
