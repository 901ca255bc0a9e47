"""How the expected fraction of errors falls with the number of observations.

python3 demos/03_uncertainty_curves.py
"""
from netsift import build_network, random_factor_loadings, single_factor_correlation, uncertainty_curve

loadings = random_factor_loadings(30, 0.3, 0.9, seed=7)
ref = build_network([f"S{k:02d}" for k in range(30)], single_factor_correlation(loadings))
grid = [20, 50, 100, 500, 2000]

for kind, theta in (("MST", None), ("PMFG", None), ("MG", 0.3), ("MCMW", 0.3)):
    curve = uncertainty_curve(ref, kind, theta, n_grid=grid, trials=100, seed=5)
    cells = "  ".join(f"{p.n}:{p.mean_x:.3f}" for p in curve.points)
    print(f"{kind:<5} {cells}   monotone={curve.monotone}")
