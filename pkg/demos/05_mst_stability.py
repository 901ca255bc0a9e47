"""Which tree shapes appear most often as the sample grows.

python3 demos/05_mst_stability.py
"""
from pathlib import Path

from netsift import degree_vector_frequencies, read_matrix_csv

net = read_matrix_csv(Path(__file__).resolve().parents[1] / "tests" / "data" / "ten_stocks.csv")
for n in (5, 100, 1000, 10000):
    freqs = degree_vector_frequencies(net, n, trials=300, seed=20140101)
    top = list(freqs.items())[:3]
    print(f"n={n}")
    for vec, f in top:
        print(f"   {vec}  {f:.3f}")
