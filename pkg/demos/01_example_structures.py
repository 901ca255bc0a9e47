"""Extract every filtration from the ten-stock example network.

Run from the repository root:  python3 demos/01_example_structures.py
"""
from pathlib import Path

from netsift import degree_vector, extract, read_matrix_csv

net = read_matrix_csv(Path(__file__).resolve().parents[1] / "tests" / "data" / "ten_stocks.csv")
print(f"{net.n} instruments: {', '.join(net.labels)}")
print(f"strongest link ACWI-ADX = {net.weight('ACWI', 'ADX')}")

# The tree keeps the N-1 strongest links that do not close a cycle.
tree = extract(net, "MST")
print("\nMST edges:")
for i, j in tree.sorted_edges():
    print(f"  {net.labels[i]:>5} - {net.labels[j]:<5} {net.weights[i, j]:.4f}")
print("degree vector:", degree_vector(tree, net.n))

# The planar graph keeps 3N-6 links and always contains the tree.
planar = extract(net, "PMFG")
print(f"\nPMFG: {len(planar.edges)} edges, contains MST: {tree.edges <= planar.edges}")

# Threshold structures at 0.55.
mg = extract(net, "MG", 0.55)
print(f"market graph at 0.55: {len(mg.edges)} edges")
for kind in ("MCMW", "MISMW"):
    s = extract(net, kind, 0.55)
    print(f"{kind}: {sorted(net.labels[v] for v in s.vertices)}")
