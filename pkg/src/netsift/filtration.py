"""Filtrations: extract MST, PMFG, market graph, MCMW and MISMW from a network.

Every greedy step orders pairs by weight descending, then by (i, j)
ascending, so equal weights never make the output depend on input order.
Pairs with weight exactly zero are treated as absent for the tree and the
planar graph.
"""
from __future__ import annotations

import numpy as np

from .cliques import CliqueSolverBudget, best_maximum_clique
from .errors import DisconnectedNetworkError, ValidationError
from .network import NetworkStructure, StructureKind, WeightedNetwork
from .planarity import planarity_check


class UnionFind:
    def __init__(self, n):
        self.parent = list(range(n))
        self.rank = [0] * n

    def find(self, x):
        root = x
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[x] != root:
            self.parent[x], x = root, self.parent[x]
        return root

    def union(self, a, b) -> bool:
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return False
        if self.rank[ra] < self.rank[rb]:
            ra, rb = rb, ra
        self.parent[rb] = ra
        if self.rank[ra] == self.rank[rb]:
            self.rank[ra] += 1
        return True


def _weights(network):
    return network.weights if isinstance(network, WeightedNetwork) else np.asarray(network, dtype=float)


def sorted_pairs(weights) -> tuple[np.ndarray, np.ndarray]:
    """Upper-triangle pairs with nonzero weight, weight-descending then (i, j) ascending."""
    n = weights.shape[0]
    i, j = np.triu_indices(n, k=1)
    w = weights[i, j]
    keep = w != 0
    i, j, w = i[keep], j[keep], w[keep]
    order = np.lexsort((j, i, -w))
    return i[order], j[order]


def mst_edges(weights) -> list[tuple[int, int]]:
    """Kruskal's algorithm for the maximum-weight spanning tree."""
    n = weights.shape[0]
    uf = UnionFind(n)
    out = []
    for a, b in zip(*sorted_pairs(weights)):
        a, b = int(a), int(b)
        if uf.union(a, b):
            out.append((a, b))
            if len(out) == n - 1:
                break
    if len(out) != n - 1:
        raise DisconnectedNetworkError("network is disconnected over nonzero-weight pairs")
    return out


def mst(network) -> NetworkStructure:
    """Spanning tree of maximal total weight (called MST by convention)."""
    w = _weights(network)
    return NetworkStructure.from_edges(StructureKind.MST, w.shape[0], mst_edges(w))


def pmfg(network) -> NetworkStructure:
    """Planar maximally filtered graph.

    Pairs are visited in weight order and kept whenever the graph stays
    planar, until 3N - 6 edges are present.
    """
    w = _weights(network)
    n = w.shape[0]
    if n < 3:
        raise ValidationError("PMFG needs at least three vertices")
    limit = 3 * n - 6
    edges = []
    for a, b in zip(*sorted_pairs(w)):
        if len(edges) == limit:
            break
        edges.append((int(a), int(b)))
        if len(edges) > 6 and not planarity_check(edges, n):
            edges.pop()
    return NetworkStructure.from_edges(StructureKind.PMFG, n, edges)


def _check_theta(theta):
    if not -1.0 <= theta <= 1.0:
        raise ValidationError(f"theta must lie in [-1, 1], got {theta}")


def market_adjacency(weights, theta) -> np.ndarray:
    """Boolean adjacency with an edge wherever the weight strictly exceeds ``theta``."""
    a = weights > theta
    np.fill_diagonal(a, False)
    return a


def market_graph(network, theta: float) -> NetworkStructure:
    _check_theta(theta)
    w = _weights(network)
    i, j = np.nonzero(np.triu(market_adjacency(w, theta), k=1))
    return NetworkStructure.from_edges(StructureKind.MG, w.shape[0], zip(i.tolist(), j.tolist()), theta=theta)


def _vertex_set_structure(kind, n, vertices, theta, tie):
    vs = sorted(vertices)
    pairs = [(vs[a], vs[b]) for a in range(len(vs)) for b in range(a + 1, len(vs))]
    return NetworkStructure.from_edges(kind, n, pairs, vertices=vs, theta=theta, tie_broken=tie)


def mcmw(network, theta: float, budget: CliqueSolverBudget | None = None) -> NetworkStructure:
    """Maximum clique of the market graph with maximal summed network weight.

    Remaining ties go to the lexicographically smallest vertex tuple; the
    returned structure has ``tie_broken`` set when that happened.
    """
    _check_theta(theta)
    w = _weights(network)
    res = best_maximum_clique(market_adjacency(w, theta), w, maximize=True, budget=budget)
    return _vertex_set_structure(StructureKind.MCMW, w.shape[0], res.vertices, theta, res.tie_broken)


def mismw(network, theta: float, budget: CliqueSolverBudget | None = None) -> NetworkStructure:
    """Maximum independent set of the market graph with minimal summed network weight.

    Solved as a maximum clique of the complement graph.
    """
    _check_theta(theta)
    w = _weights(network)
    comp = ~market_adjacency(w, theta)
    np.fill_diagonal(comp, False)
    res = best_maximum_clique(comp, w, maximize=False, budget=budget)
    return _vertex_set_structure(StructureKind.MISMW, w.shape[0], res.vertices, theta, res.tie_broken)


def extract(network, kind, theta=None, budget=None) -> NetworkStructure:
    """Dispatch to the filtration named by ``kind``."""
    kind = StructureKind(kind)
    if kind.needs_theta and theta is None:
        raise ValidationError(f"{kind.value} requires theta")
    if kind is StructureKind.MST:
        return mst(network)
    if kind is StructureKind.PMFG:
        return pmfg(network)
    if kind is StructureKind.MG:
        return market_graph(network, theta)
    if kind is StructureKind.MCMW:
        return mcmw(network, theta, budget)
    return mismw(network, theta, budget)
