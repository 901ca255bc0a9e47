import itertools

import networkx as nx
import numpy as np
import pytest
from scipy.spatial import Delaunay

from netsift.planarity import biconnected_blocks, planarity_check


def complete(n):
    return list(itertools.combinations(range(n), 2))


def test_kuratowski_graphs():
    assert planarity_check(complete(4), 4)
    assert not planarity_check(complete(5), 5)
    assert not planarity_check([(a, b) for a in range(3) for b in range(3, 6)], 6)


def test_subdivided_k33_is_nonplanar():
    # K3,3 with every edge subdivided once passes the Euler bound
    edges = []
    mid = 6
    for a in range(3):
        for b in range(3, 6):
            edges += [(a, mid), (mid, b)]
            mid += 1
    assert len(edges) <= 3 * mid - 6
    assert not planarity_check(edges, mid)


def test_petersen_and_planar_families():
    assert not planarity_check(nx.petersen_graph().edges(), 10)
    assert planarity_check(nx.icosahedral_graph().edges(), 12)
    assert planarity_check(nx.dodecahedral_graph().edges(), 20)
    assert planarity_check(nx.convert_node_labels_to_integers(nx.grid_2d_graph(5, 5)).edges(), 25)
    assert planarity_check([], 5)


def test_k5_minus_any_edge_is_planar():
    for e in complete(5):
        assert planarity_check([f for f in complete(5) if f != e], 5)


def test_blocks_of_two_triangles_sharing_a_vertex():
    adj = {0: {1, 2}, 1: {0, 2}, 2: {0, 1, 3, 4}, 3: {2, 4}, 4: {2, 3}}
    blocks = sorted(sorted(tuple(sorted(e)) for e in b) for b in biconnected_blocks(adj))
    assert blocks == [[(0, 1), (0, 2), (1, 2)], [(2, 3), (2, 4), (3, 4)]]


@pytest.mark.parametrize("seed", range(10))
def test_agrees_with_networkx_on_random_graphs(seed):
    rng = np.random.default_rng(seed)
    for _ in range(200):
        n = int(rng.integers(5, 16))
        p = rng.uniform(0.1, 0.7)
        edges = [e for e in complete(n) if rng.random() < p]
        g = nx.Graph(edges)
        g.add_nodes_from(range(n))
        assert planarity_check(edges, n) == nx.check_planarity(g)[0], edges


def test_agrees_with_networkx_near_maximal_planar():
    rng = np.random.default_rng(99)
    for _ in range(100):
        n = int(rng.integers(6, 25))
        pts = rng.random((n, 2))
        tri = Delaunay(pts)
        edges = {tuple(sorted((int(s[a]), int(s[b])))) for s in tri.simplices for a, b in ((0, 1), (1, 2), (0, 2))}
        assert planarity_check(edges, n)
        missing = [e for e in complete(n) if e not in edges]
        extra = missing[int(rng.integers(len(missing)))]
        g = nx.Graph(list(edges) + [extra])
        assert planarity_check(list(edges) + [extra], n) == nx.check_planarity(g)[0]
