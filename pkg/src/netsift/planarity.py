"""Exact planarity test.

The graph is split into biconnected blocks (a graph is planar iff every
block is) and each block is tested with the Demoucron-Malgrange-Pertuiset
path-addition algorithm: embed a cycle, then repeatedly route a path
through a fragment into a face that contains all of its attachment
vertices, preferring fragments that have only one such face. A fragment
with no admissible face proves non-planarity.

The Euler bound |E| <= 3|V| - 6 is only used to reject early.
"""
from __future__ import annotations

from collections import defaultdict, deque


def _adjacency(n, edges):
    adj = defaultdict(set)
    for u, v in edges:
        if u == v:
            continue
        adj[u].add(v)
        adj[v].add(u)
    return adj


def biconnected_blocks(adj) -> list[list[tuple[int, int]]]:
    """Edge lists of the biconnected components (iterative Tarjan)."""
    disc, low = {}, {}
    blocks = []
    counter = 0
    for root in sorted(adj):
        if root in disc:
            continue
        disc[root] = low[root] = counter
        counter += 1
        edge_stack = []
        stack = [(root, None, iter(sorted(adj[root])))]
        while stack:
            u, parent, it = stack[-1]
            advanced = False
            for w in it:
                if w == parent:
                    continue
                if w not in disc:
                    disc[w] = low[w] = counter
                    counter += 1
                    edge_stack.append((u, w))
                    stack.append((w, u, iter(sorted(adj[w]))))
                    advanced = True
                    break
                if disc[w] < disc[u]:
                    edge_stack.append((u, w))
                    low[u] = min(low[u], disc[w])
            if advanced:
                continue
            stack.pop()
            if parent is None:
                continue
            low[parent] = min(low[parent], low[u])
            if low[u] >= disc[parent]:
                block = []
                while True:
                    e = edge_stack.pop()
                    block.append(e)
                    if e == (parent, u):
                        break
                blocks.append(block)
    return blocks


def _find_cycle(adj, start):
    parent = {start: None}
    depth = {start: 0}
    stack = [(start, iter(sorted(adj[start])))]
    while stack:
        u, it = stack[-1]
        for w in it:
            if w == parent[u]:
                continue
            if w in depth:
                if depth[w] < depth[u]:
                    cycle = [u]
                    while cycle[-1] != w:
                        cycle.append(parent[cycle[-1]])
                    return cycle
                continue
            parent[w] = u
            depth[w] = depth[u] + 1
            stack.append((w, iter(sorted(adj[w]))))
            break
        else:
            stack.pop()
    return None


def _fragments(adj, h_vertices, h_edges):
    """Yield (contacts, kind, payload) for every fragment relative to H."""
    frags = []
    for u in adj:
        if u not in h_vertices:
            continue
        for v in adj[u]:
            if u < v and v in h_vertices and (u, v) not in h_edges:
                frags.append((frozenset((u, v)), "edge", (u, v)))
    seen = set()
    for s in adj:
        if s in h_vertices or s in seen:
            continue
        comp = {s}
        seen.add(s)
        contacts = set()
        queue = deque([s])
        while queue:
            x = queue.popleft()
            for y in adj[x]:
                if y in h_vertices:
                    contacts.add(y)
                elif y not in seen:
                    seen.add(y)
                    comp.add(y)
                    queue.append(y)
        frags.append((frozenset(contacts), "comp", comp))
    return frags


def _fragment_path(adj, h_vertices, kind, payload, contacts):
    if kind == "edge":
        return list(payload)
    comp = payload
    a = min(contacts)
    start = min(x for x in adj[a] if x in comp)
    prev = {start: None}
    queue = deque([start])
    while queue:
        x = queue.popleft()
        ends = sorted(y for y in adj[x] if y in h_vertices and y != a)
        if ends:
            path = [x]
            while prev[path[-1]] is not None:
                path.append(prev[path[-1]])
            path.reverse()
            return [a] + path + [ends[0]]
        for y in sorted(adj[x]):
            if y in comp and y not in prev:
                prev[y] = x
                queue.append(y)
    raise AssertionError("fragment with a single attachment inside a biconnected block")


def _split_face(face, path):
    a, b = path[0], path[-1]
    inner = path[1:-1]
    k = len(face)
    ia, ib = face.index(a), face.index(b)
    fwd = [face[(ia + t) % k] for t in range((ib - ia) % k + 1)]  # a ... b
    back = [face[(ib + t) % k] for t in range((ia - ib) % k + 1)]  # b ... a
    return fwd + inner[::-1], back + inner


def _block_is_planar(edges) -> bool:
    adj = _adjacency(None, edges)
    nv, ne = len(adj), len(edges)
    if nv <= 4:
        return True
    if ne > 3 * nv - 6:
        return False
    cycle = _find_cycle(adj, min(adj))
    h_vertices = set(cycle)
    h_edges = set()
    for t in range(len(cycle)):
        u, v = cycle[t], cycle[(t + 1) % len(cycle)]
        h_edges.add((min(u, v), max(u, v)))
    faces = [list(cycle), list(cycle)]
    while len(h_edges) < ne:
        face_sets = [set(f) for f in faces]
        chosen = None
        for contacts, kind, payload in _fragments(adj, h_vertices, h_edges):
            admissible = [k for k, fs in enumerate(face_sets) if contacts <= fs]
            if not admissible:
                return False
            if chosen is None or len(admissible) == 1 and len(chosen[3]) > 1:
                chosen = (contacts, kind, payload, admissible)
        contacts, kind, payload, admissible = chosen
        path = _fragment_path(adj, h_vertices, kind, payload, contacts)
        f = admissible[0]
        f1, f2 = _split_face(faces[f], path)
        faces[f] = f1
        faces.append(f2)
        h_vertices.update(path)
        for t in range(len(path) - 1):
            u, v = path[t], path[t + 1]
            h_edges.add((min(u, v), max(u, v)))
    return True


def planarity_check(edges, n: int | None = None) -> bool:
    """Return True iff the simple undirected graph given by ``edges`` is planar.

    ``n`` is the vertex count; isolated vertices never affect planarity, so
    it only feeds the Euler pre-filter.
    """
    edges = {(min(u, v), max(u, v)) for u, v in edges if u != v}
    if n is None:
        n = len({x for e in edges for x in e})
    if n >= 3 and len(edges) > 3 * n - 6:
        return False
    adj = _adjacency(n, edges)
    for block in biconnected_blocks(adj):
        if len(block) < 9:
            # fewer than 9 edges: too small to contain a K5 or K3,3 subdivision
            continue
        if not _block_is_planar([(min(u, v), max(u, v)) for u, v in block]):
            return False
    return True
