"""Exact maximum-clique search with a weight-based selection among optima.

Branch and bound in the style of Tomita's MCQ: candidate sets are Python
int bitsets and a greedy sequential colouring of the candidates bounds the
clique size reachable from the current node. The search runs twice:
first to find the clique number, then to enumerate every clique of that
size and keep the best by summed pair weight, breaking remaining ties by
the lexicographically smallest sorted vertex tuple.
"""
from __future__ import annotations

import math
import time
from dataclasses import dataclass

import numpy as np

from .errors import SolverBudgetExceeded, ValidationError


@dataclass(frozen=True)
class CliqueSolverBudget:
    """Limits for one exact solve. Exceeding either raises ``SolverBudgetExceeded``."""

    node_limit: int = 5_000_000
    time_limit: float = 60.0

    def __post_init__(self):
        if self.node_limit <= 0 or self.time_limit <= 0:
            raise ValidationError("solver budget limits must be positive")


@dataclass(frozen=True)
class CliqueResult:
    vertices: tuple[int, ...]
    weight: float
    n_optimal_size: int  # number of maximum-size cliques examined
    tie_broken: bool  # another maximum clique had exactly the same weight
    nodes: int


def clique_weight(vertices, weights) -> float:
    """Correctly rounded sum of ``weights[i, j]`` over pairs of ``vertices``."""
    vs = sorted(vertices)
    return math.fsum(float(weights[vs[a], vs[b]]) for a in range(len(vs)) for b in range(a + 1, len(vs)))


class _Search:
    def __init__(self, adj_bits, budget):
        self.adj = adj_bits
        self.budget = budget
        self.nodes = 0
        self.deadline = time.monotonic() + budget.time_limit

    def _tick(self):
        self.nodes += 1
        if self.nodes > self.budget.node_limit:
            raise SolverBudgetExceeded(f"clique search exceeded {self.budget.node_limit} nodes")
        if self.nodes & 1023 == 0 and time.monotonic() > self.deadline:
            raise SolverBudgetExceeded(f"clique search exceeded {self.budget.time_limit} s")

    def _color_sort(self, p):
        adj = self.adj
        order, colors = [], []
        u = p
        k = 0
        while u:
            k += 1
            q = u
            while q:
                low = q & -q
                v = low.bit_length() - 1
                q &= ~adj[v] & ~low
                u &= ~low
                order.append(v)
                colors.append(k)
        return order, colors

    def clique_number(self, p):
        self.best = 0
        self._grow(0, p)
        return self.best

    def _grow(self, size, p):
        self._tick()
        order, colors = self._color_sort(p)
        for idx in range(len(order) - 1, -1, -1):
            if size + colors[idx] <= self.best:
                return
            v = order[idx]
            newp = p & self.adj[v]
            if newp:
                self._grow(size + 1, newp)
            elif size + 1 > self.best:
                self.best = size + 1
            p &= ~(1 << v)

    def enumerate_size(self, p, target, visit):
        self.target = target
        self.visit = visit
        self._enum([], p)

    def _enum(self, r, p):
        self._tick()
        order, colors = self._color_sort(p)
        for idx in range(len(order) - 1, -1, -1):
            if len(r) + colors[idx] < self.target:
                return
            v = order[idx]
            newp = p & self.adj[v]
            r.append(v)
            if len(r) == self.target:
                self.visit(r)
            elif newp:
                self._enum(r, newp)
            r.pop()
            p &= ~(1 << v)


def best_maximum_clique(adjacency, weights, *, maximize=True, budget=None) -> CliqueResult:
    """Maximum clique of ``adjacency`` with the best summed weight.

    Parameters
    ----------
    adjacency : (N, N) bool array
        Symmetric, zero diagonal.
    weights : (N, N) array
        Pair weights used to rank maximum cliques.
    maximize : bool
        Pick the maximum-weight clique if true, the minimum-weight one otherwise.
    budget : CliqueSolverBudget, optional
    """
    a = np.asarray(adjacency, dtype=bool)
    n = a.shape[0]
    budget = budget or CliqueSolverBudget()
    if n == 0:
        return CliqueResult((), 0.0, 1, False, 0)
    # Relabel so that bit order follows descending degree; this tightens the colouring bound.
    deg = a.sum(axis=1)
    perm = sorted(range(n), key=lambda v: (-deg[v], v))
    pos = {v: k for k, v in enumerate(perm)}
    adj_bits = []
    for v in perm:
        bits = 0
        for w in np.flatnonzero(a[v]):
            if w != v:
                bits |= 1 << pos[int(w)]
        adj_bits.append(bits)
    search = _Search(adj_bits, budget)
    full = (1 << n) - 1
    omega = search.clique_number(full)

    sign = 1.0 if maximize else -1.0
    state = {"key": None, "verts": None, "weight": 0.0, "count": 0, "tie": False}

    def visit(r):
        verts = tuple(sorted(perm[k] for k in r))
        w = clique_weight(verts, weights)
        state["count"] += 1
        if state["key"] is None:
            state.update(key=sign * w, verts=verts, weight=w)
            return
        if sign * w > state["key"]:
            state.update(key=sign * w, verts=verts, weight=w, tie=False)
        elif sign * w == state["key"]:
            state["tie"] = True
            if verts < state["verts"]:
                state.update(verts=verts, weight=w)

    search.enumerate_size(full, omega, visit)
    return CliqueResult(state["verts"], state["weight"], state["count"], state["tie"], search.nodes)
