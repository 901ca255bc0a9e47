"""Statistical uncertainty of filtered structures.

Two measures are provided: the fraction of errors
``X = (X1/M1 + X2/M2) / 2`` averaged over simulated samples, and the
conditional risk, a loss-weighted sum of per-pair Type I / Type II error
probabilities. Type I means a pair is present in the sample structure but
not in the reference one; Type II the reverse. For maximum cliques and
independent sets the errors are judged against the opposite side's
market graph (see :func:`count_errors`).
"""
from __future__ import annotations

import math
import os
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .cliques import CliqueSolverBudget
from .errors import SolverBudgetExceeded, ValidationError
from .filtration import (
    extract,
    market_adjacency,
    mcmw,
    mismw,
    mst_edges,
    pmfg,
)
from .network import NetworkStructure, StructureKind, WeightedNetwork, degree_vector
from .stats import MVNSampler, sample_moments

WORKERS_ENV = "NETSIFT_WORKERS"
Z95 = 1.959963984540054


@dataclass(frozen=True)
class ErrorCounts:
    x1: int
    x2: int
    m1: int
    m2: int

    def __post_init__(self):
        if not (0 <= self.x1 <= self.m1 and 0 <= self.x2 <= self.m2):
            raise ValidationError(f"inconsistent error counts {self}")

    @property
    def ratio1(self) -> float:
        return self.x1 / self.m1 if self.m1 else 0.0

    @property
    def ratio2(self) -> float:
        return self.x2 / self.m2 if self.m2 else 0.0


def _fraction(x1, x2, m1, m2) -> float:
    if m1 and m2:
        return 0.5 * (x1 / m1 + x2 / m2)
    if m1:
        return x1 / m1
    if m2:
        return x2 / m2
    return 0.0


def fraction_of_error(counts: ErrorCounts) -> float:
    """Total fraction of errors of one sample structure.

    When one error type is impossible (``m == 0``: an empty or complete
    reference market graph, or a one-vertex clique) the fraction is taken
    over the remaining type only, so the result still spans [0, 1].
    """
    return _fraction(counts.x1, counts.x2, counts.m1, counts.m2)


@dataclass(frozen=True)
class LossSpec:
    """Per-pair losses for Type I (``a``) and Type II (``b``) errors."""

    a: np.ndarray
    b: np.ndarray

    def __post_init__(self):
        for name in ("a", "b"):
            m = np.asarray(getattr(self, name), dtype=float)
            if m.ndim != 2 or m.shape[0] != m.shape[1]:
                raise ValidationError(f"loss matrix {name} must be square")
            if np.any(m < 0) or not np.all(np.isfinite(m)):
                raise ValidationError(f"loss matrix {name} must be finite and non-negative")
            if not np.array_equal(m, m.T):
                raise ValidationError(f"loss matrix {name} must be symmetric")
            if np.any(np.diag(m) != 0):
                raise ValidationError(f"loss matrix {name} must have a zero diagonal")
            object.__setattr__(self, name, m)
        if self.a.shape != self.b.shape:
            raise ValidationError("loss matrices differ in shape")

    @classmethod
    def uniform(cls, n, a, b):
        off = 1.0 - np.eye(n)
        return cls(a * off, b * off)


def fraction_losses(kind, n, m1, m2) -> LossSpec:
    """Losses under which the conditional risk equals the expected fraction of errors.

    Only meaningful where ``m1`` and ``m2`` are fixed by the reference
    structure (MST, PMFG, MG).
    """
    kind = StructureKind(kind)
    if kind.is_vertex_set:
        raise ValidationError(f"no constant-loss equivalent exists for {kind.value}")
    if m1 and m2:
        return LossSpec.uniform(n, 1 / (2 * m1), 1 / (2 * m2))
    return LossSpec.uniform(n, 1 / m1 if m1 else 0.0, 1 / m2 if m2 else 0.0)


@dataclass(frozen=True)
class ErrorProbabilities:
    """Estimated per-pair error probabilities: ``p1`` Type I, ``p2`` Type II."""

    p1: np.ndarray
    p2: np.ndarray
    trials: int


def conditional_risk(losses: LossSpec, probs: ErrorProbabilities) -> float:
    """Sum over pairs i < j of ``a_ij * p1_ij + b_ij * p2_ij``."""
    if losses.a.shape != probs.p1.shape:
        raise ValidationError("loss and probability matrices differ in shape")
    iu = np.triu_indices(losses.a.shape[0], k=1)
    return float(np.sum(losses.a[iu] * probs.p1[iu]) + np.sum(losses.b[iu] * probs.p2[iu]))


# --- error accounting --------------------------------------------------------


def _pair_mask(vertices, n):
    mask = np.zeros((n, n), dtype=bool)
    vs = np.fromiter(sorted(vertices), dtype=np.intp)
    mask[np.ix_(vs, vs)] = True
    np.fill_diagonal(mask, False)
    return mask


def _as_adjacency(x, n):
    if isinstance(x, NetworkStructure):
        return x.adjacency()
    return np.asarray(x, dtype=bool)


def _indicators(kind, ref, sample, ref_mg, sample_mg, n):
    """Upper-triangle Type I / Type II indicator matrices and (m1, m2).

    ``ref`` and ``sample`` are adjacency matrices for edge-set kinds and
    vertex collections for MCMW / MISMW.
    """
    upper = np.triu(np.ones((n, n), dtype=bool), k=1)
    if kind in (StructureKind.MST, StructureKind.PMFG, StructureKind.MG):
        i1 = sample & ~ref & upper
        i2 = ref & ~sample & upper
        m_ref = int(np.count_nonzero(ref & upper))
        if kind is StructureKind.MG:
            return i1, i2, n * (n - 1) // 2 - m_ref, m_ref
        return i1, i2, m_ref, m_ref
    ps, pr = _pair_mask(sample, n) & upper, _pair_mask(ref, n) & upper
    cs, cr = len(sample), len(ref)
    if kind is StructureKind.MCMW:
        i1 = ps & ~ref_mg
        i2 = pr & ~sample_mg
        return i1, i2, math.comb(cs, 2), math.comb(cr, 2)
    i1 = pr & sample_mg
    i2 = ps & ref_mg
    return i1, i2, math.comb(cr, 2), math.comb(cs, 2)


def count_errors(kind, reference_structure, sample_structure, reference_mg=None, sample_mg=None) -> ErrorCounts:
    """Type I / Type II counts of a sample structure against the reference.

    * MST, PMFG: symmetric difference of edge sets, ``M1 = M2`` = number of
      reference edges (N - 1 for a tree, 3N - 6 for a complete PMFG).
    * MG: ``M1 = C(N, 2) - M``, ``M2 = M`` for a reference graph with ``M`` edges.
    * MCMW: X1 counts pairs of the sample clique missing from the
      reference market graph, X2 pairs of the reference clique missing from
      the sample market graph; ``M1 = C(C_s, 2)``, ``M2 = C(C_r, 2)``.
    * MISMW: X1 counts pairs of the reference independent set that are
      edges of the sample market graph, X2 pairs of the sample set that are
      edges of the reference market graph; ``M1 = C(I_r, 2)``, ``M2 = C(I_s, 2)``.
    """
    kind = StructureKind(kind)
    for s in (reference_structure, sample_structure):
        if s.kind is not kind:
            raise ValidationError(f"expected {kind.value} structures, got {s.kind.value}")
    n = reference_structure.n_vertices
    if kind.is_vertex_set:
        if reference_mg is None or sample_mg is None:
            raise ValidationError(f"{kind.value} error counts need both market graphs")
        ref, sample = reference_structure.vertices, sample_structure.vertices
        ref_mg, sample_mg = _as_adjacency(reference_mg, n), _as_adjacency(sample_mg, n)
    else:
        ref, sample = reference_structure.adjacency(), sample_structure.adjacency()
        ref_mg = sample_mg = None
    i1, i2, m1, m2 = _indicators(kind, ref, sample, ref_mg, sample_mg, n)
    return ErrorCounts(int(i1.sum()), int(i2.sum()), m1, m2)


# --- Monte Carlo estimation ---------------------------------------------------


@dataclass(frozen=True)
class UncertaintyEstimate:
    """Monte Carlo estimate at one observation count ``n``.

    ``x1``, ``x2``, ``m1``, ``m2`` hold the per-trial counts in trial order.
    For MCMW only ``probabilities.p2`` (pairs of the fixed reference
    clique) is accumulated and for MISMW only ``p1``; the other matrix is
    left at zero.
    """

    kind: StructureKind
    theta: float | None
    n: int
    seed: int
    mean_x: float
    mean_ratio1: float
    mean_ratio2: float
    stderr: float
    probabilities: ErrorProbabilities
    x1: np.ndarray = field(repr=False)
    x2: np.ndarray = field(repr=False)
    m1: np.ndarray = field(repr=False)
    m2: np.ndarray = field(repr=False)

    @property
    def trials(self) -> int:
        return self.probabilities.trials

    @property
    def fractions(self) -> np.ndarray:
        """Per-trial fraction of errors."""
        return np.array([_fraction(*c) for c in zip(self.x1, self.x2, self.m1, self.m2)])


def resolve_workers(workers=None) -> int:
    if workers is None:
        workers = int(os.environ.get(WORKERS_ENV, "1") or 1)
    return max(1, int(workers))


def _reference_state(weights, kind, theta, budget):
    if kind.is_vertex_set:
        s = extract(weights, kind, theta, budget)
        return sorted(s.vertices), market_adjacency(weights, theta)
    if kind is StructureKind.MG:
        return market_adjacency(weights, theta), None
    s = extract(weights, kind, theta, budget)
    return s.adjacency(), None


def _sample_structure(corr, kind, theta, budget):
    n = corr.shape[0]
    if kind is StructureKind.MG:
        return market_adjacency(corr, theta), None
    if kind is StructureKind.MST:
        a = np.zeros((n, n), dtype=bool)
        for i, j in mst_edges(corr):
            a[i, j] = a[j, i] = True
        return a, None
    if kind is StructureKind.PMFG:
        return pmfg(corr).adjacency(), None
    fn = mcmw if kind is StructureKind.MCMW else mismw
    return sorted(fn(corr, theta, budget).vertices), market_adjacency(corr, theta)


def _run_trials(ref_weights, kind, theta, n, seed, trials, budget, ref_state):
    sampler = MVNSampler(ref_weights)
    N = ref_weights.shape[0]
    ref, ref_mg = ref_state
    out = np.zeros((len(trials), 4), dtype=np.int64)
    c1 = np.zeros((N, N), dtype=np.int64)
    c2 = np.zeros((N, N), dtype=np.int64)
    for k, t in enumerate(trials):
        corr = sample_moments(sampler.draw(n, seed, t)).correlation
        try:
            sample, sample_mg = _sample_structure(corr, kind, theta, budget)
        except SolverBudgetExceeded as exc:
            raise SolverBudgetExceeded(str(exc), trial=t) from None
        i1, i2, m1, m2 = _indicators(kind, ref, sample, ref_mg, sample_mg, N)
        out[k] = (i1.sum(), i2.sum(), m1, m2)
        if kind is not StructureKind.MCMW:
            c1 += i1
        if kind is not StructureKind.MISMW:
            c2 += i2
    return out, c1, c2


def _chunks(trials, workers):
    size = -(-trials // workers)
    return [range(s, min(s + size, trials)) for s in range(0, trials, size)]


def _map_trials(fn, args, trials, workers):
    """Run ``fn(*args, chunk)`` over contiguous trial chunks; results in trial order."""
    chunks = _chunks(trials, workers)
    if workers == 1 or len(chunks) == 1:
        return [fn(*args, c) for c in chunks]
    with ProcessPoolExecutor(max_workers=min(workers, len(chunks))) as pool:
        futures = [pool.submit(fn, *args, c) for c in chunks]
        return [f.result() for f in futures]


def _trial_block(ref_weights, kind, theta, n, seed, budget, ref_state, chunk):
    return _run_trials(ref_weights, kind, theta, n, seed, chunk, budget, ref_state)


def estimate_uncertainty(
    reference: WeightedNetwork,
    kind,
    theta=None,
    *,
    n: int,
    trials: int,
    seed: int,
    budget: CliqueSolverBudget | None = None,
    workers: int | None = None,
    _ref_state=None,
) -> UncertaintyEstimate:
    """Estimate the expected fraction of errors of ``kind`` at ``n`` observations.

    Trial ``t`` draws ``n`` observations from N(0, reference) with the
    generator keyed by ``(seed, t)``, builds the sample structure from the
    sample correlations and compares it to the reference structure, which
    is computed once. Results do not depend on ``workers``.

    Raises
    ------
    SolverBudgetExceeded
        If the clique solver fails in any trial; the trial index is attached.
    """
    kind = StructureKind(kind)
    if trials < 1:
        raise ValidationError("trials must be at least 1")
    if n < 2:
        raise ValidationError("n must be at least 2")
    if kind.needs_theta and theta is None:
        raise ValidationError(f"{kind.value} requires theta")
    theta = theta if kind.needs_theta else None
    w = reference.weights
    ref_state = _ref_state or _reference_state(w, kind, theta, budget)
    blocks = _map_trials(
        _trial_block, (w, kind, theta, n, seed, budget, ref_state), trials, resolve_workers(workers)
    )
    counts = np.concatenate([b[0] for b in blocks])
    c1 = sum(b[1] for b in blocks)
    c2 = sum(b[2] for b in blocks)
    x1, x2, m1, m2 = counts.T
    xs = np.array([_fraction(*c) for c in counts.tolist()])
    r1 = np.array([a / m if m else 0.0 for a, m in zip(x1.tolist(), m1.tolist())])
    r2 = np.array([a / m if m else 0.0 for a, m in zip(x2.tolist(), m2.tolist())])
    sd = xs.std(ddof=1) if trials > 1 else 0.0
    p1 = (c1 + c1.T) / trials
    p2 = (c2 + c2.T) / trials
    return UncertaintyEstimate(
        kind, theta, n, seed,
        float(xs.mean()), float(r1.mean()), float(r2.mean()), float(sd / math.sqrt(trials)),
        ErrorProbabilities(p1, p2, trials), x1, x2, m1, m2,
    )


@dataclass(frozen=True)
class CurvePoint:
    n: int
    mean_x: float
    mean_ratio1: float
    mean_ratio2: float
    stderr: float
    trials: int


@dataclass(frozen=True)
class UncertaintyCurve:
    kind: StructureKind
    theta: float | None
    seed: int
    points: tuple[CurvePoint, ...]

    @property
    def monotone(self) -> bool:
        """True if the estimated mean X never increases along the grid."""
        xs = [p.mean_x for p in self.points]
        return all(b <= a for a, b in zip(xs, xs[1:]))


def _point(est: UncertaintyEstimate) -> CurvePoint:
    return CurvePoint(est.n, est.mean_x, est.mean_ratio1, est.mean_ratio2, est.stderr, est.trials)


def _check_grid(n_grid):
    grid = [int(x) for x in n_grid]
    if not grid:
        raise ValidationError("n grid must not be empty")
    if any(b <= a for a, b in zip(grid, grid[1:])):
        raise ValidationError("n grid must be strictly increasing")
    return grid


def uncertainty_curve(reference, kind, theta=None, *, n_grid, trials, seed, budget=None, workers=None,
                      estimates=None) -> UncertaintyCurve:
    """Estimate mean X for every ``n`` in ``n_grid``.

    If ``estimates`` is a list, the full :class:`UncertaintyEstimate` of each
    grid point is appended to it.
    """
    kind = StructureKind(kind)
    grid = _check_grid(n_grid)
    theta = theta if kind.needs_theta else None
    ref_state = _reference_state(reference.weights, kind, theta, budget)
    points = []
    for n in grid:
        est = estimate_uncertainty(reference, kind, theta, n=n, trials=trials, seed=seed, budget=budget,
                                   workers=workers, _ref_state=ref_state)
        if estimates is not None:
            estimates.append(est)
        points.append(_point(est))
    return UncertaintyCurve(kind, theta, seed, tuple(points))


@dataclass(frozen=True)
class LevelSearch:
    """Outcome of :func:`find_n_for_level`.

    ``n`` is None when no grid point qualified; ``curve`` holds every
    point evaluated, the last of which is the final estimate.
    """

    level: float
    n: int | None
    curve: UncertaintyCurve

    @property
    def reached(self) -> bool:
        return self.n is not None

    @property
    def monotone(self) -> bool:
        return self.curve.monotone

    @property
    def final(self) -> CurvePoint:
        return self.curve.points[-1]


def level_reached(point: CurvePoint, level: float) -> bool:
    """Mean X is at most ``level`` and its 95% upper bound at most ``level`` plus one standard error."""
    return point.mean_x <= level and point.mean_x + Z95 * point.stderr <= level + point.stderr


def find_n_for_level(reference, kind, theta=None, *, level, n_grid, trials, seed, budget=None,
                     workers=None) -> LevelSearch:
    """Smallest grid ``n`` at which the fraction of errors reaches ``level``.

    Grid points are evaluated in order and the search stops at the first
    qualifying one (see :func:`level_reached`).
    """
    kind = StructureKind(kind)
    if not 0 < level <= 1:
        raise ValidationError("level must lie in (0, 1]")
    grid = _check_grid(n_grid)
    theta = theta if kind.needs_theta else None
    ref_state = _reference_state(reference.weights, kind, theta, budget)
    points = []
    found = None
    for n in grid:
        est = estimate_uncertainty(reference, kind, theta, n=n, trials=trials, seed=seed, budget=budget,
                                   workers=workers, _ref_state=ref_state)
        points.append(_point(est))
        if level_reached(points[-1], level):
            found = n
            break
    return LevelSearch(level, found, UncertaintyCurve(kind, theta, seed, tuple(points)))


# --- MST hierarchy and weight distribution ----------------------------------


def _degree_block(ref_weights, n, seed, chunk):
    sampler = MVNSampler(ref_weights)
    N = ref_weights.shape[0]
    out = []
    for t in chunk:
        corr = sample_moments(sampler.draw(n, seed, t)).correlation
        out.append(degree_vector(mst_edges(corr), N))
    return out


def degree_vector_frequencies(reference: WeightedNetwork, n: int, trials: int, seed: int,
                              workers: int | None = None) -> dict[tuple[int, ...], float]:
    """Relative frequencies of sample-MST degree vectors over ``trials`` simulations.

    The mapping is ordered by frequency (descending), then degree vector.
    """
    if trials < 1:
        raise ValidationError("trials must be at least 1")
    if n < 2:
        raise ValidationError("n must be at least 2")
    blocks = _map_trials(_degree_block, (reference.weights, n, seed), trials, resolve_workers(workers))
    counts = Counter(v for b in blocks for v in b)
    return {v: c / trials for v, c in sorted(counts.items(), key=lambda kv: (-kv[1], kv[0]))}


def edge_weight_histogram(network, bin_edges) -> np.ndarray:
    """Counts of the upper-triangle weights per bin ``[lo, hi)``; the last bin is closed."""
    edges = np.asarray(bin_edges, dtype=float)
    if edges.ndim != 1 or edges.size < 2 or np.any(np.diff(edges) <= 0):
        raise ValidationError("bin edges must be a strictly increasing sequence")
    if edges[0] > -1 or edges[-1] < 1:
        raise ValidationError("bin edges must cover [-1, 1]")
    w = network.upper_weights() if isinstance(network, WeightedNetwork) else np.asarray(network)
    counts, _ = np.histogram(w, bins=edges)
    return counts


def min_observation_bound(N: int) -> float:
    """Observation count below which sample correlations are functionally dependent.

    With ``n`` days there are ``n * N`` observed values but ``N(N-1)/2``
    correlations to estimate, so ``n`` must be at least ``(N - 1) / 2``.
    """
    if N < 2:
        raise ValidationError("N must be at least 2")
    return (N - 1) / 2
