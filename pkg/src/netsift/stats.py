"""Returns, sample moments and multivariate normal simulation."""
from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import NotPositiveSemidefiniteError, ValidationError
from .network import NetworkKind, WeightedNetwork, build_network

# eigenvalues in (-PSD_TOL, 0] are treated as rounding noise and lifted to CLIP_TO
PSD_TOL = 1e-10
CLIP_TO = 1e-12


@dataclass(frozen=True)
class ReturnsMatrix:
    """n x N matrix of log-returns, one row per observation."""

    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        if v.ndim != 2:
            raise ValidationError("returns must be a 2-D array")
        if not np.all(np.isfinite(v)):
            raise ValidationError("returns contain non-finite values")
        object.__setattr__(self, "values", v)

    @property
    def n(self) -> int:
        return self.values.shape[0]

    @property
    def N(self) -> int:
        return self.values.shape[1]


@dataclass(frozen=True)
class SampleMoments:
    means: np.ndarray
    covariance: np.ndarray
    correlation: np.ndarray


def log_returns(prices) -> ReturnsMatrix:
    """Daily log-returns ``ln(P[t+1] / P[t])`` of an (n+1) x N price matrix."""
    p = np.asarray(prices, dtype=float)
    if p.ndim == 1:
        p = p[:, None]
    if p.shape[0] < 2:
        raise ValidationError("need at least two price rows to form a return")
    if not np.all(np.isfinite(p)) or np.any(p <= 0):
        raise ValidationError("prices must be finite and strictly positive")
    return ReturnsMatrix(np.log(p[1:] / p[:-1]))


def _correlation_from_cov(cov: np.ndarray, names=None) -> np.ndarray:
    d = np.diag(cov)
    zero = np.flatnonzero(d <= 0)
    if zero.size:
        who = [names[k] for k in zero] if names is not None else zero.tolist()
        raise ValidationError(f"zero sample variance for instrument(s) {who}; correlation undefined")
    corr = cov / np.sqrt(np.outer(d, d))
    corr = (corr + corr.T) / 2
    np.clip(corr, -1.0, 1.0, out=corr)
    np.fill_diagonal(corr, 1.0)
    return corr


def sample_moments(returns, names=None) -> SampleMoments:
    """Sample means, unbiased covariance and Pearson correlation.

    Raises ``ValidationError`` if fewer than two observations are given or if
    any column has zero variance; ``names`` is only used in that message.
    """
    x = returns.values if isinstance(returns, ReturnsMatrix) else np.asarray(returns, dtype=float)
    n = x.shape[0]
    if n < 2:
        raise ValidationError("need at least two observations for a covariance")
    means = x.mean(axis=0)
    xc = x - means
    cov = xc.T @ xc / (n - 1)
    cov = (cov + cov.T) / 2
    return SampleMoments(means, cov, _correlation_from_cov(cov, names))


def cholesky(corr) -> np.ndarray:
    """Lower-triangular ``L`` with ``L @ L.T == corr`` (to about 1e-8).

    Eigenvalues in (-1e-10, 0] are clipped to 1e-12 first so that
    correlation matrices that are singular only through rounding can still
    be factored. Anything more negative raises
    :class:`NotPositiveSemidefiniteError`.
    """
    a = np.asarray(corr, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValidationError("matrix must be square")
    if np.max(np.abs(a - a.T), initial=0.0) > 1e-12:
        raise ValidationError("matrix must be symmetric")
    try:
        return np.linalg.cholesky(a)
    except np.linalg.LinAlgError:
        pass
    vals, vecs = np.linalg.eigh(a)
    if vals[0] <= -PSD_TOL:
        raise NotPositiveSemidefiniteError(f"smallest eigenvalue {vals[0]:.3g} is below -{PSD_TOL:g}")
    vals = np.where(vals <= 0.0, CLIP_TO, vals)
    repaired = (vecs * vals) @ vecs.T
    repaired = (repaired + repaired.T) / 2
    try:
        return np.linalg.cholesky(repaired)
    except np.linalg.LinAlgError:
        raise NotPositiveSemidefiniteError("matrix could not be factored after eigenvalue clipping") from None


def trial_generator(seed: int, trial: int) -> np.random.Generator:
    """Counter-based generator keyed by ``(seed, trial)``.

    The Philox key is derived from a SeedSequence with the trial index as
    spawn key, so each trial's stream is fixed regardless of which worker
    draws it or in what order. Element ``k`` of a draw is the ``k``-th
    counter position of that stream.
    """
    ss = np.random.SeedSequence(int(seed), spawn_key=(int(trial),))
    return np.random.Generator(np.random.Philox(ss))


class MVNSampler:
    """Draws zero-mean normal samples with a fixed correlation matrix."""

    def __init__(self, corr):
        self.factor = cholesky(corr)
        self.N = self.factor.shape[0]

    def draw(self, n: int, seed: int, trial: int = 0) -> np.ndarray:
        z = trial_generator(seed, trial).standard_normal((n, self.N))
        return z @ self.factor.T


def mvn_sample(reference: WeightedNetwork, n: int, seed: int, trial: int = 0) -> ReturnsMatrix:
    """Simulate ``n`` i.i.d. observations from N(0, reference.weights)."""
    if n < 1:
        raise ValidationError("n must be positive")
    return ReturnsMatrix(MVNSampler(reference.weights).draw(n, seed, trial))


def sample_network(reference: WeightedNetwork, n: int, seed: int, trial: int = 0) -> WeightedNetwork:
    """Sample-correlation network from one simulated trial of ``n`` observations."""
    x = mvn_sample(reference, n, seed, trial)
    corr = sample_moments(x, reference.labels).correlation
    return build_network(reference.labels, corr, NetworkKind.SAMPLE)


def numerical_rank(matrix, rtol=1e-10) -> int:
    """Count singular values above ``rtol`` times the largest one."""
    s = np.linalg.svd(np.asarray(matrix, dtype=float), compute_uv=False)
    if s.size == 0 or s[0] == 0:
        return 0
    return int(np.sum(s > rtol * s[0]))


def single_factor_correlation(loadings) -> np.ndarray:
    """Correlation matrix of a one-factor model: rho_ij = l_i * l_j off the diagonal."""
    l = np.asarray(loadings, dtype=float)
    if np.any(np.abs(l) > 1):
        raise ValidationError("factor loadings must lie in [-1, 1]")
    corr = np.outer(l, l)
    np.fill_diagonal(corr, 1.0)
    return corr


def random_factor_loadings(n_assets: int, low: float, high: float, seed: int) -> np.ndarray:
    return np.random.default_rng(seed).uniform(low, high, size=n_assets)


def read_prices_csv(path) -> tuple[list[str], np.ndarray]:
    """Read a price CSV: header of labels, then one row of prices per day.

    A leading ``date`` column is dropped if present.
    """
    rows = [r for r in csv.reader(io.StringIO(Path(path).read_text())) if any(c.strip() for c in r)]
    if not rows:
        raise ValidationError("price CSV is empty")
    header = [c.strip() for c in rows[0]]
    skip = 1 if header and header[0].lower() in ("date", "") else 0
    labels = header[skip:]
    prices = []
    for k, row in enumerate(rows[1:]):
        if len(row) != len(header):
            raise ValidationError(f"row {k + 2}: expected {len(header)} cells, got {len(row)}")
        try:
            prices.append([float(c) for c in row[skip:]])
        except ValueError as exc:
            raise ValidationError(f"row {k + 2}: {exc}") from None
    return labels, np.array(prices, dtype=float).reshape(len(prices), len(labels))
