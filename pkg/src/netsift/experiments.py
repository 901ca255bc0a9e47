"""Configuration-driven experiments and their CSV/JSON outputs.

A config is one JSON document; every random draw flows from its ``seed``.
Output files are written with ``repr`` floats so that reruns are
byte-identical.
"""
from __future__ import annotations

import csv
import io
import json
import warnings
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from .cliques import CliqueSolverBudget
from .errors import ConfigError, ValidationError
from .filtration import extract
from .network import (
    NetworkKind,
    StructureKind,
    WeightedNetwork,
    build_network,
    read_matrix_csv,
    structure_to_json,
)
from .stats import (
    log_returns,
    random_factor_loadings,
    read_prices_csv,
    sample_moments,
    sample_network,
    single_factor_correlation,
)
from .uncertainty import (
    LossSpec,
    conditional_risk,
    degree_vector_frequencies,
    edge_weight_histogram,
    find_n_for_level,
    fraction_losses,
    min_observation_bound,
    uncertainty_curve,
)

EXPERIMENTS = ("extract", "curve", "n_search", "degree_freq", "histogram")
SUMMARY_NAME = "summary.json"


@dataclass(frozen=True)
class ExperimentConfig:
    reference_source: object
    experiment: str
    kind: StructureKind | None = None
    theta_grid: tuple[float, ...] = ()
    n_grid: tuple[int, ...] = ()
    trials: int = 1000
    e0: float = 0.1
    seed: int = 0
    reference_type: str = "matrix"
    losses: object = None
    budget: CliqueSolverBudget = field(default_factory=CliqueSolverBudget)
    bins: tuple[float, ...] = tuple(round(-1 + 0.1 * k, 10) for k in range(21))
    output_dir: Path = Path("out")
    base_dir: Path = Path(".")

    def validate(self) -> "ExperimentConfig":
        if self.experiment not in EXPERIMENTS:
            raise ConfigError("experiment", f"must be one of {EXPERIMENTS}")
        if not isinstance(self.seed, int) or not 0 <= self.seed < 2**64:
            raise ConfigError("seed", "must be an integer in [0, 2**64)")
        if not isinstance(self.trials, int) or self.trials < 1:
            raise ConfigError("trials", "must be a positive integer")
        if not 0 < self.e0 < 1:
            raise ConfigError("e0", "must lie in (0, 1)")
        if self.reference_type not in ("matrix", "prices"):
            raise ConfigError("reference_type", "must be 'matrix' or 'prices'")
        if any(b <= a for a, b in zip(self.theta_grid, self.theta_grid[1:])):
            raise ConfigError("theta_grid", "must be sorted ascending without duplicates")
        if any(not -1 <= t <= 1 for t in self.theta_grid):
            raise ConfigError("theta_grid", "thresholds must lie in [-1, 1]")
        if any(b <= a for a, b in zip(self.n_grid, self.n_grid[1:])):
            raise ConfigError("n_grid", "must be sorted ascending without duplicates")
        if any(n < 2 for n in self.n_grid):
            raise ConfigError("n_grid", "observation counts must be at least 2")
        if self.experiment in ("extract", "curve", "n_search"):
            if self.kind is None:
                raise ConfigError("kind", f"required for experiment {self.experiment!r}")
            if self.kind.needs_theta and not self.theta_grid:
                raise ConfigError("theta_grid", f"must be non-empty for kind {self.kind.value}")
        if self.experiment != "extract" and not self.n_grid:
            raise ConfigError("n_grid", f"must be non-empty for experiment {self.experiment!r}")
        if self.experiment == "histogram":
            b = self.bins
            if len(b) < 2 or any(y <= x for x, y in zip(b, b[1:])) or b[0] > -1 or b[-1] < 1:
                raise ConfigError("bins", "must be strictly increasing edges covering [-1, 1]")
        return self


def _get(data, key, typ, default=None, path=None):
    path = path or key
    if key not in data:
        return default
    value = data[key]
    if typ is float and isinstance(value, int) and not isinstance(value, bool):
        value = float(value)
    if not isinstance(value, typ) or isinstance(value, bool) and typ is not bool:
        raise ConfigError(path, f"expected {getattr(typ, '__name__', typ)}, got {type(value).__name__}")
    return value


def _number_list(data, key, cast):
    raw = data.get(key, [])
    if not isinstance(raw, list):
        raise ConfigError(key, "must be a list")
    out = []
    for k, v in enumerate(raw):
        if isinstance(v, bool) or not isinstance(v, (int, float)):
            raise ConfigError(f"{key}[{k}]", "must be a number")
        if cast is int and v != int(v):
            raise ConfigError(f"{key}[{k}]", "must be an integer")
        out.append(cast(v))
    return tuple(out)


def parse_config(data: dict, base_dir=".") -> ExperimentConfig:
    """Build and validate an :class:`ExperimentConfig` from a decoded JSON object."""
    if not isinstance(data, dict):
        raise ConfigError("<root>", "config must be a JSON object")
    known = {f for f in ExperimentConfig.__dataclass_fields__ if f != "base_dir"}
    for key in data:
        if key not in known:
            raise ConfigError(key, "unknown field")
    if "reference_source" not in data:
        raise ConfigError("reference_source", "required")
    if "experiment" not in data:
        raise ConfigError("experiment", "required")
    kind = _get(data, "kind", str)
    if kind is not None:
        try:
            kind = StructureKind(kind.upper())
        except ValueError:
            raise ConfigError("kind", f"unknown structure kind {kind!r}") from None
    budget = data.get("budget", {})
    if not isinstance(budget, dict):
        raise ConfigError("budget", "must be an object")
    try:
        budget = CliqueSolverBudget(
            int(_get(budget, "node_limit", int, 5_000_000, "budget.node_limit")),
            float(_get(budget, "time_limit", float, 60.0, "budget.time_limit")),
        )
    except ValidationError as exc:
        raise ConfigError("budget", str(exc)) from None
    kwargs = dict(
        reference_source=data["reference_source"],
        experiment=_get(data, "experiment", str),
        kind=kind,
        theta_grid=_number_list(data, "theta_grid", float),
        n_grid=_number_list(data, "n_grid", int),
        trials=_get(data, "trials", int, 1000),
        e0=_get(data, "e0", float, 0.1),
        seed=_get(data, "seed", int, 0),
        reference_type=_get(data, "reference_type", str, "matrix"),
        losses=data.get("losses"),
        budget=budget,
        output_dir=Path(_get(data, "output_dir", str, "out")),
        base_dir=Path(base_dir),
    )
    if "bins" in data:
        kwargs["bins"] = _number_list(data, "bins", float)
    return ExperimentConfig(**kwargs).validate()


def load_config(path) -> ExperimentConfig:
    path = Path(path)
    try:
        data = json.loads(path.read_text())
    except OSError as exc:
        raise ConfigError("<file>", f"cannot read {path}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise ConfigError("<file>", f"invalid JSON: {exc}") from None
    return parse_config(data, path.parent)


# --- data ingestion -----------------------------------------------------------


def ingest_prices(path) -> WeightedNetwork:
    """Reference network of sample correlations of log-returns from a price CSV."""
    labels, prices = read_prices_csv(path)
    if prices.shape[0] < 3:
        raise ValidationError("price CSV needs at least three price rows")
    moments = sample_moments(log_returns(prices), labels)
    return build_network(labels, moments.correlation, NetworkKind.REFERENCE)


def _labels(n):
    width = len(str(n - 1))
    return [f"S{k:0{width}d}" for k in range(n)]


def load_reference(cfg: ExperimentConfig) -> WeightedNetwork:
    src = cfg.reference_source
    if isinstance(src, dict):
        if "identity" in src:
            n = src["identity"]
            if not isinstance(n, int) or n < 2:
                raise ConfigError("reference_source.identity", "must be an integer >= 2")
            return build_network(_labels(n), np.eye(n))
        if "single_factor" in src:
            p = src["single_factor"]
            try:
                l = random_factor_loadings(int(p["n_assets"]), float(p["low"]), float(p["high"]), int(p["seed"]))
            except (KeyError, TypeError) as exc:
                raise ConfigError("reference_source.single_factor", f"missing or bad field {exc}") from None
            return build_network(_labels(len(l)), single_factor_correlation(l))
        raise ConfigError("reference_source", "object form must have 'identity' or 'single_factor'")
    if not isinstance(src, str):
        raise ConfigError("reference_source", "must be a path or a synthetic-source object")
    path = cfg.base_dir / src
    if cfg.reference_type == "prices":
        return ingest_prices(path)
    return read_matrix_csv(path)


def load_losses(cfg: ExperimentConfig, n: int):
    spec = cfg.losses
    if spec is None or spec == "fraction":
        return spec
    if isinstance(spec, str):
        try:
            spec = json.loads((cfg.base_dir / spec).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError("losses", f"cannot load loss file: {exc}") from None
    if not isinstance(spec, dict) or "a" not in spec or "b" not in spec:
        raise ConfigError("losses", "must be 'fraction', a path, or an object with matrices 'a' and 'b'")
    try:
        losses = LossSpec(np.array(spec["a"], dtype=float), np.array(spec["b"], dtype=float))
    except (ValidationError, ValueError) as exc:
        raise ConfigError("losses", str(exc)) from None
    if losses.a.shape != (n, n):
        raise ConfigError("losses", f"matrices must be {n}x{n}")
    return losses


# --- output helpers -----------------------------------------------------------


def _fmt(x):
    if x is None:
        return ""
    if isinstance(x, float):
        return repr(x)
    return str(x)


def _csv(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([_fmt(x) for x in r])
    return buf.getvalue()


def _theta_tag(theta):
    return "" if theta is None else f"_theta{theta!r}"


CURVE_HEADER = ["kind", "theta", "n", "mean_X", "mean_X1_over_M1", "mean_X2_over_M2", "stderr", "trials", "seed"]


def curve_rows(curve):
    for p in curve.points:
        yield [curve.kind.value, curve.theta, p.n, p.mean_x, p.mean_ratio1, p.mean_ratio2, p.stderr, p.trials,
               curve.seed]


def degree_vector_rows(freqs, trials):
    for vec, f in freqs.items():
        yield ["-".join(str(d) for d in vec), f, trials]


def histogram_rows(bins, counts):
    for lo, hi, c in zip(bins[:-1], bins[1:], counts):
        yield [float(lo), float(hi), int(c)]


@dataclass
class RunResult:
    output_dir: Path
    files: list[str]
    summary: dict


class _Writer:
    def __init__(self, out: Path):
        self.out = out
        self.files = []

    def text(self, name, content):
        (self.out / name).write_text(content)
        self.files.append(name)


def _thetas(cfg):
    return list(cfg.theta_grid) if cfg.kind is not None and cfg.kind.needs_theta else [None]


def _clear_previous(out: Path):
    old = out / SUMMARY_NAME
    if not old.exists():
        return
    try:
        listed = json.loads(old.read_text()).get("files", [])
    except (OSError, json.JSONDecodeError):
        return
    for name in listed:
        p = out / name
        if p.parent == out and p.is_file():
            p.unlink()


def run_config(cfg: ExperimentConfig, *, workers=None) -> RunResult:
    """Run one experiment and write its files plus ``summary.json`` to ``cfg.output_dir``.

    Files listed by an earlier summary in the same directory are removed
    first so that the new summary describes the directory exactly.
    """
    cfg.validate()
    reference = load_reference(cfg)
    N = reference.n
    out = cfg.output_dir if cfg.output_dir.is_absolute() else cfg.base_dir / cfg.output_dir
    try:
        out.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise ValidationError(f"cannot create output directory {out}: {exc.strerror}") from None
    _clear_previous(out)
    writer = _Writer(out)
    notes = []
    bound = min_observation_bound(N)
    small = [n for n in cfg.n_grid if n < bound] if cfg.experiment != "extract" else []
    if small:
        msg = f"n in {small} is below (N-1)/2 = {bound:g}; sample correlations are functionally dependent"
        warnings.warn(msg, stacklevel=2)
        notes.append(msg)
    summary = {
        "experiment": cfg.experiment,
        "kind": cfg.kind.value if cfg.kind else None,
        "seed": cfg.seed,
        "trials": cfg.trials,
        "N": N,
        "theta_grid": list(cfg.theta_grid),
        "n_grid": list(cfg.n_grid),
    }

    if cfg.experiment == "extract":
        ties = []
        for theta in _thetas(cfg):
            s = extract(reference, cfg.kind, theta, cfg.budget)
            writer.text(f"structure_{cfg.kind.value}{_theta_tag(theta)}.json", structure_to_json(s, reference.labels))
            if s.tie_broken:
                ties.append(theta)
        if ties:
            notes.append(f"lexicographic tie-break decided the {cfg.kind.value} result for theta {ties}")
        summary["tie_broken_thetas"] = ties

    elif cfg.experiment == "curve":
        losses = load_losses(cfg, N)
        rows, risk_rows = [], []
        for theta in _thetas(cfg):
            ests = []
            curve = uncertainty_curve(reference, cfg.kind, theta, n_grid=cfg.n_grid, trials=cfg.trials,
                                      seed=cfg.seed, budget=cfg.budget, workers=workers, estimates=ests)
            rows.extend(curve_rows(curve))
            if losses is not None and not cfg.kind.is_vertex_set:
                for est in ests:
                    spec = losses
                    if spec == "fraction":
                        spec = fraction_losses(cfg.kind, N, int(est.m1[0]), int(est.m2[0]))
                    risk_rows.append([cfg.kind.value, theta, est.n, conditional_risk(spec, est.probabilities),
                                      est.trials, cfg.seed])
        writer.text(f"curve_{cfg.kind.value}.csv", _csv(CURVE_HEADER, rows))
        if losses is not None:
            if cfg.kind.is_vertex_set:
                notes.append(f"conditional risk is not defined for {cfg.kind.value}; losses ignored")
            else:
                writer.text(f"risk_{cfg.kind.value}.csv",
                            _csv(["kind", "theta", "n", "risk", "trials", "seed"], risk_rows))

    elif cfg.experiment == "n_search":
        rows, curve_all, results = [], [], []
        for theta in _thetas(cfg):
            res = find_n_for_level(reference, cfg.kind, theta, level=cfg.e0, n_grid=cfg.n_grid,
                                   trials=cfg.trials, seed=cfg.seed, budget=cfg.budget, workers=workers)
            f = res.final
            rows.append([cfg.kind.value, theta, cfg.e0, res.n, res.reached, f.n, f.mean_x, f.stderr,
                         res.monotone, cfg.trials, cfg.seed])
            curve_all.extend(curve_rows(res.curve))
            results.append({"theta": theta, "n_E": res.n, "reached": res.reached, "monotone": res.monotone})
            if not res.monotone:
                notes.append(f"theta={theta}: estimated curve is not monotone over the evaluated grid")
        writer.text(f"nsearch_{cfg.kind.value}.csv", _csv(
            ["kind", "theta", "e0", "n_E", "reached", "final_n", "final_mean_X", "final_stderr", "monotone",
             "trials", "seed"], rows))
        writer.text(f"curve_{cfg.kind.value}.csv", _csv(CURVE_HEADER, curve_all))
        summary["n_search"] = results

    elif cfg.experiment == "degree_freq":
        for n in cfg.n_grid:
            freqs = degree_vector_frequencies(reference, n, cfg.trials, cfg.seed, workers=workers)
            writer.text(f"degfreq_n{n}.csv",
                        _csv(["degree_vector", "frequency", "trials"], degree_vector_rows(freqs, cfg.trials)))

    elif cfg.experiment == "histogram":
        bins = list(cfg.bins)
        writer.text("hist_reference.csv",
                    _csv(["bin_lo", "bin_hi", "count"], histogram_rows(bins, edge_weight_histogram(reference, bins))))
        for n in cfg.n_grid:
            net = sample_network(reference, n, cfg.seed, 0)
            writer.text(f"hist_n{n}.csv",
                        _csv(["bin_lo", "bin_hi", "count"], histogram_rows(bins, edge_weight_histogram(net, bins))))

    summary["warnings"] = notes
    files = sorted(writer.files + [SUMMARY_NAME])
    summary["files"] = files
    (out / SUMMARY_NAME).write_text(json.dumps(summary, indent=2) + "\n")
    return RunResult(out, files, summary)


def with_overrides(cfg: ExperimentConfig, *, seed=None, trials=None, output_dir=None) -> ExperimentConfig:
    changes = {}
    if seed is not None:
        changes["seed"] = seed
    if trials is not None:
        changes["trials"] = trials
    if output_dir is not None:
        changes["output_dir"] = Path(output_dir).resolve()
    return replace(cfg, **changes).validate()
