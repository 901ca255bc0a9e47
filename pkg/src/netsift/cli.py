"""Command-line entry point.

Exit codes: 0 success, 1 config error, 2 data error, 3 solver budget exhausted.
"""
from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .cliques import CliqueSolverBudget
from .errors import ConfigError, NetsiftError, SolverBudgetExceeded, ValidationError
from .experiments import load_config, run_config, with_overrides
from .filtration import extract
from .network import read_matrix_csv, structure_to_json

EXIT_OK, EXIT_CONFIG, EXIT_DATA, EXIT_BUDGET = 0, 1, 2, 3

# subcommand -> config "experiment" value
EXPERIMENT_COMMANDS = {
    "extract": "extract",
    "curve": "curve",
    "nsearch": "n_search",
    "degfreq": "degree_freq",
    "hist": "histogram",
}
STRUCTURE_COMMANDS = {"mst": "MST", "pmfg": "PMFG", "mg": "MG", "mcmw": "MCMW", "mismw": "MISMW"}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="netsift", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for name in EXPERIMENT_COMMANDS:
        p = sub.add_parser(name, help=f"run a {EXPERIMENT_COMMANDS[name]} experiment from a JSON config")
        p.add_argument("--config", required=True, type=Path)
        p.add_argument("--seed", type=int)
        p.add_argument("--trials", type=int)
        p.add_argument("--out", type=Path, help="output directory (overrides output_dir)")
    for name, kind in STRUCTURE_COMMANDS.items():
        p = sub.add_parser(name, help=f"extract the {kind} of a matrix CSV and print it as JSON")
        p.add_argument("matrix", type=Path)
        if kind in ("MG", "MCMW", "MISMW"):
            p.add_argument("--theta", type=float, required=True)
        if kind in ("MCMW", "MISMW"):
            p.add_argument("--node-limit", type=int, default=5_000_000)
            p.add_argument("--time-limit", type=float, default=60.0)
        p.add_argument("--out", type=Path, help="write JSON here instead of stdout")
    return parser


def _run_experiment(args) -> int:
    cfg = load_config(args.config)
    wanted = EXPERIMENT_COMMANDS[args.command]
    if cfg.experiment != wanted:
        raise ConfigError("experiment", f"config is a {cfg.experiment!r} experiment, not {wanted!r}")
    cfg = with_overrides(cfg, seed=args.seed, trials=args.trials, output_dir=args.out)
    result = run_config(cfg)
    for w in result.summary["warnings"]:
        print(f"warning: {w}", file=sys.stderr)
    print(result.output_dir / "summary.json")
    return EXIT_OK


def _run_structure(args) -> int:
    kind = STRUCTURE_COMMANDS[args.command]
    network = read_matrix_csv(args.matrix)
    budget = None
    if hasattr(args, "node_limit"):
        budget = CliqueSolverBudget(args.node_limit, args.time_limit)
    s = extract(network, kind, getattr(args, "theta", None), budget)
    text = structure_to_json(s, network.labels)
    if args.out:
        args.out.write_text(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command in EXPERIMENT_COMMANDS:
            return _run_experiment(args)
        return _run_structure(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except SolverBudgetExceeded as exc:
        print(f"solver budget exhausted: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except (ValidationError, OSError) as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except NetsiftError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
