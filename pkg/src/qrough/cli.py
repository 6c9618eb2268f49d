"""Batch experiment runner.

Usage examples:

  # one algorithm, metrics + history + serialized model into ./out
  qrough run --algorithm qforest --data runs.csv --seed 42 --out out

  # all three on the same split, ranked comparison table
  qrough compare --algorithms qnn vqc qforest --data runs.csv --out out

With no --data flag the bundled 30-run dataset is used. Outputs are
deterministic for fixed flags: metrics.json (config echo + train/test
metrics), history.csv (iteration,cost,train_evs; gradient-trained models
only), model.json, and for compare additionally comparison.json and an
aligned plain-text table. Files are written to a temp name and renamed,
so partially written outputs never appear.

Exit codes: 0 success, 1 bad flags, 2 dataset errors, 3 training divergence.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import dataclass, asdict, replace
from pathlib import Path

from . import dataset as ds
from . import qforest
from . import variational
from .metrics import MetricsReport

ALGORITHMS = ("qnn", "vqc", "qforest")

EXIT_OK = 0
EXIT_BAD_FLAGS = 1
EXIT_DATASET = 2
EXIT_DIVERGED = 3


@dataclass(frozen=True)
class RunConfig:
    algorithm: str
    data: str
    test_fraction: float = 0.2
    seed: int = 42
    layers: int = 2
    iterations: int = 100
    learning_rate: float = 0.1
    num_trees: int = 25
    max_depth: int = 4
    min_leaf: int = 2
    bootstrap: bool = True
    out: str = "out"

    def __post_init__(self):
        if self.algorithm not in ALGORITHMS:
            raise ValueError(f"algorithm must be one of {ALGORITHMS}")
        if not 0 < self.test_fraction < 1:
            raise ValueError("test-fraction must be in (0, 1)")
        # hyperparameter bounds are enforced by the model configs
        variational.TrainConfig(self.layers, self.iterations, self.learning_rate, self.seed)
        qforest.ForestConfig(self.num_trees, self.max_depth, self.min_leaf, self.bootstrap, self.seed)


def _write_atomic(path: Path, text: str) -> None:
    tmp = path.with_name(path.name + ".tmp")
    tmp.write_text(text, encoding="utf-8")
    os.replace(tmp, path)


def _write_json(path: Path, payload: dict) -> None:
    _write_atomic(path, json.dumps(payload, indent=2) + "\n")


def _write_history(path: Path, history: variational.TrainingHistory) -> None:
    lines = ["iteration,cost,train_evs"]
    lines += [f"{r.iteration},{r.cost!r},{r.train_evs!r}" for r in history.records]
    _write_atomic(path, "\n".join(lines) + "\n")


def run(config: RunConfig) -> dict:
    """Load, split, train, evaluate; write the run artifacts; return the metrics payload."""
    out_dir = Path(config.out)
    out_dir.mkdir(parents=True, exist_ok=True)

    samples = ds.load_csv(config.data)
    train_samples, test_samples = ds.split(samples, config.test_fraction, config.seed)
    train_set = ds.encode_samples(train_samples)
    test_set = ds.encode_samples(test_samples)

    history = None
    if config.algorithm == "qforest":
        forest_config = qforest.ForestConfig(
            config.num_trees, config.max_depth, config.min_leaf, config.bootstrap, config.seed
        )
        forest = qforest.fit_forest(train_set.features, train_set.targets, forest_config)
        predict = forest.predict
        model_dict = qforest.forest_to_dict(forest)
    else:
        train_config = variational.TrainConfig(
            config.layers, config.iterations, config.learning_rate, config.seed
        )
        model, history = variational.train(
            config.algorithm, train_set.features, train_set.targets, train_config
        )
        predict = model.predict
        model_dict = model.to_dict()

    payload = {
        "algorithm": config.algorithm,
        "seed": config.seed,
        "config": asdict(config),
        "train": MetricsReport.compute(train_set.targets, predict(train_set.features)).to_dict(),
        "test": MetricsReport.compute(test_set.targets, predict(test_set.features)).to_dict(),
    }

    _write_json(out_dir / "model.json", model_dict)
    if history is not None:
        _write_history(out_dir / "history.csv", history)
    _write_json(out_dir / "metrics.json", payload)
    return payload


def _format_table(results: list[dict]) -> str:
    headers = ("algorithm", "mse", "mae", "evs")
    rows = [
        (r["algorithm"], f"{r['test']['mse']:.6f}", f"{r['test']['mae']:.6f}", f"{r['test']['evs']:.6f}")
        for r in results
    ]
    widths = [max(len(h), *(len(row[i]) for row in rows)) for i, h in enumerate(headers)]
    lines = [
        "  ".join(h.ljust(widths[i]) for i, h in enumerate(headers)),
        "  ".join("-" * w for w in widths),
    ]
    lines += ["  ".join(cell.ljust(widths[i]) for i, cell in enumerate(row)) for row in rows]
    return "\n".join(lines) + "\n"


def compare(configs: list[RunConfig], out_dir) -> dict:
    """Run each config on the identical split and rank them by test MSE."""
    if len(configs) < 2:
        raise ValueError("compare needs at least 2 run configs")
    shared = {(c.data, c.test_fraction, c.seed) for c in configs}
    if len(shared) != 1:
        raise ValueError("compare requires identical data, test-fraction, and seed across configs")

    out_dir = Path(out_dir)
    results = [run(c) for c in configs]
    results.sort(key=lambda r: r["test"]["mse"])

    payload = {
        "data": configs[0].data,
        "test_fraction": configs[0].test_fraction,
        "seed": configs[0].seed,
        "results": results,
    }
    _write_json(out_dir / "comparison.json", payload)
    _write_atomic(out_dir / "comparison.txt", _format_table(results))
    return payload


class _Parser(argparse.ArgumentParser):
    # argparse exits 2 on bad flags by default; 2 is reserved for dataset errors here
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_BAD_FLAGS)


def _add_shared_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--data", default=str(ds.bundled_data_path()),
                        help="dataset CSV (default: bundled 30-run data)")
    parser.add_argument("--test-fraction", type=float, default=0.2)
    parser.add_argument("--seed", type=int, default=42)
    parser.add_argument("--layers", type=int, default=2)
    parser.add_argument("--iterations", type=int, default=100)
    parser.add_argument("--learning-rate", type=float, default=0.1)
    parser.add_argument("--num-trees", type=int, default=25)
    parser.add_argument("--max-depth", type=int, default=4)
    parser.add_argument("--min-leaf", type=int, default=2)
    parser.add_argument("--bootstrap", choices=("true", "false"), default="true")
    parser.add_argument("--out", default="out", help="output directory")


def _config_from_args(args, algorithm: str) -> RunConfig:
    return RunConfig(
        algorithm=algorithm,
        data=args.data,
        test_fraction=args.test_fraction,
        seed=args.seed,
        layers=args.layers,
        iterations=args.iterations,
        learning_rate=args.learning_rate,
        num_trees=args.num_trees,
        max_depth=args.max_depth,
        min_leaf=args.min_leaf,
        bootstrap=args.bootstrap == "true",
        out=args.out,
    )


def main(argv=None) -> int:
    parser = _Parser(prog="qrough", description=__doc__,
                     formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = parser.add_subparsers(dest="command", required=True)

    run_parser = sub.add_parser("run", help="train and evaluate one algorithm")
    run_parser.add_argument("--algorithm", choices=ALGORITHMS, required=True)
    _add_shared_flags(run_parser)

    cmp_parser = sub.add_parser("compare", help="run several algorithms on one split")
    cmp_parser.add_argument("--algorithms", nargs="+", choices=ALGORITHMS, required=True)
    _add_shared_flags(cmp_parser)

    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)

    try:
        if args.command == "run":
            config = _config_from_args(args, args.algorithm)
            payload = run(config)
            print(json.dumps(payload["test"], indent=2))
        else:
            if len(args.algorithms) < 2 or len(set(args.algorithms)) != len(args.algorithms):
                print("qrough: error: compare needs at least 2 distinct algorithms",
                      file=sys.stderr)
                return EXIT_BAD_FLAGS
            base = Path(args.out)
            configs = [
                replace(_config_from_args(args, algo), out=str(base / algo))
                for algo in args.algorithms
            ]
            compare(configs, base)
            print((base / "comparison.txt").read_text(), end="")
    except ValueError as exc:
        # config validation that argparse types cannot express
        if isinstance(exc, ds.DatasetError):
            print(f"qrough: dataset error: {exc}", file=sys.stderr)
            return EXIT_DATASET
        print(f"qrough: error: {exc}", file=sys.stderr)
        return EXIT_BAD_FLAGS
    except FileNotFoundError as exc:
        print(f"qrough: dataset error: {exc}", file=sys.stderr)
        return EXIT_DATASET
    except variational.TrainingDivergedError as exc:
        print(f"qrough: training diverged: {exc}", file=sys.stderr)
        return EXIT_DIVERGED
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
