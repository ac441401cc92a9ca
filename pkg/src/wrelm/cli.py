"""Command-line entry point: ``wrelm gen|train|eval|verify|bench``.

Exit codes: 0 success, 2 validation error, 3 numeric failure, 4 I/O error.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

import numpy as np

from .bench import bench_latency, synthetic_model
from .dataset import DatasetFormatError, read_csv, write_csv
from .elm import DegenerateColumnError
from .evaluate import THREADS_ENV, audit_causality, default_threads, evaluate, write_trace
from .synthgen import GenConfig, generate
from .trainer import ModelFormatError, TrainConfig, load_model, save_model, train_offline
from .verify import run_battery

EXIT_OK, EXIT_VALIDATION, EXIT_NUMERIC, EXIT_IO = 0, 2, 3, 4

log = logging.getLogger("wrelm")


class UsageError(ValueError):
    pass


def _pair(text: str, kind=float) -> tuple:
    try:
        a, b = text.split(":")
        return kind(a), kind(b)
    except ValueError:
        raise UsageError(f"expected LOW:HIGH, got {text!r}") from None


def _emit(obj) -> None:
    print(json.dumps(obj, indent=2, sort_keys=True))


def cmd_gen(args) -> int:
    mu_min, mu_max = _pair(args.mu)
    dwell_min, dwell_max = _pair(args.dwell, int)
    cfg = GenConfig(
        seed=args.seed,
        n_steps=args.steps,
        mu_min=mu_min,
        mu_max=mu_max,
        dwell_min=dwell_min,
        dwell_max=dwell_max,
        noise=args.noise,
        n_distractors=args.distractors,
        invalid_fraction=args.invalid_fraction,
    )
    ds = generate(cfg)
    write_csv(ds, args.output)
    changes = int(np.count_nonzero(np.diff(ds.set_point))) if len(ds) else 0
    _emit({"rows": len(ds), "set_point_changes": changes, "z": ds.z, "output": str(args.output)})
    return EXIT_OK


def cmd_train(args) -> int:
    ds = read_csv(args.dataset)
    cfg = TrainConfig(
        seed=args.seed,
        n_neurons=args.neurons,
        w0=args.w0,
        p_low=args.p_low,
        p_high=args.p_high,
        activation=args.activation,
        svd_tolerance=args.svd_tolerance,
        prune=_pair(args.prune, int) if args.prune else None,
        saturate_online=args.saturate_online,
    )
    model = train_offline(ds, cfg)
    save_model(model, args.output)

    train_rows = ds.subset(ds.valid)
    fitted = model.predict_static(train_rows.features) if args.prune is None else None
    sv = model.gram_singular_values
    kept = sv > cfg.svd_tolerance * sv[0]
    out = {
        "output": str(args.output),
        "training_rows": model.n_train,
        "neurons": model.n_neurons,
        "z": model.z,
        "gram_condition": float(sv[0] / sv[kept][-1]),
        "gram_rank": int(kept.sum()),
    }
    if fitted is not None:
        out["training_rmse"] = float(np.sqrt(np.mean((fitted - train_rows.target) ** 2)))
    _emit(out)
    return EXIT_OK


def cmd_eval(args) -> int:
    model = load_model(args.model)
    datasets = {}
    for path in args.datasets:
        name = Path(path).stem
        if name in datasets:
            name = str(path)
        datasets[name] = read_csv(path)
    for name, ds in datasets.items():
        if ds.z != model.z:
            raise UsageError(f"{name}: dataset has {ds.z} features, model expects {model.z}")
    report = evaluate(model, datasets, args.ring, not args.static, threads=args.threads)
    summary = report.summary()
    violations = []
    for s in report.streams:
        violations += audit_causality(s.events)
    summary["causality_violations"] = len(violations)
    if args.trace:
        trace = Path(args.trace)
        for s in report.streams:
            path = trace if len(report.streams) == 1 else trace.with_name(f"{trace.stem}_{s.name}{trace.suffix}")
            write_trace(s, path)
    _emit(summary)
    return EXIT_NUMERIC if violations else EXIT_OK


def cmd_verify(args) -> int:
    report = run_battery(
        args.instances,
        seed=args.seed,
        fault=1e-6 if args.inject_fault else 0.0,
    )
    _emit(
        {
            "instances": report.instances,
            "tolerance": report.tolerance,
            "max_rel_err_offline": report.max_offline_error,
            "max_rel_err_online": report.max_online_error,
            "failures": report.failures,
            "passed": report.passed,
        }
    )
    return EXIT_OK if report.passed else EXIT_NUMERIC


def cmd_bench(args) -> int:
    if args.model:
        model = load_model(args.model)
    else:
        model = synthetic_model(args.neurons, args.z)
    report = bench_latency(model, args.ring, args.iterations)
    _emit(report.summary())
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="wrelm", description="Weighted ring ELM toolkit")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", help="generate a synthetic logistic-map dataset")
    p.add_argument("-o", "--output", default="dataset.csv")
    p.add_argument("--seed", type=int, default=1)
    p.add_argument("--steps", type=int, default=1000)
    p.add_argument("--mu", default="2.8:3.9", help="map parameter range LOW:HIGH")
    p.add_argument("--dwell", default="10:200", help="set-point dwell range in steps")
    p.add_argument("--noise", type=float, default=0.0, help="observation noise std")
    p.add_argument("--distractors", type=int, default=4)
    p.add_argument("--invalid-fraction", type=float, default=0.0)
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("train", help="offline training")
    p.add_argument("dataset")
    p.add_argument("-o", "--output", default="model.wrelm")
    p.add_argument("--seed", type=int, default=TrainConfig.seed)
    p.add_argument("--neurons", type=int, default=TrainConfig.n_neurons)
    p.add_argument("--w0", type=float, default=TrainConfig.w0)
    p.add_argument("--p-low", type=float, default=TrainConfig.p_low)
    p.add_argument("--p-high", type=float, default=TrainConfig.p_high)
    p.add_argument("--activation", choices=("pade", "exact"), default=TrainConfig.activation)
    p.add_argument("--svd-tolerance", type=float, default=TrainConfig.svd_tolerance)
    p.add_argument("--prune", help="keep BEFORE:AFTER rows around set-point steps")
    p.add_argument("--saturate-online", action="store_true", help="clamp online samples to training bounds")
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("eval", help="causal streaming evaluation")
    p.add_argument("model")
    p.add_argument("datasets", nargs="+")
    p.add_argument("--ring", type=int, default=8)
    mode = p.add_mutually_exclusive_group()
    mode.add_argument("--adaptive", action="store_true", default=True)
    mode.add_argument("--static", action="store_true")
    p.add_argument("--trace", help="per-step trace CSV path")
    p.add_argument("--threads", type=int, default=None, help=f"worker threads (default ${THREADS_ENV} or 1)")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("verify", help="randomized oracle-equivalence battery")
    p.add_argument("--instances", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--inject-fault", action="store_true", help="perturb beta1 by 1e-6 (relative)")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("bench", help="latency of push + adapt + predict")
    p.add_argument("--model")
    p.add_argument("--neurons", type=int, default=64)
    p.add_argument("--ring", type=int, default=8)
    p.add_argument("--z", type=int, default=6)
    p.add_argument("--iterations", type=int, default=100_000)
    p.set_defaults(func=cmd_bench)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    if getattr(args, "threads", None) is None and args.command == "eval":
        args.threads = default_threads()
    try:
        return args.func(args)
    except (OSError, ModelFormatError) as exc:
        return _fail(exc, EXIT_IO)
    except (UsageError, DatasetFormatError, DegenerateColumnError, ValueError) as exc:
        return _fail(exc, EXIT_VALIDATION)
    except (FloatingPointError, np.linalg.LinAlgError) as exc:
        return _fail(exc, EXIT_NUMERIC)


def _fail(exc: Exception, code: int) -> int:
    print(f"error: {exc}", file=sys.stderr)
    return code


if __name__ == "__main__":
    sys.exit(main())
