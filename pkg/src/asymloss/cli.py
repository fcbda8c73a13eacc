"""Command-line front end.

Subcommands: fit, predict, evaluate, weights, simulate, pretrial, selfcheck.
Every run writes a manifest.json recording the resolved configuration, the
seed, and sha256 digests of the inputs; re-running the same invocation
reproduces the outputs byte for byte. Exit codes: 2 configuration error,
3 data error, 4 loss-assumption violation.
"""

from __future__ import annotations

import argparse
import dataclasses
import hashlib
import json
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .data import load_csv
from .errors import AssumptionViolation, ConfigError, DataError
from .losses import CELLS, attach_weights, quartet_from_spec
from .metrics import evaluate as evaluate_model
from .models import NeuralNet, load_model, predict_soft, save_model
from .pretrial import (
    TABLE3_ROWS,
    CostBenefitTables,
    export_cost_tables,
    ingest_roster,
    run_empirical,
)
from .simlab import (
    SimConfig,
    run_comparison,
    run_equalization_sweep,
    run_error_comparison,
    run_plugin_comparison,
)
from .tables import comparison_csv_rows, write_csv, write_json
from .train import TrainConfig, fit_boosting, fit_lasso, fit_linear, fit_network

FAMILY_ALIASES = {
    "logit": "linear",
    "linear": "linear",
    "lasso": "lasso",
    "boosting": "stumps",
    "stumps": "stumps",
    "shallow": "shallow",
    "deep": "deep",
}

_TRAIN_FLAGS = (
    ("max_iterations", int),
    ("tolerance", float),
    ("learning_rate", float),
    ("epochs", int),
    ("batch_size", int),
    ("rounds", int),
    ("shrinkage", float),
    ("degree", int),
    ("cv_folds", int),
    ("hidden_width", int),
    ("hidden_layers", int),
)


def _sha256(path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(65536), b""):
            h.update(chunk)
    return h.hexdigest()


def _write_manifest(out_dir: Path, subcommand: str, config: dict, seed, inputs, outputs):
    manifest = {
        "subcommand": subcommand,
        "config": config,
        "seed": seed,
        "inputs": {str(p): _sha256(p) for p in inputs},
        "tool_version": __version__,
        "outputs": [str(p) for p in outputs],
    }
    write_json(out_dir / "manifest.json", manifest)


def _train_config(args) -> TrainConfig:
    kwargs = {"convexifier": args.convexifier, "seed": args.seed}
    for name, _ in _TRAIN_FLAGS:
        val = getattr(args, name, None)
        if val is not None:
            kwargs[name] = val
    return TrainConfig(**kwargs)


def _load_data_for_loss(args, spec_path):
    with open(spec_path) as fh:
        try:
            spec = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"{spec_path}: invalid JSON ({exc})")
    extra_cols = None
    if spec.get("type") == "tabular":
        extra_cols = [spec["columns"][c] for c in CELLS if c in spec.get("columns", {})]
    if spec.get("type") == "pretrial":
        extra_cols = ["crime", "detention_days"]
    data = load_csv(args.data, extra_cols=extra_cols)
    return data, quartet_from_spec(spec)


def cmd_fit(args) -> int:
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    data, quartet = _load_data_for_loss(args, args.loss)
    config = _train_config(args)
    wdata = attach_weights(quartet, data)
    family = FAMILY_ALIASES.get(args.model)
    if family is None:
        raise ConfigError(f"unknown model family {args.model!r}")
    if family == "linear":
        result = fit_linear(wdata, config)
    elif family == "lasso":
        result = fit_lasso(wdata, config)
    elif family == "stumps":
        result = fit_boosting(wdata, config)
    else:
        result = fit_network(wdata, config, family=family)
    model_path = out_dir / "model.json"
    metrics_path = out_dir / "metrics.json"
    save_model(result.model, model_path)
    write_json(metrics_path, evaluate_model(result.model, data, quartet).to_dict())
    _write_manifest(
        out_dir,
        "fit",
        {"model": args.model, **dataclasses.asdict(config)},
        args.seed,
        [args.data, args.loss],
        [model_path, metrics_path],
    )
    return 0


def cmd_predict(args) -> int:
    data, quartet = _load_data_for_loss(args, args.loss)
    model = load_model(args.model)
    wdata = attach_weights(quartet, data)
    c = wdata.c if isinstance(model, NeuralNet) else None
    scores = predict_soft(model, data.X, c=c)
    decisions = np.where(scores >= 0, 1, -1)
    rows = [
        {
            "row_id": i,
            "soft_score": float(scores[i]),
            "decision": int(decisions[i]),
            "threshold_c": float(wdata.c[i]),
            "weight_omega": float(wdata.omega[i]),
        }
        for i in range(data.n)
    ]
    out = Path(args.out)
    write_csv(out, ["row_id", "soft_score", "decision", "threshold_c", "weight_omega"], rows)
    _write_manifest(
        out.parent, "predict", {"model": str(args.model)}, None,
        [args.data, args.loss, args.model], [out],
    )
    return 0


def cmd_evaluate(args) -> int:
    data, quartet = _load_data_for_loss(args, args.loss)
    model = load_model(args.model)
    out = Path(args.out)
    write_json(out, evaluate_model(model, data, quartet).to_dict())
    _write_manifest(
        out.parent, "evaluate", {"model": str(args.model)}, None,
        [args.data, args.loss, args.model], [out],
    )
    return 0


def cmd_weights(args) -> int:
    data, quartet = _load_data_for_loss(args, args.loss)
    wdata = attach_weights(quartet, data)
    rows = [
        {"row_id": i, "weight_omega": float(wdata.omega[i]), "threshold_c": float(wdata.c[i])}
        for i in range(data.n)
    ]
    out = Path(args.out)
    write_csv(out, ["row_id", "weight_omega", "threshold_c"], rows)
    _write_manifest(out.parent, "weights", {}, None, [args.data, args.loss], [out])
    return 0


def _sim_config(args) -> SimConfig:
    payload = {}
    if args.config:
        with open(args.config) as fh:
            try:
                payload = json.load(fh)
            except json.JSONDecodeError as exc:
                raise ConfigError(f"{args.config}: invalid JSON ({exc})")
    train_payload = payload.pop("train", {})
    known = {f.name for f in dataclasses.fields(SimConfig)}
    unknown = set(payload) - known
    if unknown:
        raise ConfigError(f"unknown simulate config fields {sorted(unknown)}")
    known_train = {f.name for f in dataclasses.fields(TrainConfig)}
    unknown = set(train_payload) - known_train
    if unknown:
        raise ConfigError(f"unknown train config fields {sorted(unknown)}")
    if "gamma" in payload and payload["gamma"] is not None:
        payload["gamma"] = tuple(payload["gamma"])
    if "lasso_lambdas" in train_payload and train_payload["lasso_lambdas"] is not None:
        train_payload["lasso_lambdas"] = tuple(train_payload["lasso_lambdas"])
    config = SimConfig(train=TrainConfig(**train_payload), **payload)
    if args.reps is not None:
        config = dataclasses.replace(config, replications=args.reps)
    config = dataclasses.replace(config, seed=args.seed)
    return config


def _parse_sweep(text: str):
    try:
        param, lo, hi, step = text.split(":")
        lo, hi, step = float(lo), float(hi), float(step)
    except ValueError:
        raise ConfigError(f"--sweep expects param:lo:hi:step, got {text!r}")
    if step <= 0 or hi < lo:
        raise ConfigError("--sweep needs step > 0 and hi >= lo")
    grid = np.arange(lo, hi + step / 2, step)
    return param, [float(v) for v in grid]


def cmd_simulate(args) -> int:
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    config = _sim_config(args)
    config_doc = dataclasses.asdict(config)
    outputs = []
    if args.sweep:
        param, grid = _parse_sweep(args.sweep)
        rows = run_equalization_sweep(config, param, grid, jobs=args.jobs)
        sweep_path = out_dir / "sweep.csv"
        write_csv(sweep_path, ["param", "value", "fp0", "fp1", "fn0", "fn1"], rows)
        outputs.append(sweep_path)
    else:
        if args.mode == "cost":
            rows, summary = run_comparison(config, jobs=args.jobs)
        elif args.mode == "plugin":
            rows, summary = run_plugin_comparison(config, jobs=args.jobs)
        elif args.mode == "errors":
            families = [FAMILY_ALIASES[f] for f in args.families.split(",")]
            rows, summary = run_error_comparison(config, families=families, jobs=args.jobs)
        else:
            raise ConfigError(f"unknown simulate mode {args.mode!r}")
        reps_path = out_dir / "replications.csv"
        header = list(rows[0].keys())
        write_csv(reps_path, header, rows)
        summary_path = out_dir / "summary.json"
        write_json(summary_path, summary)
        outputs += [reps_path, summary_path]
    _write_manifest(
        out_dir, "simulate", {**config_doc, "mode": args.mode, "sweep": args.sweep},
        args.seed, [args.config] if args.config else [], outputs,
    )
    return 0


def cmd_pretrial(args) -> int:
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    with open(args.schema) as fh:
        try:
            schema = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"{args.schema}: invalid JSON ({exc})")
    roster = ingest_roster(args.data, schema)
    families = [FAMILY_ALIASES[f] for f in args.families.split(",") if f]
    config = _train_config(args)
    columns = run_empirical(roster, families, config, seed=args.seed)
    header, rows = comparison_csv_rows(columns, TABLE3_ROWS)
    out = out_dir / "comparison.csv"
    write_csv(out, header, rows)
    tables_path = out_dir / "cost_tables.json"
    export_cost_tables(CostBenefitTables(), tables_path)
    _write_manifest(
        out_dir, "pretrial",
        {"families": args.families, **dataclasses.asdict(config)},
        args.seed, [args.data, args.schema], [out, tables_path],
    )
    return 0


def cmd_selfcheck(args) -> int:
    """Assert CLI flag defaults match the dataclass defaults (single source)."""
    parser = build_parser()
    subparsers = next(
        a for a in parser._actions if isinstance(a, argparse._SubParsersAction)
    )
    problems = []
    train_defaults = TrainConfig()
    train_fields = {f.name for f in dataclasses.fields(TrainConfig)}
    for cmd in ("fit", "pretrial"):
        for action in subparsers.choices[cmd]._actions:
            name = action.dest
            if name in train_fields and action.default is not None:
                if action.default != getattr(train_defaults, name):
                    problems.append(
                        f"{cmd} --{name} default {action.default!r} != "
                        f"TrainConfig.{name} {getattr(train_defaults, name)!r}"
                    )
    if SimConfig().train != train_defaults:
        problems.append("SimConfig.train defaults diverge from TrainConfig()")
    if problems:
        for p in problems:
            print(f"selfcheck: {p}", file=sys.stderr)
        return 2
    print("selfcheck: CLI defaults match config defaults")
    return 0


def _add_train_flags(sub):
    sub.add_argument("--convexifier", default=TrainConfig().convexifier,
                     choices=("logistic", "exponential", "hinge"))
    sub.add_argument("--seed", type=int, default=0)
    for name, typ in _TRAIN_FLAGS:
        sub.add_argument(f"--{name.replace('_', '-')}", dest=name, type=typ, default=None)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="asymloss",
        description="Binary decisions under covariate-driven asymmetric losses.",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="subcommand", required=True)

    p = sub.add_parser("fit", help="train a weighted convexified ERM model")
    p.add_argument("--data", required=True)
    p.add_argument("--loss", required=True, help="loss specification JSON")
    p.add_argument("--model", required=True, help="logit|lasso|boosting|shallow|deep")
    p.add_argument("--out-dir", default=".")
    _add_train_flags(p)
    p.set_defaults(func=cmd_fit)

    p = sub.add_parser("predict", help="score a dataset with a trained model")
    p.add_argument("--model", required=True)
    p.add_argument("--data", required=True)
    p.add_argument("--loss", required=True)
    p.add_argument("--out", default="predictions.csv")
    p.set_defaults(func=cmd_predict)

    p = sub.add_parser("evaluate", help="metrics report for a trained model")
    p.add_argument("--model", required=True)
    p.add_argument("--data", required=True)
    p.add_argument("--loss", required=True)
    p.add_argument("--out", default="metrics.json")
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("weights", help="per-row weights and thresholds")
    p.add_argument("--data", required=True)
    p.add_argument("--loss", required=True)
    p.add_argument("--out", default="weights.csv")
    p.set_defaults(func=cmd_weights)

    p = sub.add_parser("simulate", help="Monte Carlo replication experiments")
    p.add_argument("--config", default=None, help="SimConfig JSON")
    p.add_argument("--reps", type=int, default=None)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--mode", default="cost", choices=("cost", "plugin", "errors"))
    p.add_argument("--families", default="logit,deep", help="for --mode errors")
    p.add_argument("--sweep", default=None, help="param:lo:hi:step (phi0/psi0/...)")
    p.add_argument("--out-dir", default=".")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("pretrial", help="Table-3-shaped empirical comparison")
    p.add_argument("--data", required=True, help="roster CSV")
    p.add_argument("--schema", required=True, help="column map JSON")
    p.add_argument("--families", default="logit")
    p.add_argument("--out-dir", default=".")
    _add_train_flags(p)
    p.set_defaults(func=cmd_pretrial)

    p = sub.add_parser("selfcheck", help="verify CLI defaults match config defaults")
    p.set_defaults(func=cmd_selfcheck)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2
    except AssumptionViolation as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 4
    except DataError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 3
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
