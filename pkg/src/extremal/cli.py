"""Command-line front end: generate, train, extremize, reproduce, plot.

Every command is deterministic for fixed flags and input files, and every
JSON report embeds the fully resolved run manifest so any stage can be
re-run from its output alone. Exit codes: 0 success, 1 usage or
configuration error, 2 numeric failure (including reproduction bands not
met), 3 file I/O or format error.

Flag precedence: built-in defaults < values from --config <json file> <
explicit flags. The EXTREMAL_OUT_DIR environment variable, when set,
prefixes relative output paths.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import asdict
from pathlib import Path

from . import __version__, casestudy, data as data_mod, plotting
from .descent import ExtremalConfig, InitStrategy, multi_start
from .errors import ConfigError, ExtremalError, FormatError, NumericError
from .losses import load_constraints
from .nnet import MODEL_FORMAT_VERSION, init_network, load_model, save_model
from .optim import TrainConfig, freeze, train

REPORT_FORMAT_VERSION = 1

_DEFAULTS: dict[str, dict] = {
    "generate": {
        "n": 1000, "seed": 0, "noise_std": 0.05, "lo": -1.0, "hi": 1.0,
        "out": "data.csv",
    },
    "train": {
        "data": None, "out": "model.json", "report": None, "seed": 0,
        "hidden": "64,64", "activation": "tanh", "epochs": 500,
        "batch_size": "32", "learning_rate": 1e-3, "optimizer": "adam",
        "validation_fraction": 0.2,
    },
    "extremize": {
        "model": None, "data": None, "constraints": None, "out": "result.json",
        "trajectory": None, "restarts": 1, "seed": 0, "alpha": 0.01,
        "max_iters": 20000, "grad_tol": 1e-6, "init": "normal",
        "init_lo": -1.0, "init_hi": 1.0, "init_mean": 0.0, "init_std": 0.5,
        "input_optimizer": "gd",
    },
    "reproduce": {
        "seeds": 1, "seed": 0, "restarts": 8, "quick": False, "out": None,
    },
    "plot": {
        "data": None, "model": None, "train_report": None, "out_dir": "plots",
    },
}


def _out_path(p: str) -> str:
    base = os.environ.get("EXTREMAL_OUT_DIR")
    if base and not os.path.isabs(p):
        return os.path.join(base, p)
    return p


def _resolve(command: str, args: argparse.Namespace) -> dict:
    """Merge defaults, --config file values, and explicit flags."""
    resolved = dict(_DEFAULTS[command])
    config_path = getattr(args, "config", None)
    if config_path:
        try:
            with open(config_path, "r", encoding="utf-8") as fh:
                file_values = json.load(fh)
        except json.JSONDecodeError as e:
            raise FormatError(f"config file is not valid JSON: {e}") from e
        if not isinstance(file_values, dict):
            raise FormatError("config file must hold a JSON object")
        for key, value in file_values.items():
            if key not in resolved:
                raise ConfigError(f"config file: unknown option {key!r} for {command}")
            resolved[key] = value
    for key, value in vars(args).items():
        if key in resolved and value is not argparse.SUPPRESS:
            resolved[key] = value
    return resolved


def _manifest(command: str, resolved: dict, inputs: dict, outputs: dict) -> dict:
    return {
        "tool": "extremal",
        "version": __version__,
        "command": command,
        "config": {k: v for k, v in sorted(resolved.items())},
        "inputs": inputs,
        "outputs": outputs,
        "format_versions": {"model": MODEL_FORMAT_VERSION, "report": REPORT_FORMAT_VERSION},
    }


def _write_json(doc: dict, path: str) -> None:
    Path(path).parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, indent=2, sort_keys=True)
        fh.write("\n")


def cmd_generate(args: argparse.Namespace) -> int:
    cfg = _resolve("generate", args)
    out = _out_path(cfg["out"])
    dataset = data_mod.generate(data_mod.GenConfig(
        n=int(cfg["n"]), seed=int(cfg["seed"]),
        noise_std=float(cfg["noise_std"]), lo=float(cfg["lo"]), hi=float(cfg["hi"]),
    ))
    Path(out).parent.mkdir(parents=True, exist_ok=True)
    data_mod.write_csv(dataset, out)
    print(f"wrote {dataset.n} rows to {out}")
    return 0


def _parse_batch(value) -> int | str:
    if value == "full":
        return "full"
    try:
        return int(value)
    except (TypeError, ValueError):
        raise ConfigError(f"batch_size must be an integer or 'full', got {value!r}") from None


def _parse_hidden(value: str) -> tuple[int, ...]:
    try:
        widths = tuple(int(w) for w in str(value).split(",") if w.strip())
    except ValueError:
        raise ConfigError(f"hidden must be comma-separated integers, got {value!r}") from None
    if not widths:
        raise ConfigError("hidden must name at least one layer width")
    return widths


def cmd_train(args: argparse.Namespace) -> int:
    cfg = _resolve("train", args)
    if not cfg["data"]:
        raise ConfigError("train needs --data <csv>")
    dataset = data_mod.read_csv(cfg["data"])
    hidden = _parse_hidden(cfg["hidden"])
    spec = [(w, str(cfg["activation"])) for w in hidden] + [(1, "identity")]
    net = init_network(spec, dataset.m, seed=int(cfg["seed"]))
    train_cfg = TrainConfig(
        learning_rate=float(cfg["learning_rate"]), epochs=int(cfg["epochs"]),
        batch_size=_parse_batch(cfg["batch_size"]), optimizer=str(cfg["optimizer"]),
        validation_fraction=float(cfg["validation_fraction"]), seed=int(cfg["seed"]),
    )
    trained, report = train(net, dataset, train_cfg)
    if train_cfg.epochs == 0:
        print("warning: --epochs 0, model left at initialization", file=sys.stderr)

    out = _out_path(cfg["out"])
    report_path = cfg["report"] or str(Path(cfg["out"]).with_suffix("")) + ".train.json"
    report_path = _out_path(report_path)
    Path(out).parent.mkdir(parents=True, exist_ok=True)
    save_model(trained, out)
    doc = {
        "manifest": _manifest("train", cfg, {"data": cfg["data"]},
                              {"model": out, "report": report_path}),
        "loss_history": report.loss_history,
        "validation_mse": report.validation_mse,
        "epochs_run": report.epochs_run,
        "parameter_count": trained.parameter_count(),
    }
    _write_json(doc, report_path)
    val = "n/a" if report.validation_mse is None else f"{report.validation_mse:.6g}"
    print(f"wrote model to {out} (validation MSE {val}), report to {report_path}")
    return 0


def _parse_init(cfg: dict) -> InitStrategy:
    spec = str(cfg["init"])
    lo, hi = float(cfg["init_lo"]), float(cfg["init_hi"])
    if spec in ("normal", "normal_clipped"):
        return InitStrategy.normal_clipped(float(cfg["init_mean"]), float(cfg["init_std"]), lo, hi)
    if spec == "uniform":
        return InitStrategy.uniform(lo, hi)
    if spec.startswith("data:"):
        try:
            return InitStrategy.from_data(int(spec[5:]))
        except ValueError:
            raise ConfigError(f"bad init spec {spec!r} (expected data:<index>)") from None
    if spec.startswith("explicit:"):
        try:
            return InitStrategy.explicit([float(v) for v in spec[9:].split(",")])
        except ValueError:
            raise ConfigError(f"bad init spec {spec!r} (expected explicit:v0,v1,...)") from None
    raise ConfigError(f"unknown init strategy {spec!r}")


def cmd_extremize(args: argparse.Namespace) -> int:
    cfg = _resolve("extremize", args)
    if not cfg["model"]:
        raise ConfigError("extremize needs --model <json>")
    net = freeze(load_model(cfg["model"]))
    dataset = data_mod.read_csv(cfg["data"]) if cfg["data"] else None
    stats = data_mod.stats(dataset) if dataset is not None else None
    if cfg["constraints"]:
        loss = load_constraints(cfg["constraints"], stats)
    else:
        if stats is None:
            raise ConfigError("default constraints need dataset statistics; pass --data or --constraints")
        loss = casestudy.case_constraints(stats)
    strategy = _parse_init(cfg)
    run_cfg = ExtremalConfig(
        alpha=float(cfg["alpha"]), max_iters=int(cfg["max_iters"]),
        grad_tol=float(cfg["grad_tol"]), restarts=int(cfg["restarts"]),
        seed=int(cfg["seed"]), record_trajectory=bool(cfg["trajectory"]),
        optimizer=str(cfg["input_optimizer"]),
    )
    result = multi_start(net, loss, run_cfg, strategy, stats, dataset)

    out = _out_path(cfg["out"])
    outputs = {"report": out}
    if cfg["trajectory"]:
        traj_path = _out_path(cfg["trajectory"])
        outputs["trajectory"] = traj_path
        Path(traj_path).parent.mkdir(parents=True, exist_ok=True)
        m = net.input_dim
        with open(traj_path, "w", encoding="utf-8") as fh:
            fh.write(",".join(["iter"] + [f"x{i}" for i in range(m)] + ["y", "loss"]) + "\n")
            for it, x, y, value in result.trajectory or []:
                fields = [str(it)] + [repr(float(v)) for v in x] + [repr(float(y)), repr(float(value))]
                fh.write(",".join(fields) + "\n")
    doc = {
        "manifest": _manifest("extremize", cfg,
                              {"model": cfg["model"], "data": cfg["data"],
                               "constraints": cfg["constraints"]},
                              outputs),
        "x_hat": [float(v) for v in result.x_hat],
        "y_hat": result.y_hat,
        "final_loss": result.final_loss,
        "iterations": result.iterations,
        "converged": result.converged,
        "restarts": [asdict(s) for s in result.restart_results],
    }
    _write_json(doc, out)
    print(f"x_hat = {[round(float(v), 4) for v in result.x_hat]}, "
          f"y_hat = {result.y_hat:.4f}, loss = {result.final_loss:.6g} -> {out}")
    return 0


def cmd_reproduce(args: argparse.Namespace) -> int:
    cfg = _resolve("reproduce", args)
    n_seeds = int(cfg["seeds"])
    if n_seeds < 1:
        raise ConfigError("seeds must be positive")
    quick = bool(cfg["quick"])
    runs = []
    for k in range(n_seeds):
        # stage seeds are spaced so consecutive run seeds never overlap
        run_seed = int(cfg["seed"]) + 1000 * k
        runs.append(casestudy.run_case_study(run_seed, quick=quick, restarts=int(cfg["restarts"])))
        print(f"seed {run_seed}: y_hat = {runs[-1].quantities['yhat']:.4f}", file=sys.stderr)
    rows = casestudy.comparison_table(runs, quick=quick)

    header = f"{'quantity':<10} {'reference':>10} {'reproduced':>11} {'band':>18} {'status':>7}"
    print(header)
    print("-" * len(header))
    for row in rows:
        band = f"[{row.band_lo:.2f}, {row.band_hi:.2f}]"
        status = "pass" if row.passed else "FAIL"
        print(f"{row.quantity:<10} {row.reference:>10.4g} {row.value:>11.4g} {band:>18} {status:>7}")
    all_pass = all(row.passed for row in rows)
    print(f"{'all bands pass' if all_pass else 'BAND FAILURE'} "
          f"({n_seeds} seed{'s' if n_seeds != 1 else ''}, median comparison)")

    if cfg["out"]:
        out = _out_path(cfg["out"])
        Path(out).parent.mkdir(parents=True, exist_ok=True)
        with open(out, "w", encoding="utf-8") as fh:
            fh.write("quantity,reference,reproduced,band_lo,band_hi,status\n")
            for row in rows:
                fh.write(f"{row.quantity},{row.reference!r},{row.value!r},"
                         f"{row.band_lo!r},{row.band_hi!r},{'pass' if row.passed else 'fail'}\n")
        print(f"wrote table to {out}")
    return 0 if all_pass else 2


def cmd_plot(args: argparse.Namespace) -> int:
    cfg = _resolve("plot", args)
    if not cfg["data"]:
        raise ConfigError("plot needs --data <csv>")
    dataset = data_mod.read_csv(cfg["data"])
    net = None
    if cfg["model"] and os.path.exists(cfg["model"]):
        net = load_model(cfg["model"])
    else:
        missing = f" ({cfg['model']} not found)" if cfg["model"] else ""
        print(f"warning: no model{missing}, plotting data only", file=sys.stderr)
    out_dir = _out_path(cfg["out_dir"])
    paths = plotting.feature_scatters(dataset, net, out_dir)

    report_path = cfg["train_report"]
    if report_path is None and cfg["model"]:
        candidate = str(Path(cfg["model"]).with_suffix("")) + ".train.json"
        report_path = candidate if os.path.exists(candidate) else None
    if report_path and os.path.exists(report_path):
        with open(report_path, "r", encoding="utf-8") as fh:
            try:
                report = json.load(fh)
            except json.JSONDecodeError as e:
                raise FormatError(f"train report is not valid JSON: {e}") from e
        history = report.get("loss_history", [])
        if history:
            paths.append(plotting.loss_curve(history, report.get("validation_mse"),
                                             Path(out_dir) / "loss_curve.svg"))
        else:
            print("warning: train report has no loss history, skipping loss curve", file=sys.stderr)
    else:
        print("warning: no train report found, skipping loss curve", file=sys.stderr)
    for p in paths:
        print(f"wrote {p}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="extremal",
        description="Train a surrogate network and find inputs that extremize its output.",
        epilog="Set EXTREMAL_OUT_DIR to prefix relative output paths.",
        exit_on_error=False,
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    S = argparse.SUPPRESS

    p = sub.add_parser("generate", help="sample the benchmark dataset to CSV", exit_on_error=False)
    p.add_argument("--n", type=int, default=S, help="number of samples (default 1000)")
    p.add_argument("--seed", type=int, default=S)
    p.add_argument("--noise-std", type=float, default=S, dest="noise_std")
    p.add_argument("--lo", type=float, default=S)
    p.add_argument("--hi", type=float, default=S)
    p.add_argument("--out", default=S, help="output CSV path (default data.csv)")
    p.add_argument("--config", default=None, help="JSON file of option values")
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("train", help="fit the surrogate network on a CSV dataset", exit_on_error=False)
    p.add_argument("--data", default=S, help="training CSV")
    p.add_argument("--out", default=S, help="model JSON path (default model.json)")
    p.add_argument("--report", default=S, help="train report path (default <out>.train.json)")
    p.add_argument("--seed", type=int, default=S)
    p.add_argument("--hidden", default=S, help="comma-separated hidden widths (default 64,64)")
    p.add_argument("--activation", default=S, choices=["identity", "tanh", "relu", "softplus"])
    p.add_argument("--epochs", type=int, default=S)
    p.add_argument("--batch-size", default=S, dest="batch_size", help="integer or 'full'")
    p.add_argument("--learning-rate", type=float, default=S, dest="learning_rate")
    p.add_argument("--optimizer", default=S, choices=["adam", "sgd"])
    p.add_argument("--validation-fraction", type=float, default=S, dest="validation_fraction")
    p.add_argument("--config", default=None)
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("extremize", help="descend the composite loss in input space", exit_on_error=False)
    p.add_argument("--model", default=S, help="trained model JSON")
    p.add_argument("--data", default=S, help="dataset CSV for statistics and data-based init")
    p.add_argument("--constraints", default=S, help="constraint terms JSON (default: case-study pair)")
    p.add_argument("--out", default=S, help="result report path (default result.json)")
    p.add_argument("--trajectory", default=S, help="also write the iterate trajectory CSV here")
    p.add_argument("--restarts", type=int, default=S)
    p.add_argument("--seed", type=int, default=S)
    p.add_argument("--alpha", type=float, default=S, help="descent learning rate")
    p.add_argument("--max-iters", type=int, default=S, dest="max_iters")
    p.add_argument("--grad-tol", type=float, default=S, dest="grad_tol")
    p.add_argument("--init", default=S,
                   help="normal | uniform | data:<index> | explicit:v0,v1,...")
    p.add_argument("--init-lo", type=float, default=S, dest="init_lo")
    p.add_argument("--init-hi", type=float, default=S, dest="init_hi")
    p.add_argument("--init-mean", type=float, default=S, dest="init_mean")
    p.add_argument("--init-std", type=float, default=S, dest="init_std")
    p.add_argument("--input-optimizer", default=S, dest="input_optimizer", choices=["gd", "adam"])
    p.add_argument("--config", default=None)
    p.set_defaults(func=cmd_extremize)

    p = sub.add_parser("reproduce", help="run the bundled case study against reference bands",
                       exit_on_error=False)
    p.add_argument("--seeds", type=int, default=S, help="number of independent seeds (median compared)")
    p.add_argument("--seed", type=int, default=S, help="base seed")
    p.add_argument("--restarts", type=int, default=S)
    p.add_argument("--quick", action="store_true", default=S, help="reduced-size profile, relaxed bands")
    p.add_argument("--out", default=S, help="write the comparison table CSV here")
    p.add_argument("--config", default=None)
    p.set_defaults(func=cmd_reproduce)

    p = sub.add_parser("plot", help="emit feature scatters and the training loss curve",
                       exit_on_error=False)
    p.add_argument("--data", default=S, help="dataset CSV")
    p.add_argument("--model", default=S, help="trained model JSON for slice overlays")
    p.add_argument("--train-report", default=S, dest="train_report", help="train report JSON for the loss curve")
    p.add_argument("--out-dir", default=S, dest="out_dir")
    p.add_argument("--config", default=None)
    p.set_defaults(func=cmd_plot)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except argparse.ArgumentError as e:
        print(f"usage error: {e}", file=sys.stderr)
        return 1
    except SystemExit as e:  # --help / --version, or argparse-internal exits
        code = e.code if isinstance(e.code, int) else 1
        return 0 if code == 0 else 1
    try:
        return args.func(args)
    except ConfigError as e:
        print(f"error: {e}", file=sys.stderr)
        return 1
    except NumericError as e:
        print(f"numeric error: {e}", file=sys.stderr)
        return 2
    except (FormatError, OSError) as e:
        print(f"file error: {e}", file=sys.stderr)
        return 3
    except ExtremalError as e:
        print(f"error: {e}", file=sys.stderr)
        return 1


def entrypoint() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entrypoint()
