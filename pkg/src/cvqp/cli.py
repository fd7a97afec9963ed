"""Command-line interface: ``cvqp <command> [options]``.

Every option can also come from a JSON file passed with ``--config``; flags
given on the command line win.  When ``--out`` is omitted and
``CVQP_OUTPUT_DIR`` is set, artifacts are written there under a default
name.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from pathlib import Path

from .energy import (
    DEFAULT_E_RANGE,
    DEFAULT_RESOLUTION,
    DEFAULT_X_RANGE,
    EnergyBudget,
    and_surface,
    width_from_budget,
    xor_surface,
)
from .errors import ConfigurationError, CVQPError
from .gaussian import PerceptronConfig, ProductGaussianState, affine_readout
from .measurement import Polarity, prob_error, sample_outcomes
from .oracle import GridSpec
from .perceptron import (
    AND_TABLE,
    XOR_TABLE,
    TrainConfig,
    product_encoding_floor,
    run_and,
    run_xor,
    train_weights,
)
from .superposition import GaussianMixture, symmetric_superposition, xor_homodyne_mixture
from .verify import verify

OUTPUT_DIR_ENV = "CVQP_OUTPUT_DIR"

# config-file keys that differ from the argparse dest
_ALIASES = {"energy_total": "energy", "etas": "eta", "lr": "learning_rate"}
# keys a shared config file may carry for commands that do not use them
_SHARED_KEYS = {"seed", "shots", "workers"}
_COMMAND_TASK = {"and-table": "and", "xor-table": "xor"}


class CLIError(Exception):
    pass


def _dump(obj) -> str:
    return json.dumps(obj, indent=2, allow_nan=False) + "\n"


def _output_path(args, default_name: str) -> Path | None:
    if args.out:
        return Path(args.out)
    env = os.environ.get(OUTPUT_DIR_ENV)
    if env:
        return Path(env) / default_name
    return None


def _write(path: Path, text: str) -> None:
    try:
        # the default output directory is created on demand; an explicit --out must already have one
        if not path.parent.exists() and os.environ.get(OUTPUT_DIR_ENV):
            if path.parent == Path(os.environ[OUTPUT_DIR_ENV]):
                path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w", newline="") as fh:
            fh.write(text)
    except OSError as exc:
        raise CLIError(f"cannot write {path}: {exc.strerror or exc}") from exc


def _load_config(args) -> None:
    """Fill options left unset on the command line from ``--config``."""
    if not getattr(args, "config", None):
        return
    try:
        with open(args.config) as fh:
            data = json.load(fh)
    except FileNotFoundError:
        raise CLIError(f"config file not found: {args.config}")
    except (OSError, json.JSONDecodeError) as exc:
        raise CLIError(f"cannot read config {args.config}: {exc}")
    if not isinstance(data, dict):
        raise CLIError("config file must hold a JSON object")
    has_delta = any(k in data for k in ("delta", "r"))
    has_energy = any(k in data for k in ("energy", "energy_total"))
    if has_delta and has_energy:
        raise CLIError("config must give exactly one of delta / energy_total")
    task = data.pop("task", None)
    if task is not None:
        if task not in ("and", "xor"):
            raise CLIError(f"config task must be 'and' or 'xor', got {task!r}")
        fixed = _COMMAND_TASK.get(args.command)
        if fixed is not None and task != fixed:
            raise CLIError(f"config is for task {task!r} but the command is {args.command}")
        if hasattr(args, "task") and args.task is None:
            args.task = task
    for key, value in data.items():
        dest = _ALIASES.get(key, key).replace("-", "_")
        if not hasattr(args, dest):
            if key in _SHARED_KEYS:
                continue
            raise CLIError(f"unknown config key {key!r}")
        if getattr(args, dest) is None:
            if dest in ("r", "delta", "energy") and not isinstance(value, list):
                value = [value]
            setattr(args, dest, value)


def _fill(args, **defaults) -> None:
    for key, value in defaults.items():
        if getattr(args, key, None) is None:
            setattr(args, key, value)


def _widths(args, default_r=(0.0, 1.0)) -> list[float]:
    """Collect encoding widths from --r, --delta and --energy in that order."""
    widths = [math.exp(-r) for r in (args.r or [])]
    widths += list(args.delta or [])
    for e in args.energy or []:
        widths.append(math.sqrt(width_from_budget(EnergyBudget(e, args.displacement))))
    if not widths:
        widths = [math.exp(-r) for r in default_r]
    for d in widths:
        if not (d > 0.0 and math.isfinite(d)):
            raise CLIError(f"width must be positive, got {d!r}")
    return widths


def _add_common(p, task: bool = False) -> None:
    p.add_argument("--config", help="JSON file with default option values")
    p.add_argument("--out", help="output file (default: $%s/<name> if set)" % OUTPUT_DIR_ENV)
    if task:
        p.add_argument("--task", choices=("and", "xor"))


def _add_encoding(p) -> None:
    p.add_argument("--r", type=float, action="append", help="squeezing parameter; width = exp(-r)")
    p.add_argument("--delta", type=float, action="append", help="wavepacket width")
    p.add_argument("--energy", type=float, action="append", help="total two-mode energy budget")
    p.add_argument("--displacement", type=float, help="|x| used to encode logical +-1 (default 1)")
    p.add_argument("--bias", type=float, help="bias displacement b (default -1)")
    p.add_argument("--eta", type=float, nargs=2, metavar=("ETA1", "ETA2"), help="attenuation weights")


def _format_table(report) -> str:
    lines = [
        f"{report.task.upper()}  r={report.squeezing:.4f}  delta={report.delta:.6g}"
        f"  E_tot={report.energy_total:.6g}  etas={list(report.etas)}  b={report.bias:g}",
        f"{'x1':>4} {'x2':>4} {'label':>5} {'mean':>10} {'std':>10} {'p_err':>14}",
    ]
    for row in report.rows:
        lines.append(
            f"{row.inputs[0]:>4} {row.inputs[1]:>4} {row.label:>5} {row.mean:>10.4f}"
            f" {row.std:>10.4f} {100.0 * row.p_err:>13.4g}%"
        )
    lines.append(f"accuracy (uniform inputs): {100.0 * report.accuracy:.4f}%")
    return "\n".join(lines)


def _table_command(args, task: str) -> int:
    _load_config(args)
    runner = run_and if task == "and" else run_xor
    default_eta = [1.0, 1.0] if task == "and" else [1.0, -1.0]
    _fill(args, displacement=1.0, bias=-1.0, eta=default_eta)
    reports = [runner(d, tuple(args.eta), args.bias, args.displacement) for d in _widths(args)]
    payload = {"command": f"{task}-table", "reports": [r.to_dict() for r in reports]}
    text = _dump(payload)
    path = _output_path(args, f"{task}-table.json")
    if path is not None:
        _write(path, text)
    if args.json:
        sys.stdout.write(text)
    else:
        print("\n\n".join(_format_table(r) for r in reports))
    return 0


def cmd_and_table(args) -> int:
    return _table_command(args, "and")


def cmd_xor_table(args) -> int:
    return _table_command(args, "xor")


def cmd_surface(args) -> int:
    _load_config(args)
    _fill(
        args,
        task="and",
        x_min=DEFAULT_X_RANGE[0],
        x_max=DEFAULT_X_RANGE[1],
        e_min=DEFAULT_E_RANGE[0],
        e_max=DEFAULT_E_RANGE[1],
        resolution=DEFAULT_RESOLUTION,
    )
    path = _output_path(args, f"surface-{args.task}.csv")
    if path is None:
        raise CLIError(f"surface needs --out or ${OUTPUT_DIR_ENV}")
    build = and_surface if args.task == "and" else xor_surface
    surface = build((args.x_min, args.x_max), (args.e_min, args.e_max), args.resolution)
    _write(path, surface.to_csv())
    print(f"wrote {int(surface.feasible.sum())} feasible of {surface.feasible.size} cells to {path}")
    return 0


def cmd_oracle_verify(args) -> int:
    _load_config(args)
    _fill(args, grid_l=12.0, grid_n=2048, bins=1024, seed=0, product_cases=20,
          superposition_cases=10, convolution_cases=50, workers=1)
    report = verify(
        GridSpec(args.grid_l, args.grid_n),
        bins=args.bins,
        seed=args.seed,
        n_product=args.product_cases,
        n_superposition=args.superposition_cases,
        n_convolution=args.convolution_cases,
        workers=args.workers,
    )
    summary = report.to_dict()
    for kind, dev in summary["max_deviation"].items():
        n = sum(1 for c in report.cases if c.kind == kind)
        print(f"{kind:>14}: {n:3d} cases, max deviation {dev:.3e}")
    path = _output_path(args, "oracle-verify.json")
    if path is not None:
        _write(path, _dump(summary))
    if report.passed:
        print("PASS")
        return 0
    print("FAIL", file=sys.stderr)
    for case in report.failures:
        print(json.dumps(case.to_dict()), file=sys.stderr)
    return 1


def _single_width(args, default_r: float) -> float:
    widths = _widths(args, (default_r,))
    if len(widths) != 1:
        raise CLIError("give exactly one of --r / --delta / --energy")
    return widths[0]


def cmd_sample(args) -> int:
    _load_config(args)
    task = args.task or "and"
    _fill(args, displacement=1.0, bias=-1.0, inputs=[1, 1], shots=100_000, seed=0, workers=1,
          eta=[1.0, 1.0] if task == "and" else [1.0, -1.0])
    if args.shots < 1:
        raise CLIError("--shots must be positive")
    delta = _single_width(args, 1.0)
    s1, s2 = (int(v) for v in args.inputs)
    if {s1, s2} - {-1, 1}:
        raise CLIError("inputs must be -1 or +1")
    table = AND_TABLE if task == "and" else XOR_TABLE
    label = dict(table.rows)[(s1, s2)]
    x1, x2 = s1 * args.displacement, s2 * args.displacement
    if task == "and":
        state = ProductGaussianState.encode((x1, x2), delta)
        dist = GaussianMixture.from_mode(affine_readout(state, PerceptronConfig(tuple(args.eta), args.bias)))
    else:
        dist = xor_homodyne_mixture(symmetric_superposition(x1, x2, delta), args.bias, tuple(args.eta))
    polarity = Polarity.from_label(label)
    shots = sample_outcomes(dist, args.seed, args.shots, workers=args.workers)
    p = prob_error(dist, polarity)
    payload = {
        "command": "sample",
        "task": task,
        "inputs": [s1, s2],
        "label": label,
        "delta": delta,
        "etas": list(args.eta),
        "bias": args.bias,
        "seed": args.seed,
        "workers": args.workers,
        "shots": len(shots),
        "analytic_p_err": p,
        "empirical_p_err": shots.error_rate(polarity),
        "standard_error": math.sqrt(p * (1.0 - p) / len(shots)),
    }
    if not args.no_shots:
        payload["y"] = shots.y.tolist()
        payload["activated"] = shots.activated.tolist()
    text = _dump(payload)
    path = _output_path(args, f"sample-{task}.json")
    if path is not None:
        _write(path, text)
        print(
            f"{len(shots)} shots, empirical p_err {payload['empirical_p_err']:.6g}"
            f" vs analytic {p:.6g} (SE {payload['standard_error']:.2g})"
        )
    else:
        sys.stdout.write(text)
    return 0


def cmd_train(args) -> int:
    _load_config(args)
    task = args.task or "and"
    _fill(args, displacement=1.0, seed=0)
    defaults = TrainConfig()
    _fill(args, learning_rate=defaults.learning_rate, max_iter=defaults.max_iter, tol=defaults.tol,
          restarts=defaults.restarts)
    if not args.learning_rate > 0.0:
        raise CLIError(f"learning rate must be positive, got {args.learning_rate!r}")
    delta = _single_width(args, 1.0)
    cfg = TrainConfig(
        learning_rate=args.learning_rate, max_iter=args.max_iter, tol=args.tol, restarts=args.restarts
    )
    table = AND_TABLE if task == "and" else XOR_TABLE
    result = train_weights(table, delta, cfg, seed=args.seed, init=args.init)
    floor, argmin = product_encoding_floor(table, delta)
    payload = {"command": "train", "task": task, "delta": delta, "seed": args.seed, **result.to_dict(),
               "sweep_floor": floor, "sweep_argmin": list(argmin)}
    text = _dump(payload)
    path = _output_path(args, f"train-{task}.json")
    if path is not None:
        _write(path, text)
    print(
        f"{task}: etas={list(result.etas)} b={result.bias:.6g} mean p_err={result.loss:.4g}"
        f" worst={result.worst_p_err:.4g} converged={result.converged}; sweep floor {floor:.4g}"
    )
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="cvqp", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    for name, func, help_ in (
        ("and-table", cmd_and_table, "AND misclassification table"),
        ("xor-table", cmd_xor_table, "XOR misclassification table (superposed inputs)"),
    ):
        p = sub.add_parser(name, help=help_)
        _add_common(p)
        _add_encoding(p)
        p.add_argument("--json", action="store_true", help="print the JSON report instead of the table")
        p.set_defaults(func=func)

    p = sub.add_parser("surface", help="error-vs-energy surface as CSV")
    _add_common(p, task=True)
    p.add_argument("--x-min", type=float)
    p.add_argument("--x-max", type=float)
    p.add_argument("--e-min", type=float)
    p.add_argument("--e-max", type=float)
    p.add_argument("--resolution", type=int, help="points per axis (default 121)")
    p.set_defaults(func=cmd_surface)

    p = sub.add_parser("oracle-verify", help="closed form vs brute-force grid oracle")
    _add_common(p)
    p.add_argument("--grid-l", type=float, help="grid half-extent L (default 12)")
    p.add_argument("--grid-n", type=int, help="grid points per axis N (default 2048)")
    p.add_argument("--bins", type=int, help="histogram bins (default 1024)")
    p.add_argument("--seed", type=int)
    p.add_argument("--product-cases", type=int)
    p.add_argument("--superposition-cases", type=int)
    p.add_argument("--convolution-cases", type=int)
    p.add_argument("--workers", type=int)
    p.set_defaults(func=cmd_oracle_verify)

    p = sub.add_parser("sample", help="Monte Carlo homodyne shots for one input row")
    _add_common(p, task=True)
    _add_encoding(p)
    p.add_argument("--inputs", type=int, nargs=2, metavar=("X1", "X2"))
    p.add_argument("--shots", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--workers", type=int)
    p.add_argument("--no-shots", action="store_true", help="omit the per-shot arrays from the JSON")
    p.set_defaults(func=cmd_sample)

    p = sub.add_parser("train", help="fit weights and bias by gradient descent")
    _add_common(p, task=True)
    _add_encoding(p)
    p.add_argument("--lr", dest="learning_rate", type=float)
    p.add_argument("--max-iter", type=int)
    p.add_argument("--tol", type=float)
    p.add_argument("--restarts", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--init", type=float, nargs=3, metavar=("ETA1", "ETA2", "B"))
    p.set_defaults(func=cmd_train)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (CLIError, CVQPError) as exc:
        print(f"cvqp {args.command}: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
