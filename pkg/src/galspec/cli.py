"""Command-line front end.

Subcommands: decompose, graph-baseline, hermite, sweep, export-grid,
time-report.  Exit codes: 0 success, 1 configuration error (bad flags,
unreadable inputs, malformed JSON), 2 runtime failure during execution.
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from . import galerkin, graph, harness, hermite, storage
from .ground_truth import sample_gaussian, sample_sphere, sample_two_moons
from .kernels import KernelSpec


class ConfigError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # argparse exits with status 2 on usage errors; the CLI contract wants 1.
    def error(self, message):
        raise ConfigError(message)


def _add_common(sub, kernel_required: bool = True):
    sub.add_argument("--data", required=True,
                     help="dataset path (CSV or container) or sampler:{sphere,two_moons,gaussian}")
    sub.add_argument("--n", type=int, default=1000)
    sub.add_argument("--d", type=int, default=3)
    sub.add_argument("--noise", type=float, default=0.0)
    sub.add_argument("--kernel", required=kernel_required,
                     help='kernel JSON, e.g. {"family":"gauss","sigma":1.0}')
    sub.add_argument("--p", type=int, default=None)
    sub.add_argument("--epsilon", type=float, default=None)
    sub.add_argument("--k", type=int, default=25)
    sub.add_argument("--seed", type=int, default=0)
    sub.add_argument("--out", default=None)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="galspec",
                     description="Spectral decompositions from kernel Galerkin projections")
    subs = parser.add_subparsers(dest="command", required=True)

    s = subs.add_parser("decompose", parents=[], help="spectral estimate on a dataset")
    _add_common(s)

    s = subs.add_parser("graph-baseline", help="graph-Laplacian estimate on a dataset")
    _add_common(s)
    s.add_argument("--alpha", default=None,
                   help="Gaussian weight scale; omit for same-kernel weights")

    s = subs.add_parser("hermite", help="fit values and gradients from a problem file")
    s.add_argument("--data", required=True, help="problem file: CSV columns [x (d), y, t (d)]")
    s.add_argument("--kernel", required=True)
    s.add_argument("--p", type=int, required=True)
    s.add_argument("--epsilon", type=float, default=None)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--out", default=None, help="model JSON output path")

    s = subs.add_parser("sweep", help="grid sweep from a config file or quick flags")
    s.add_argument("--config", default=None, help="experiment config JSON path")
    s.add_argument("--task", default="galerkin_sphere", choices=harness.TASKS)
    s.add_argument("--data", default="sampler:sphere")
    s.add_argument("--n", type=int, default=1000)
    s.add_argument("--d", type=int, default=3)
    s.add_argument("--noise", type=float, default=0.0)
    s.add_argument("--k", type=int, default=25)
    s.add_argument("--epsilon", type=float, default=None)
    s.add_argument("--reps", type=int, default=1)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--out", default=None)
    s.add_argument("--format", default="jsonl", choices=("csv", "jsonl"))

    s = subs.add_parser("export-grid", help="tabulate eigenfunctions on a planar grid")
    _add_common(s)
    s.add_argument("--indices", default="0,1,2,3", help="comma-separated eigenfunction indices")
    s.add_argument("--resolution", type=int, default=50)
    s.add_argument("--grid-min", default=None, help="x1,x2 lower corner (default: data box)")
    s.add_argument("--grid-max", default=None, help="x1,x2 upper corner (default: data box)")

    s = subs.add_parser("time-report", help="decompose wall time over an (n, d) grid")
    s.add_argument("--kernel", required=True)
    s.add_argument("--p", type=int, default=177)
    s.add_argument("--n-grid", default="20000,40000,80000")
    s.add_argument("--d-grid", default="3,9,19")
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--out", default=None)
    return parser


def _parse_kernel(text: str) -> KernelSpec:
    try:
        return KernelSpec.from_json(text)
    except (json.JSONDecodeError, ValueError, TypeError, KeyError) as exc:
        raise ConfigError(f"bad --kernel value: {exc}") from exc


def _load_data(args) -> np.ndarray:
    spec = args.data
    if spec.startswith("sampler:"):
        name = spec.split(":", 1)[1]
        if name == "sphere":
            return sample_sphere(args.n, args.d, args.seed)
        if name == "two_moons":
            return sample_two_moons(args.n, args.noise, args.seed)
        if name == "gaussian":
            return sample_gaussian(args.n, args.d, args.seed)
        raise ConfigError(f"unknown sampler {name!r}")
    try:
        return storage.load_dataset(spec)
    except (OSError, ValueError) as exc:
        raise ConfigError(f"cannot read dataset {spec!r}: {exc}") from exc


def _print_values(values, k: int) -> None:
    shown = np.asarray(values)[:k]
    print("eigenvalues (ascending, first {}):".format(len(shown)))
    print(" ".join(format(float(v), ".12g") for v in shown))


def _cmd_decompose(args) -> int:
    kernel = _parse_kernel(args.kernel)
    data = _load_data(args)
    est = galerkin.decompose(data, kernel, p=args.p, epsilon=args.epsilon,
                             seed=args.seed)
    _print_values(est.values, args.k)
    if args.out:
        galerkin.save_estimate(args.out, est)
    return 0


def _cmd_graph(args) -> int:
    kernel = _parse_kernel(args.kernel)
    data = _load_data(args)
    alpha = None
    if args.alpha is not None:
        try:
            alpha = float(args.alpha)
        except ValueError as exc:
            raise ConfigError(f"bad --alpha value {args.alpha!r}") from exc
    est = graph.graph_decompose(data, kernel, alpha, p=args.p,
                                epsilon=args.epsilon, seed=args.seed)
    _print_values(est.values, args.k)
    if args.out:
        galerkin.save_estimate(args.out, est)
    return 0


def _cmd_hermite(args) -> int:
    kernel = _parse_kernel(args.kernel)
    try:
        problem = hermite.load_problem(args.data)
    except (OSError, ValueError) as exc:
        raise ConfigError(f"cannot read problem {args.data!r}: {exc}") from exc
    model = hermite.hermite_fit(problem, kernel, p=args.p,
                                epsilon=args.epsilon, seed=args.seed)
    pred = hermite.hermite_predict_batch(model, problem.data)
    rmse = float(np.sqrt(np.mean((pred - problem.values) ** 2)))
    print(f"fitted p={args.p} coefficients; training value RMSE {rmse:.6g}")
    if args.out:
        hermite.save_model(args.out, model)
    return 0


def _sweep_config(args) -> harness.ExperimentConfig:
    if args.config:
        try:
            obj = storage.load_json(args.config)
            return harness.ExperimentConfig.from_json(obj)
        except (OSError, ValueError, TypeError, KeyError) as exc:
            raise ConfigError(f"bad config file {args.config!r}: {exc}") from exc
    if not args.data.startswith("sampler:"):
        raise ConfigError("sweep without --config needs --data sampler:<name>")
    sampler = args.data.split(":", 1)[1]
    try:
        return harness.ExperimentConfig(
            task=args.task, sampler=sampler, n=args.n, d=args.d,
            noise=args.noise, k=args.k, epsilon=args.epsilon,
            repetitions=args.reps, base_seed=args.seed)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


def _cmd_sweep(args) -> int:
    config = _sweep_config(args)
    records = harness.run_experiment(config)
    if args.out:
        harness.write_records(args.out, records, fmt=args.format)
    else:
        for r in records:
            print(json.dumps(r.to_json()))
    summary = records[-1]
    if summary.error is not None:
        print(f"best-over-grid error: {summary.error:.6g}", file=sys.stderr)
    return 0 if summary.status == "ok" else 2


def _parse_pair(text, name) -> tuple:
    parts = text.split(",")
    if len(parts) != 2:
        raise ConfigError(f"{name} must be two comma-separated numbers")
    try:
        return float(parts[0]), float(parts[1])
    except ValueError as exc:
        raise ConfigError(f"bad {name} value {text!r}") from exc


def _cmd_export_grid(args) -> int:
    kernel = _parse_kernel(args.kernel)
    data = _load_data(args)
    if data.shape[1] != 2:
        raise ConfigError("grid export needs planar (d=2) data")
    try:
        indices = [int(tok) for tok in args.indices.split(",") if tok.strip()]
    except ValueError as exc:
        raise ConfigError(f"bad --indices value {args.indices!r}") from exc
    if not indices:
        raise ConfigError("--indices must name at least one eigenfunction")
    if args.grid_min is not None:
        mins = _parse_pair(args.grid_min, "--grid-min")
    else:
        mins = data.min(axis=0) - 0.05 * np.ptp(data, axis=0)
    if args.grid_max is not None:
        maxs = _parse_pair(args.grid_max, "--grid-max")
    else:
        maxs = data.max(axis=0) + 0.05 * np.ptp(data, axis=0)
    est = galerkin.decompose(data, kernel, p=args.p, epsilon=args.epsilon,
                             seed=args.seed)
    header, table = harness.export_eigenfunction_grid(
        est, indices, mins, maxs, args.resolution)
    if args.out:
        harness.write_table(args.out, header, table)
    else:
        print(",".join(header))
        for row in table:
            print(",".join(repr(float(v)) for v in row))
    return 0


def _parse_int_list(text, name) -> list:
    try:
        vals = [int(tok) for tok in text.split(",") if tok.strip()]
    except ValueError as exc:
        raise ConfigError(f"bad {name} value {text!r}") from exc
    if not vals:
        raise ConfigError(f"{name} must name at least one value")
    return vals


def _cmd_time_report(args) -> int:
    kernel = _parse_kernel(args.kernel)
    n_grid = _parse_int_list(args.n_grid, "--n-grid")
    d_grid = _parse_int_list(args.d_grid, "--d-grid")
    header, table = harness.time_scaling_report(kernel, args.p, n_grid, d_grid,
                                                seed=args.seed)
    if args.out:
        harness.write_table(args.out, header, table)
    for n, d, sec in table:
        print(f"n={int(n)} d={int(d)} seconds={sec:.4f}")
    return 0


_COMMANDS = {
    "decompose": _cmd_decompose,
    "graph-baseline": _cmd_graph,
    "hermite": _cmd_hermite,
    "sweep": _cmd_sweep,
    "export-grid": _cmd_export_grid,
    "time-report": _cmd_time_report,
}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    try:
        return _COMMANDS[args.command](args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except Exception as exc:
        print(f"runtime error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
