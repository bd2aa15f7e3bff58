"""Command-line entry point: ``sidebandit --graph complete:50 --means uniform:0.2:0.8:seed7 ...``."""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from .errors import ConfigError, InputError
from .harness import ExperimentConfig, run_experiment, speedup_path, write_csv
from .policies import POLICY_NAMES, PolicySpec

DEFAULTS = {
    "cover_fraction": 1.0,
    "runs": 100,
    "parallelism": 1,
    "seed": 0,
    "horizon": None,
    "epsilon_c": 5.0,
    "epsilon_d": 1.0,
    "output": "regret.csv",
    "dump_full": False,
}


class UsageError(ConfigError):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _fraction(text: str) -> float:
    value = float(text)
    if not 0.0 < value <= 1.0:
        raise argparse.ArgumentTypeError(f"cover fraction must lie in (0, 1], got {text}")
    return value


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="sidebandit", description=__doc__.splitlines()[0])
    p.add_argument("--config", help="JSON file with defaults; flags override it")
    src = p.add_argument_group("instance")
    src.add_argument("--graph", help="generator spec, e.g. complete:50, er:200:0.05:seed3, pa:500:4")
    src.add_argument("--edge-list", help="edge-list file ('K M' header, then 'u v' lines)")
    src.add_argument("--means", help="uniform:a:b[:seedN], file:PATH or ratings:PATH[:threshold]")
    run = p.add_argument_group("protocol")
    run.add_argument("--policy", action="append", choices=POLICY_NAMES,
                     help="repeatable; default is every policy")
    run.add_argument("--horizon", type=int)
    run.add_argument("--runs", type=int)
    run.add_argument("--seed", type=int)
    run.add_argument("--cover-fraction", type=_fraction)
    run.add_argument("--parallelism", type=int)
    run.add_argument("--epsilon-c", type=float)
    run.add_argument("--epsilon-d", type=float)
    out = p.add_argument_group("output")
    out.add_argument("--output")
    out.add_argument("--dump-full", action="store_true", default=None,
                     help="report every round instead of log-spaced checkpoints")
    p.add_argument("-v", "--verbose", action="store_true")
    return p


def _load_config_file(path: str) -> dict:
    try:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
    except OSError as exc:
        raise UsageError(f"cannot read config {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise UsageError(f"config {path} is not valid JSON: {exc}") from exc
    if not isinstance(data, dict):
        raise UsageError(f"config {path} must hold a JSON object")
    data = {k.replace("-", "_"): v for k, v in data.items()}
    known = set(DEFAULTS) | {"graph", "edge_list", "means", "policy"}
    unknown = sorted(set(data) - known)
    if unknown:
        raise UsageError(f"unknown config keys: {', '.join(unknown)}")
    return data


def parse_config(argv=None) -> ExperimentConfig:
    """Merge defaults, an optional JSON config file, then command-line flags."""
    args = build_parser().parse_args(argv)
    merged = dict(DEFAULTS)
    if args.config:
        merged.update(_load_config_file(args.config))
    for key, value in vars(args).items():
        if value is not None and key not in ("config", "verbose"):
            merged[key] = value

    if merged.get("graph") is None and merged.get("edge_list") is None:
        raise UsageError("one of --graph or --edge-list is required")
    if merged.get("graph") is not None and merged.get("edge_list") is not None:
        raise UsageError("--graph and --edge-list are mutually exclusive")
    if merged.get("means") is None:
        raise UsageError("--means is required")
    if merged.get("horizon") is None:
        raise UsageError("--horizon is required")
    fraction = float(merged["cover_fraction"])
    if not 0.0 < fraction <= 1.0:
        raise UsageError(f"cover fraction must lie in (0, 1], got {fraction}")

    names = merged.get("policy") or list(POLICY_NAMES)
    if isinstance(names, str):
        names = [names]
    try:
        policies = [
            PolicySpec(n, float(merged["epsilon_c"]), float(merged["epsilon_d"])) for n in names
        ]
        config = ExperimentConfig(
            graph_spec=merged.get("graph"),
            edge_list=merged.get("edge_list"),
            means_spec=merged["means"],
            policies=policies,
            horizon=int(merged["horizon"]),
            num_runs=int(merged["runs"]),
            base_seed=int(merged["seed"]),
            cover_fraction=fraction,
            output_path=merged["output"],
            parallelism=int(merged["parallelism"]),
            dump_full=bool(merged["dump_full"]),
        )
        return config.validate()
    except ConfigError as exc:
        raise UsageError(str(exc)) from None


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else argv
    logging.basicConfig(level=logging.INFO if ("-v" in argv or "--verbose" in argv) else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        config = parse_config(argv)
    except UsageError as exc:
        print(f"sidebandit: error: {exc}", file=sys.stderr)
        return 2
    try:
        result = run_experiment(config)
        write_csv(result.curves, result.speedups, result.cover_info, config.output_path)
    except (InputError, ConfigError, OSError) as exc:
        print(f"sidebandit: error: {exc}", file=sys.stderr)
        return 1

    info = result.cover_info
    print(f"arms {len(result.arms)}  cliques {info.num_cliques}  "
          f"avg cliques/arm {info.avg_cliques_per_arm:.3f}")
    for curve in sorted(result.curves, key=lambda c: c.policy):
        k = result.speedups.factors.get(curve.policy)
        extra = f"  speedup {k:.3g}x" if k is not None else ""
        print(f"{curve.policy:16s} r(T) = {curve.final:.6g}{extra}")
    print(f"wrote {config.output_path}")
    if result.speedups.factors:
        print(f"wrote {speedup_path(config.output_path)}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
