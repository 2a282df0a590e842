"""Command-line harness: ``feynclock <experiment> [flags]`` and ``feynclock verify``.

Exit codes: 0 success, 1 failed check, 2 configuration error.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .experiments import EXPERIMENTS, ConfigError, ExperimentConfig, run_experiment, verify
from .observables import write_csv, write_json

EXIT_OK, EXIT_CHECK_FAILED, EXIT_CONFIG = 0, 1, 2


def _int_list(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(x) for x in text.split(",") if x.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")


def _target(text: str) -> tuple[int, ...]:
    if not text or any(ch not in "+-" for ch in text):
        raise argparse.ArgumentTypeError("target must be a string of '+' and '-'")
    return tuple(1 if ch == "+" else -1 for ch in text)


def _add_params(p: argparse.ArgumentParser) -> None:
    p.add_argument("--s", type=int, help="active program-line length")
    p.add_argument("--delta", type=int, help="telomere length")
    p.add_argument("--mu", type=int, help="register q-bits (grover)")
    p.add_argument("--t0", type=float, help="pi-pulse centre (default s + 2 delta)")
    p.add_argument("--t-max", dest="t_max", type=float, help="end of the sampling grid")
    p.add_argument("--dt", type=float, default=0.05, help="sampling step (default 0.05)")
    p.add_argument("--target", type=_target, help="grover target, e.g. '+-+-+'")
    p.add_argument("--s-list", dest="s_list", type=_int_list, default=(10, 20, 50),
                   help="comma-separated s values (bounds)")
    p.add_argument("--seed", type=int, help="unused; reserved")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="feynclock",
                                     description="Feynman-clock cursor walk experiments")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in EXPERIMENTS:
        p = sub.add_parser(name.replace("_", "-"), aliases=[name] if "_" in name else [],
                           help=f"run the {name} experiment")
        _add_params(p)
        p.add_argument("-o", "--output", help="output file (default <experiment>.<format>)")
        p.add_argument("--format", choices=("csv", "json"),
                       help="output format (default from extension, else csv)")
        p.set_defaults(experiment=name)
    v = sub.add_parser("verify", help="run the invariant suite for an experiment")
    v.add_argument("--experiment", required=True,
                   type=lambda x: x.replace("-", "_"), choices=EXPERIMENTS)
    _add_params(v)
    v.add_argument("-o", "--output", help="also write the JSON report here")
    return parser


def _config(args) -> ExperimentConfig:
    fmt = getattr(args, "format", None)
    out = args.output
    if fmt is None:
        fmt = "json" if out and out.endswith(".json") else "csv"
    return ExperimentConfig(
        experiment=args.experiment, s=args.s, delta=args.delta, mu=args.mu, t0=args.t0,
        t_max=args.t_max, dt=args.dt, output_path=out, format=fmt, seed=args.seed,
        s_list=args.s_list, target=args.target,
    )


def _summary_line(name: str, summary: dict) -> str:
    parts = []
    for k, v in summary.items():
        if isinstance(v, float):
            parts.append(f"{k}={v:.6g}")
        else:
            parts.append(f"{k}={v}")
    return f"{name}: " + " ".join(parts)


def cmd_run(args) -> int:
    cfg = _config(args)
    try:
        cfg = cfg.resolved()
        outcome = run_experiment(cfg)
    except (ConfigError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    path = Path(cfg.output_path or f"{cfg.experiment}.{cfg.format}")
    try:
        if cfg.format == "csv":
            write_csv(outcome.series, path, index_name=outcome.index_name)
        else:
            series = outcome.series
            write_json(series[0] if len(series) == 1 else series, path)
    except OSError as exc:
        print(f"error: cannot write {path}: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    print(_summary_line(cfg.experiment, outcome.summary))
    print(f"wrote {path}")
    return EXIT_OK


def cmd_verify(args) -> int:
    cfg = _config(args)
    try:
        checks = verify(cfg)
    except (ConfigError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    failed = [c.name for c in checks if c.enforced and not c.passed]
    report = {"experiment": cfg.experiment, "passed": not failed, "failed": failed,
              "checks": [c.to_dict() for c in checks]}
    text = json.dumps(report, indent=1)
    print(text)
    if args.output:
        try:
            Path(args.output).write_text(text + "\n")
        except OSError as exc:
            print(f"error: cannot write {args.output}: {exc}", file=sys.stderr)
            return EXIT_CONFIG
    for name in failed:
        print(f"FAILED: {name}", file=sys.stderr)
    return EXIT_CHECK_FAILED if failed else EXIT_OK


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "verify":
        return cmd_verify(args)
    return cmd_run(args)


if __name__ == "__main__":
    sys.exit(main())
